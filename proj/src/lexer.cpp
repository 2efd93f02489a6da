#include "lexer.hpp"

#include <cctype>

#include "mpcv/error.hpp"

namespace mpcv::lex {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

[[noreturn]] void bad(int line, int col, const std::string& msg) {
    fail(ErrorKind::Syntax, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

}  // namespace

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    int line = 1;
    std::size_t i = 0, n = src.size(), line_start = 0;
    // columns count bytes from 1
    auto col_of = [&](std::size_t at) { return static_cast<int>(at - line_start) + 1; };
    std::size_t tok = 0;
    auto push = [&](T t, std::string s) { out.push_back({t, std::move(s), line, col_of(tok)}); };
    while (i < n) {
        char c = src[i];
        tok = i;
        if (c == '\n') {
            ++line;
            ++i;
            line_start = i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
            continue;
        }
        if (c == '$') bad(line, col_of(i), "'$' is reserved");
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < n && ident_char(src[j])) ++j;
            push(T::Ident, src.substr(i, j - i));
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            push(T::Num, src.substr(i, j - i));
            i = j;
            continue;
        }
        if (c == '"') {
            std::string s;
            ++i;
            while (i < n && src[i] != '"') {
                if (src[i] == '\n') bad(line, col_of(tok), "unterminated string");
                if (src[i] == '$') bad(line, col_of(i), "'$' is reserved");
                if (src[i] == '\\' && i + 1 < n) ++i;
                s += src[i++];
            }
            if (i >= n) bad(line, col_of(tok), "unterminated string");
            ++i;
            push(T::Str, s);
            continue;
        }
        // UTF-8 logical symbols
        if (src.compare(i, 2, "\xC2\xAC") == 0) {
            push(T::Punct, "!");
            i += 2;
            continue;
        }
        if (src.compare(i, 3, "\xE2\x88\xA7") == 0) {
            push(T::Punct, "/\\");
            i += 3;
            continue;
        }
        static const char* two[] = {":=", "==", "++", "/\\"};
        bool done = false;
        for (const char* op : two) {
            if (src.compare(i, 2, op) == 0) {
                push(T::Punct, op);
                i += 2;
                done = true;
                break;
            }
        }
        if (done) continue;
        if (std::string("()[]{},;.@:=+-*~!").find(c) != std::string::npos) {
            push(T::Punct, std::string(1, c));
            ++i;
            continue;
        }
        bad(line, col_of(i), std::string("unexpected character '") + c + "'");
    }
    out.push_back({T::End, "", line, col_of(n)});
    return out;
}

}  // namespace mpcv::lex
