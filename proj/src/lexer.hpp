#pragma once

#include <string>
#include <vector>

namespace mpcv::lex {

enum class T { Ident, Num, Str, Punct, End };

struct Token {
    T t = T::End;
    std::string s;
    int line = 1;
    int col = 1;
};

// `//` comments; `¬` and `∧` are read as `!` and `/\`. `$` is not allowed in source.
std::vector<Token> tokenize(const std::string& src);

}  // namespace mpcv::lex
