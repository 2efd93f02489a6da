#include <functional>
#include <set>

#include "lexer.hpp"
#include "mpcv/error.hpp"
#include "mpcv/prelude.hpp"

namespace mpcv {

namespace {

using lex::T;
using lex::Token;

const std::set<std::string> kKeywords = {"let", "in", "as", "assert", "pre", "post", "not", "mux", "OT", "OT4", "out"};

MExprP mk(MK k, std::vector<MExprP> kids = {}, int line = 0) {
    auto e = std::make_shared<MExpr>();
    e->k = k;
    e->kids = std::move(kids);
    e->line = line;
    return e;
}

class Parser {
  public:
    explicit Parser(const std::string& src) : toks_(lex::tokenize(src)) {}

    SourceProgram program() {
        SourceProgram prog;
        std::optional<CTmpl> pending_pre;
        while (!at_end()) {
            if (is_ident("pre") && peek(1).s == ":") {
                if (pending_pre) error("two pre: blocks in a row");
                pos_ += 2;
                pending_pre = block();
                continue;
            }
            if (is_ident("post") && peek(1).s == ":") {
                pos_ += 2;
                if (prog.cb.funs.empty() || prog.cb.funs.back().post || last_was_stmt_)
                    error("post: must follow a definition");
                prog.cb.funs.back().post = block();
                continue;
            }
            if (auto def = try_def_header()) {
                def->body = seq_until("}");
                expect("}");
                def->pre = std::move(pending_pre);
                pending_pre.reset();
                prog.cb.funs.push_back(std::move(*def));
                last_was_stmt_ = false;
                continue;
            }
            if (pending_pre) error("pre: must precede a definition");
            Seq s = seq_until("");
            for (auto& i : s) prog.main.push_back(std::move(i));
            last_was_stmt_ = true;
        }
        if (pending_pre) error("dangling pre: block");
        return prog;
    }

    CTmpl constraint_source() {
        CTmpl c;
        if (at_end()) return c;
        if (is_punct("{")) {
            c = block();
        } else {
            c = cexpr();
        }
        if (!at_end()) error("trailing input after constraint");
        return c;
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    bool last_was_stmt_ = false;

    const Token& peek(std::size_t k = 0) const {
        std::size_t i = std::min(pos_ + k, toks_.size() - 1);
        return toks_[i];
    }
    bool at_end() const { return peek().t == T::End; }
    bool is_punct(const std::string& s, std::size_t k = 0) const {
        return peek(k).t == T::Punct && peek(k).s == s;
    }
    bool is_ident(const std::string& s, std::size_t k = 0) const {
        return peek(k).t == T::Ident && peek(k).s == s;
    }
    [[noreturn]] void error(const std::string& msg) const {
        const Token& t = peek();
        std::string near = t.t == T::End ? "end of input" : "'" + t.s + "'";
        fail(ErrorKind::Syntax, "line " + std::to_string(t.line) + ", column " + std::to_string(t.col) + ": " + msg +
                                    " (near " + near + ")");
    }
    void expect(const std::string& p) {
        if (!is_punct(p)) error("expected '" + p + "'");
        ++pos_;
    }
    bool accept(const std::string& p) {
        if (!is_punct(p)) return false;
        ++pos_;
        return true;
    }
    std::string ident() {
        if (peek().t != T::Ident) error("expected identifier");
        return toks_[pos_++].s;
    }

    std::optional<FunDef> try_def_header() {
        if (peek().t != T::Ident || kKeywords.count(peek().s) || !is_punct("(", 1)) return std::nullopt;
        std::size_t save = pos_;
        FunDef f;
        f.line = peek().line;
        f.name = ident();
        expect("(");
        if (!is_punct(")")) {
            do {
                if (peek().t != T::Ident || kKeywords.count(peek().s)) {
                    pos_ = save;
                    return std::nullopt;
                }
                f.params.push_back(ident());
            } while (accept(","));
        }
        if (!accept(")") || !accept("{")) {
            pos_ = save;
            return std::nullopt;
        }
        return f;
    }

    // Statements up to `close` (not consumed); an empty close means a
    // top-level run that stops before the next definition or annotation.
    Seq seq_until(const std::string& close) {
        Seq s;
        while (true) {
            while (accept(";")) {
            }
            if (at_end()) break;
            if (!close.empty() && is_punct(close)) break;
            if (close.empty()) {
                if ((is_ident("pre") || is_ident("post")) && is_punct(":", 1)) break;
                std::size_t save = pos_;
                if (try_def_header()) {
                    pos_ = save;
                    break;
                }
            }
            if (is_ident("let")) {
                Instr i;
                i.k = Instr::Kind::Let;
                i.line = peek().line;
                ++pos_;
                i.name = ident();
                expect("=");
                i.a = expr();
                if (!is_ident("in")) error("expected 'in'");
                ++pos_;
                i.body = seq_until(close);
                s.push_back(std::move(i));
                break;
            }
            s.push_back(statement());
            if (!accept(";")) {
                if (at_end() || (!close.empty() && is_punct(close))) break;
                if (close.empty()) continue;
                error("expected ';'");
            }
        }
        return s;
    }

    Instr statement() {
        Instr i;
        i.line = peek().line;
        if (is_ident("assert")) {
            ++pos_;
            i.k = Instr::Kind::Assert;
            expect("(");
            i.a = expr();
            if (!accept("=") && !accept("==")) error("expected '=' in assert");
            i.b = expr();
            expect(")");
            expect("@");
            i.c = client();
            return i;
        }
        MExprP e = expr();
        if (accept(":=")) {
            i.k = Instr::Kind::Assign;
            i.a = e;
            i.b = expr();
        } else if (is_ident("as")) {
            ++pos_;
            i.k = Instr::Kind::Hint;
            i.a = e;
            i.b = expr();
        } else {
            i.k = Instr::Kind::Expr;
            i.a = e;
        }
        return i;
    }

    MExprP client() {
        int line = peek().line;
        if (peek().t == T::Num) {
            auto e = mk(MK::Num, {}, line);
            std::const_pointer_cast<MExpr>(e)->num = parse_num(toks_[pos_++].s);
            return e;
        }
        if (peek().t == T::Ident && !kKeywords.count(peek().s)) {
            auto e = mk(MK::Name, {}, line);
            std::const_pointer_cast<MExpr>(e)->s = toks_[pos_++].s;
            return e;
        }
        if (accept("(")) {
            MExprP e = expr();
            expect(")");
            return e;
        }
        error("expected client after '@'");
    }

    std::uint64_t parse_num(const std::string& s) {
        try {
            std::size_t used = 0;
            unsigned long long v = std::stoull(s, &used);
            if (used != s.size()) error("bad number");
            return v;
        } catch (const std::out_of_range&) {
            error("number out of range");
        }
    }

    MExprP expr() {
        MExprP e = additive();
        while (is_punct("++")) {
            int line = peek().line;
            ++pos_;
            e = mk(MK::Concat, {e, additive()}, line);
        }
        return e;
    }

    MExprP additive() {
        MExprP e = multiplicative();
        while (is_punct("+") || is_punct("-")) {
            int line = peek().line;
            MK k = toks_[pos_++].s == "+" ? MK::Add : MK::Sub;
            e = mk(k, {e, multiplicative()}, line);
        }
        return e;
    }

    MExprP multiplicative() {
        MExprP e = unary();
        while (is_punct("*")) {
            int line = peek().line;
            ++pos_;
            e = mk(MK::Mul, {e, unary()}, line);
        }
        return e;
    }

    MExprP unary() {
        int line = peek().line;
        if (accept("-") || accept("~")) return mk(MK::Neg, {unary()}, line);
        if (accept("!")) return mk(MK::Not, {unary()}, line);
        return postfix();
    }

    MExprP postfix() {
        MExprP e = primary();
        while (true) {
            int line = peek().line;
            if (accept("@")) {
                e = mk(MK::At, {e, client()}, line);
            } else if (is_punct(".") && peek(1).t == T::Ident) {
                ++pos_;
                auto p = mk(MK::Proj, {e}, line);
                std::const_pointer_cast<MExpr>(p)->s = ident();
                e = p;
            } else {
                return e;
            }
        }
    }

    std::vector<MExprP> args() {
        expect("(");
        std::vector<MExprP> as;
        if (!is_punct(")")) {
            do as.push_back(expr());
            while (accept(","));
        }
        expect(")");
        return as;
    }

    MExprP primary() {
        const Token& t = peek();
        int line = t.line;
        if (t.t == T::Num) {
            auto e = mk(MK::Num, {}, line);
            std::const_pointer_cast<MExpr>(e)->num = parse_num(toks_[pos_++].s);
            return e;
        }
        if (t.t == T::Str) {
            auto e = mk(MK::Str, {}, line);
            std::const_pointer_cast<MExpr>(e)->s = toks_[pos_++].s;
            return e;
        }
        if (accept("(")) {
            MExprP e = expr();
            expect(")");
            return e;
        }
        if (accept("[")) {
            std::vector<MExprP> items;
            if (!is_punct("]")) {
                do items.push_back(expr());
                while (accept(","));
            }
            expect("]");
            return mk(MK::List, std::move(items), line);
        }
        if (accept("{")) {
            auto r = std::make_shared<MExpr>();
            r->k = MK::Record;
            r->line = line;
            while (!is_punct("}")) {
                std::string f = ident();
                for (const auto& g : r->fields)
                    if (g == f) error("duplicate record field " + f);
                expect("=");
                r->fields.push_back(f);
                r->kids.push_back(expr());
                if (!accept(";") && !accept(",")) break;
            }
            expect("}");
            return r;
        }
        if (t.t != T::Ident) error("expected expression");
        std::string w = t.s;
        if (w == "true" || w == "false") {
            ++pos_;
            auto e = mk(MK::Num, {}, line);
            std::const_pointer_cast<MExpr>(e)->num = w == "true" ? 1 : 0;
            return e;
        }
        if ((w == "s" || w == "r" || w == "m" || w == "p") && is_punct("[", 1)) {
            pos_ += 2;
            MExprP name = expr();
            expect("]");
            auto v = mk(MK::FVar, {name}, line);
            std::const_pointer_cast<MExpr>(v)->vk = w == "s"   ? VarKind::Secret
                                                   : w == "r" ? VarKind::Flip
                                                   : w == "m" ? VarKind::Mesg
                                                              : VarKind::Reveal;
            return v;
        }
        if (w == "out") {
            ++pos_;
            auto v = mk(MK::FVar, {}, line);
            std::const_pointer_cast<MExpr>(v)->vk = VarKind::Out;
            return v;
        }
        if (w == "mux" || w == "OT" || w == "OT4") {
            ++pos_;
            auto as = args();
            std::size_t lo = w == "mux" ? 3 : w == "OT" ? 3 : 4;
            std::size_t hi = w == "mux" ? 3 : lo + 1;
            if (as.size() < lo || as.size() > hi) error(w + " takes " + std::to_string(lo) + (hi > lo ? "-" + std::to_string(hi) : "") + " arguments");
            return mk(w == "mux" ? MK::Mux : w == "OT" ? MK::OT : MK::OT4, std::move(as), line);
        }
        if (kKeywords.count(w)) error("unexpected keyword '" + w + "'");
        ++pos_;
        if (is_punct("(")) {
            auto c = mk(MK::Call, args(), line);
            std::const_pointer_cast<MExpr>(c)->s = w;
            return c;
        }
        auto n = mk(MK::Name, {}, line);
        std::const_pointer_cast<MExpr>(n)->s = w;
        return n;
    }

    CTmpl block() {
        expect("{");
        CTmpl c;
        if (!is_punct("}")) c = cexpr();
        expect("}");
        return c;
    }

    CTmpl cexpr() {
        std::vector<CTmpl> parts{catom()};
        while (accept("/\\")) parts.push_back(catom());
        if (parts.size() == 1) return parts[0];
        CTmpl c;
        c.k = CTmpl::Kind::And;
        c.kids = std::move(parts);
        return c;
    }

    CTmpl catom() {
        if (is_ident("not")) {
            ++pos_;
            expect("(");
            CTmpl c;
            c.k = CTmpl::Kind::Not;
            c.kids.push_back(cexpr());
            expect(")");
            return c;
        }
        if (is_punct("(")) {
            std::size_t save = pos_;
            try {
                ++pos_;
                CTmpl c = cexpr();
                expect(")");
                if (is_punct("/\\") || is_punct(")") || is_punct("}") || at_end()) return c;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Syntax) throw;
            }
            pos_ = save;
        }
        CTmpl c;
        c.k = CTmpl::Kind::Eq;
        c.lhs = expr();
        expect("==");
        c.rhs = expr();
        return c;
    }
};

void calls_in(const MExprP& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->k == MK::Call) out.insert(e->s);
    for (const auto& k : e->kids) calls_in(k, out);
}

void calls_in(const CTmpl& c, std::set<std::string>& out) {
    calls_in(c.lhs, out);
    calls_in(c.rhs, out);
    for (const auto& k : c.kids) calls_in(k, out);
}

void calls_in(const Seq& s, std::set<std::string>& out, bool& emits) {
    for (const Instr& i : s) {
        if (i.k == Instr::Kind::Assign || i.k == Instr::Kind::Assert || i.k == Instr::Kind::Hint) emits = true;
        calls_in(i.a, out);
        calls_in(i.b, out);
        calls_in(i.c, out);
        calls_in(i.body, out, emits);
    }
}

}  // namespace

const FunDef* Codebase::find(const std::string& name) const {
    for (const auto& f : funs)
        if (f.name == name) return &f;
    return nullptr;
}

namespace {

std::set<std::string> direct_callees(const FunDef& f) {
    std::set<std::string> out;
    bool emits = false;
    calls_in(f.body, out, emits);
    if (f.pre) calls_in(*f.pre, out);
    if (f.post) calls_in(*f.post, out);
    return out;
}

}  // namespace

std::vector<std::string> Codebase::dependency_order() const {
    std::vector<std::string> order;
    std::map<std::string, int> state;
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        int& st = state[n];
        if (st == 2) return;
        if (st == 1) fail(ErrorKind::Syntax, "recursion through '" + n + "'");
        st = 1;
        const FunDef* f = find(n);
        if (!f) fail(ErrorKind::Unbound, "call to undefined function '" + n + "'");
        for (const auto& c : direct_callees(*f)) visit(c);
        state[n] = 2;
        order.push_back(n);
    };
    for (const auto& f : funs) visit(f.name);
    return order;
}

std::vector<std::string> Codebase::protocol_callees(const std::string& name) const {
    std::vector<std::string> out;
    const FunDef* f = find(name);
    if (!f) return out;
    std::set<std::string> cs;
    bool emits = false;
    calls_in(f->body, cs, emits);
    for (const auto& c : cs)
        if (const FunDef* g = find(c); g && g->protocol) out.push_back(c);
    return out;
}

SourceProgram parse_source(const std::string& src) {
    Parser p(src);
    SourceProgram prog = p.program();
    std::set<std::string> seen;
    for (const auto& f : prog.cb.funs) {
        if (!seen.insert(f.name).second) fail(ErrorKind::Syntax, "duplicate definition of '" + f.name + "'");
        std::set<std::string> ps;
        for (const auto& x : f.params)
            if (!ps.insert(x).second) fail(ErrorKind::Syntax, "duplicate parameter '" + x + "' in " + f.name);
    }
    auto order = prog.cb.dependency_order();
    for (const auto& n : order) {
        FunDef* f = nullptr;
        for (auto& g : prog.cb.funs)
            if (g.name == n) f = &g;
        std::set<std::string> cs;
        bool emits = false;
        calls_in(f->body, cs, emits);
        for (const auto& c : cs)
            if (prog.cb.find(c)->protocol) emits = true;
        f->protocol = emits;
    }
    std::set<std::string> cs;
    bool emits = false;
    calls_in(prog.main, cs, emits);
    for (const auto& c : cs)
        if (!prog.cb.find(c)) fail(ErrorKind::Unbound, "call to undefined function '" + c + "'");
    return prog;
}

CTmpl parse_constraint_template(const std::string& src) {
    Parser p(src);
    return p.constraint_source();
}

}  // namespace mpcv
