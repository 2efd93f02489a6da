#pragma once

// Reference implementations used as independent oracles in the tests. They
// share only the AST types with the library.

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mpcv/ast.hpp"
#include "mpcv/constraints.hpp"
#include "mpcv/memory.hpp"
#include "mpcv/parse.hpp"

namespace ref {

using mpcv::Expr;
using mpcv::Op;
using mpcv::Var;
using Env = std::map<Var, std::int64_t>;

inline std::int64_t md(std::int64_t a, std::int64_t p) { return ((a % p) + p) % p; }

// Ownership is ignored here: terms cross party lines.
inline std::int64_t eval(const Expr& e, const Env& env, std::int64_t p) {
    switch (e->op) {
        case Op::Var: return env.at(e->var);
        case Op::Const: return md(static_cast<std::int64_t>(e->value % static_cast<std::uint64_t>(p)), p);
        case Op::Add: return md(eval(e->kids[0], env, p) + eval(e->kids[1], env, p), p);
        case Op::Sub: return md(eval(e->kids[0], env, p) - eval(e->kids[1], env, p), p);
        case Op::Mul: return md(eval(e->kids[0], env, p) * eval(e->kids[1], env, p), p);
        case Op::Neg: return md(-eval(e->kids[0], env, p), p);
        case Op::Not: return md(1 - eval(e->kids[0], env, p), p);
        case Op::Mux: {
            std::int64_t c = eval(e->kids[0], env, p);
            return c ? eval(e->kids[2], env, p) : eval(e->kids[1], env, p);
        }
        case Op::OT: return eval(e->kids[0], env, p) ? eval(e->kids[2], env, p) : eval(e->kids[1], env, p);
        case Op::OT4: {
            std::int64_t i = 2 * eval(e->kids[0], env, p) + eval(e->kids[1], env, p);
            return eval(e->kids[2 + static_cast<std::size_t>(i)], env, p);
        }
    }
    return 0;
}

inline bool holds(const mpcv::Constraint& c, const Env& env, std::int64_t p) {
    switch (c->kind) {
        case mpcv::CNode::Kind::Eq: return eval(c->lhs, env, p) == eval(c->rhs, env, p);
        case mpcv::CNode::Kind::Not: return !holds(c->kids[0], env, p);
        case mpcv::CNode::Kind::And:
            for (const auto& k : c->kids)
                if (!holds(k, env, p)) return false;
            return true;
    }
    return false;
}

inline void for_each_env(const std::vector<Var>& vs, std::int64_t p, const std::function<void(const Env&)>& f) {
    Env env;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == vs.size()) {
            f(env);
            return;
        }
        for (std::int64_t v = 0; v < p; ++v) {
            env[vs[i]] = v;
            go(i + 1);
        }
    };
    go(0);
}

inline std::vector<Env> models(const mpcv::Constraint& c, std::int64_t p) {
    auto vs = mpcv::vars_of(c);
    std::vector<Var> order(vs.begin(), vs.end());
    std::vector<Env> out;
    for_each_env(order, p, [&](const Env& e) {
        if (holds(c, e, p)) out.push_back(e);
    });
    return out;
}

inline Env from_memory(const mpcv::Memory& m) {
    Env e;
    for (const auto& [v, x] : m)
        if (x) e[v] = static_cast<std::int64_t>(*x);
    return e;
}

// Straight-line protocol generator: every command reads only variables owned
// by its computing client (or reveals) that exist at that point.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

    Expr expr(const std::vector<Var>& pool, int depth) {
        if (pool.empty() || depth == 0 || pick(3) == 0) {
            if (pool.empty() || pick(4) == 0) return mpcv::ex::cnst(pick(3));
            return mpcv::ex::var(pool[pick(pool.size())]);
        }
        Expr a = expr(pool, depth - 1), b = expr(pool, depth - 1);
        switch (pick(4)) {
            case 0: return mpcv::ex::add(a, b);
            case 1: return mpcv::ex::sub(a, b);
            case 2: return mpcv::ex::mul(a, b);
            default: return mpcv::ex::neg(a);
        }
    }

    // At most max_vars variables in total (inputs plus assigned).
    mpcv::Protocol protocol(std::uint64_t p, std::size_t max_vars) {
        std::vector<Var> vars;
        std::vector<mpcv::Cmd> cmds;
        std::size_t inputs = 1 + pick(std::max<std::size_t>(1, max_vars / 2));
        for (std::size_t i = 0; i < inputs; ++i) {
            mpcv::ClientId c = 1 + static_cast<mpcv::ClientId>(pick(2));
            vars.push_back(pick(2) ? mpcv::secret("s" + std::to_string(i), c) : mpcv::flip("r" + std::to_string(i), c));
        }
        std::size_t n = 0;
        while (vars.size() < max_vars && cmds.size() < 4) {
            mpcv::ClientId src = 1 + static_cast<mpcv::ClientId>(pick(2));
            std::vector<Var> pool;
            for (const Var& v : vars)
                if (v.owner == src || v.kind == mpcv::VarKind::Reveal) pool.push_back(v);
            Expr body = expr(pool, 2);
            Var target;
            std::size_t kind = pick(3);
            std::string w = "w" + std::to_string(n++);
            if (kind == 0)
                target = mpcv::reveal(w);
            else
                target = mpcv::mesg(w, 1 + static_cast<mpcv::ClientId>(pick(2)));
            cmds.push_back(mpcv::Cmd::assign(target, src, body));
            vars.push_back(target);
        }
        return mpcv::make_protocol(cmds, mpcv::Prime(p));
    }
};

inline std::string corpus(const std::string& f) { return std::string(MPCV_CORPUS) + "/" + f; }

}  // namespace ref
