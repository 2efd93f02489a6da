#include "mpcv/constraints.hpp"

#include "mpcv/error.hpp"

namespace mpcv {

namespace cn {

Constraint eq(Term a, Term b) {
    auto n = std::make_shared<CNode>();
    n->kind = CNode::Kind::Eq;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

Constraint conj(Constraint a, Constraint b) { return conj(std::vector<Constraint>{std::move(a), std::move(b)}); }

Constraint conj(const std::vector<Constraint>& cs) {
    std::vector<Constraint> flat;
    for (const auto& c : cs)
        for (const auto& k : conjuncts(c))
            if (!is_truth(k)) flat.push_back(k);
    if (flat.empty()) return truth();
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<CNode>();
    n->kind = CNode::Kind::And;
    n->kids = std::move(flat);
    return n;
}

Constraint neg(Constraint a) {
    auto n = std::make_shared<CNode>();
    n->kind = CNode::Kind::Not;
    n->kids = {std::move(a)};
    return n;
}

Constraint truth() { return eq(ex::cnst(0), ex::cnst(0)); }

}  // namespace cn

bool is_truth(const Constraint& c) {
    return c->kind == CNode::Kind::Eq && c->lhs->op == Op::Const && c->rhs->op == Op::Const &&
           c->lhs->value == 0 && c->rhs->value == 0;
}

std::vector<Constraint> conjuncts(const Constraint& c) {
    if (c->kind != CNode::Kind::And) return {c};
    std::vector<Constraint> out;
    for (const auto& k : c->kids) {
        auto sub = conjuncts(k);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

void collect_vars(const Constraint& c, std::set<Var>& out) {
    if (c->kind == CNode::Kind::Eq) {
        collect_vars(c->lhs, out);
        collect_vars(c->rhs, out);
    }
    for (const auto& k : c->kids) collect_vars(k, out);
}

std::set<Var> vars_of(const Constraint& c) {
    std::set<Var> s;
    collect_vars(c, s);
    return s;
}

Expr map_vars(const Expr& e, const std::function<Var(const Var&)>& f) {
    if (e->op == Op::Var) return ex::var(f(e->var));
    if (e->kids.empty()) return e;
    auto n = std::make_shared<Node>(*e);
    for (auto& k : n->kids) k = map_vars(k, f);
    return n;
}

Constraint map_vars(const Constraint& c, const std::function<Var(const Var&)>& f) {
    auto n = std::make_shared<CNode>(*c);
    if (c->kind == CNode::Kind::Eq) {
        n->lhs = map_vars(c->lhs, f);
        n->rhs = map_vars(c->rhs, f);
    }
    for (auto& k : n->kids) k = map_vars(k, f);
    return n;
}

namespace {

Term choice_term(const Expr& b, const Prime& p, std::vector<Constraint>* side) {
    Term t = toeq_expr(b, p, side);
    if (p.value() == 2) return t;
    if (t->op != Op::Var)
        fail(ErrorKind::Structural, "OT choice over F_" + std::to_string(p.value()) + " must be a variable, got " +
                                        print_term(t));
    if (side) side->push_back(cn::eq(ex::mul(t, ex::sub(t, ex::cnst(1))), ex::cnst(0)));
    return t;
}

}  // namespace

Term toeq_expr(const Expr& e, const Prime& p, std::vector<Constraint>* side) {
    switch (e->op) {
        case Op::Var: return e;
        case Op::Const: return ex::cnst(p.reduce(e->value));
        case Op::Add: return ex::add(toeq_expr(e->kids[0], p, side), toeq_expr(e->kids[1], p, side));
        case Op::Sub: return ex::sub(toeq_expr(e->kids[0], p, side), toeq_expr(e->kids[1], p, side));
        case Op::Mul: return ex::mul(toeq_expr(e->kids[0], p, side), toeq_expr(e->kids[1], p, side));
        case Op::Neg:
        case Op::Not:
        case Op::Mux: return toeq_expr(desugar(e), p, side);
        case Op::OT: {
            Term b = choice_term(e->kids[0], p, side);
            Term e2 = toeq_expr(e->kids[1], p, side);
            Term e3 = toeq_expr(e->kids[2], p, side);
            return ex::add(ex::mul(b, e3), ex::mul(ex::sub(ex::cnst(1), b), e2));
        }
        case Op::OT4: {
            Term b1 = choice_term(e->kids[0], p, side);
            Term b2 = choice_term(e->kids[1], p, side);
            auto nb1 = ex::sub(ex::cnst(1), b1);
            auto nb2 = ex::sub(ex::cnst(1), b2);
            Term r1 = toeq_expr(e->kids[2], p, side), r2 = toeq_expr(e->kids[3], p, side);
            Term r3 = toeq_expr(e->kids[4], p, side), r4 = toeq_expr(e->kids[5], p, side);
            return ex::add(ex::add(ex::mul(ex::mul(nb1, nb2), r1), ex::mul(ex::mul(nb1, b2), r2)),
                           ex::add(ex::mul(ex::mul(b1, nb2), r3), ex::mul(ex::mul(b1, b2), r4)));
        }
    }
    return e;
}

Constraint toeq_cmd(const Cmd& c, const Prime& p) {
    std::vector<Constraint> side;
    Constraint main;
    if (c.kind == Cmd::Kind::Assign)
        main = cn::eq(ex::var(c.target), toeq_expr(c.body, p, &side));
    else
        main = cn::eq(toeq_expr(c.body, p, &side), toeq_expr(c.rhs, p, &side));
    side.insert(side.begin(), main);
    return cn::conj(side);
}

Constraint toeq(const Protocol& pi) { return toeq_without(pi, pi.cmds.size()); }

Constraint toeq_without(const Protocol& pi, std::size_t skip) {
    std::vector<Constraint> cs;
    for (std::size_t i = 0; i < pi.cmds.size(); ++i)
        if (i != skip) cs.push_back(toeq_cmd(pi.cmds[i], pi.prime));
    return cn::conj(cs);
}

std::uint64_t eval_term(const Term& t, const Memory& m, const Prime& p) {
    switch (t->op) {
        case Op::Var: {
            auto it = m.find(t->var);
            if (it == m.end() || !it->second) fail(ErrorKind::Unbound, "unbound variable " + to_string(t->var));
            return p.reduce(*it->second);
        }
        case Op::Const: return p.reduce(t->value);
        case Op::Add: return p.add(eval_term(t->kids[0], m, p), eval_term(t->kids[1], m, p));
        case Op::Sub: return p.sub(eval_term(t->kids[0], m, p), eval_term(t->kids[1], m, p));
        case Op::Mul: return p.mul(eval_term(t->kids[0], m, p), eval_term(t->kids[1], m, p));
        default: return eval_term(toeq_expr(t, p), m, p);
    }
}

bool holds(const Constraint& c, const Memory& m, const Prime& p) {
    switch (c->kind) {
        case CNode::Kind::Eq: return eval_term(c->lhs, m, p) == eval_term(c->rhs, m, p);
        case CNode::Kind::And:
            for (const auto& k : c->kids)
                if (!holds(k, m, p)) return false;
            return true;
        case CNode::Kind::Not: return !holds(c->kids[0], m, p);
    }
    return false;
}

std::string print_constraint(const Constraint& c) {
    switch (c->kind) {
        case CNode::Kind::Eq: return print_term(c->lhs) + " == " + print_term(c->rhs);
        case CNode::Kind::Not: return "not(" + print_constraint(c->kids[0]) + ")";
        case CNode::Kind::And: {
            std::string s;
            for (std::size_t i = 0; i < c->kids.size(); ++i) s += (i ? " /\\ " : "") + print_constraint(c->kids[i]);
            return s;
        }
    }
    return "";
}

RoleSets role_sets_with(const Protocol& pi, const Constraint& pre) {
    RoleSets rs = role_sets(pi);
    for (const Var& v : vars_of(pre)) {
        switch (v.kind) {
            case VarKind::Secret: rs.S.insert(v); break;
            case VarKind::Flip: rs.R.insert(v); break;
            case VarKind::Mesg: rs.M.insert(v); break;
            case VarKind::Reveal: rs.P.insert(v); break;
            case VarKind::Out: rs.O.insert(v); break;
        }
    }
    rs.V = rs.M;
    rs.V.insert(rs.P.begin(), rs.P.end());
    return rs;
}

std::set<ClientId> federation_with(const Protocol& pi, const Constraint& pre) {
    std::set<ClientId> fed = pi.federation;
    for (const Var& v : vars_of(pre))
        if (v.owner != 0) fed.insert(v.owner);
    return fed;
}

Protocol with_federation(const Protocol& pi, const Constraint& pre) {
    Protocol q = pi;
    q.federation = federation_with(pi, pre);
    return q;
}

std::set<Var> initial_vars(const Protocol& pi, const Constraint& pre) {
    std::set<Var> xs = vars_of(pre);
    std::set<Var> assigned = assigned_vars(pi);
    for (const Var& v : protocol_vars(pi))
        if (!assigned.count(v)) xs.insert(v);
    return xs;
}

void check_preprocessing(const Protocol& pi, const Constraint& pre) {
    std::set<Var> assigned = assigned_vars(pi);
    for (const Var& v : vars_of(pre))
        if (assigned.count(v))
            fail(ErrorKind::Structural, "protocol assigns preprocessed variable " + to_string(v));
}

}  // namespace mpcv
