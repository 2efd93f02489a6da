#include "mpcv/conf_types.hpp"

#include <sstream>

#include "mpcv/error.hpp"
#include "mpcv/pmf.hpp"

namespace mpcv {

std::set<Var> ConfType::footprint() const {
    std::set<Var> out = deps;
    for (const auto& c : ciphers) {
        out.insert(c.pad);
        for (const Var& v : c.body->footprint()) out.insert(v);
    }
    return out;
}

bool operator==(const ConfType& a, const ConfType& b) {
    if (a.deps != b.deps || a.ciphers.size() != b.ciphers.size()) return false;
    for (std::size_t i = 0; i < a.ciphers.size(); ++i)
        if (!(a.ciphers[i].pad == b.ciphers[i].pad) || !(*a.ciphers[i].body == *b.ciphers[i].body)) return false;
    return true;
}

ConfType dep_type(std::set<Var> deps) {
    ConfType t;
    t.deps = std::move(deps);
    return t;
}

ConfType cipher_type(const Var& pad, ConfType body) {
    ConfType t;
    t.ciphers.push_back({pad, std::make_shared<const ConfType>(std::move(body))});
    return t;
}

std::set<Var> reach(const std::set<Var>& vs, const Gamma& env) {
    std::set<Var> out;
    std::vector<Var> work(vs.begin(), vs.end());
    while (!work.empty()) {
        Var v = work.back();
        work.pop_back();
        if (!out.insert(v).second) continue;
        auto it = env.find(v);
        if (it == env.end()) continue;
        for (const Var& w : it->second.footprint()) work.push_back(w);
    }
    return out;
}

namespace {

std::optional<Var> pad_of(const Term& t, const Term& rest, ClientId sender, const RSet& R, const Gamma* env) {
    if (t->op != Op::Var || t->var.kind != VarKind::Flip) return std::nullopt;
    if (sender != 0 && t->var.owner != sender) return std::nullopt;
    if (R.count(t->var)) return std::nullopt;
    std::set<Var> vs = vars_of(rest);
    if (env) vs = reach(vs, *env);
    if (vs.count(t->var)) return std::nullopt;
    return t->var;
}

}  // namespace

ConfType type_term(const Term& phi, ClientId sender, RSet& R, const Gamma* env) {
    if (phi->op == Op::Add || phi->op == Op::Sub) {
        const Term& a = phi->kids[0];
        const Term& b = phi->kids[1];
        if (auto r = pad_of(b, a, sender, R, env)) {
            R.insert(*r);
            return cipher_type(*r, type_term(a, sender, R, env));
        }
        if (phi->op == Op::Add) {
            if (auto r = pad_of(a, b, sender, R, env)) {
                R.insert(*r);
                return cipher_type(*r, type_term(b, sender, R, env));
            }
        }
    }
    return dep_type(vars_of(phi));
}

ConfType recheck_pads(const ConfType& t, const Gamma& env) {
    ConfType out = dep_type(t.deps);
    for (const Cipher& c : t.ciphers) {
        if (reach(c.body->footprint(), env).count(c.pad)) {
            for (const Var& v : c.body->footprint()) out.deps.insert(v);
            out.deps.insert(c.pad);
        } else {
            out.ciphers.push_back({c.pad, std::make_shared<const ConfType>(recheck_pads(*c.body, env))});
        }
    }
    return out;
}

namespace {

std::optional<std::pair<Var, Term>> definition(const Constraint& c) {
    if (c->kind != CNode::Kind::Eq) return std::nullopt;
    if (c->lhs->op == Op::Var && !vars_of(c->rhs).count(c->lhs->var)) return std::pair{c->lhs->var, c->rhs};
    if (c->rhs->op == Op::Var && !vars_of(c->lhs).count(c->rhs->var)) return std::pair{c->rhs->var, c->lhs};
    return std::nullopt;
}

}  // namespace

ConfTyping type_protocol_conf(const Protocol& pi, const Constraint& pre, const Hints& hints, Solver* solver,
                              bool discharge) {
    ConfTyping out;
    std::set<Var> assigned = assigned_vars(pi);
    for (const auto& [x, t] : hints)
        if (!assigned.count(x)) fail(ErrorKind::Hint, "hint for " + to_string(x) + ", which is never assigned");

    Constraint world;
    if (discharge && !hints.empty()) {
        if (!solver) fail(ErrorKind::Structural, "hint discharge needs a solver");
        world = cn::conj(pre, toeq(pi));
    }

    type_pre_definitions(out, pi, pre);
    for (const Cmd& c : pi.cmds) {
        if (c.kind != Cmd::Kind::Assign) continue;
        Term phi = toeq_expr(c.body, pi.prime);
        auto h = hints.find(c.target);
        if (h != hints.end()) {
            phi = toeq_expr(h->second, pi.prime);
            HintCheck hc{c.target, phi, Verdict::Unknown};
            if (discharge) {
                EntailResult r = solver->entails(world, cn::eq(ex::var(c.target), phi));
                hc.verdict = r.verdict;
                if (r.verdict == Verdict::False)
                    fail(ErrorKind::Hint, "hint " + to_string(c.target) + " as " + print_term(phi) + " is not entailed");
                if (r.verdict == Verdict::Unknown)
                    fail(ErrorKind::Solver, "hint " + to_string(c.target) + " undecided: " + r.detail);
            }
            out.hints.push_back(hc);
        }
        ConfType t = type_term(phi, c.client, out.R, &out.gamma);
        out.gamma[c.target] = std::move(t);
    }
    return out;
}

void consume_pads(RSet& R, const RSet& more, const Var& at) {
    for (const Var& r : more) {
        if (R.count(r))
            fail(ErrorKind::Linearity, "flip " + to_string(r) + " used as a pad twice (at " + to_string(at) + ")");
        R.insert(r);
    }
}

void type_pre_definitions(ConfTyping& out, const Protocol& pi, const Constraint& pre) {
    std::set<Var> assigned = assigned_vars(pi);
    for (const Constraint& c : conjuncts(pre)) {
        auto d = definition(c);
        if (!d) continue;
        const Var& x = d->first;
        if (x.kind == VarKind::Secret || x.kind == VarKind::Flip) continue;
        if (assigned.count(x) || out.gamma.count(x)) continue;
        ConfType t = type_term(d->second, 0, out.R, &out.gamma);
        out.gamma[x] = std::move(t);
    }
}

std::set<Var> leakage_closure(const Gamma& gamma, const std::set<Var>& accessible) {
    std::set<Var> deps;
    std::vector<Cipher> pending;
    std::set<Var> expanded;
    auto absorb = [&](const ConfType& t) {
        deps.insert(t.deps.begin(), t.deps.end());
        pending.insert(pending.end(), t.ciphers.begin(), t.ciphers.end());
    };
    for (const Var& a : accessible) deps.insert(a);

    bool changed = true;
    while (changed) {
        changed = false;
        for (const Var& d : std::set<Var>(deps)) {
            auto it = gamma.find(d);
            if (it == gamma.end() || expanded.count(d)) continue;
            expanded.insert(d);
            absorb(it->second);
            changed = true;
        }
        for (std::size_t i = 0; i < pending.size();) {
            if (deps.count(pending[i].pad)) {
                auto body = pending[i].body;
                pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
                absorb(*body);
                changed = true;
            } else {
                ++i;
            }
        }
    }
    for (const auto& c : pending) deps.insert(c.pad);
    return deps;
}

std::set<Var> adversary_access(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& C,
                               bool with_reveals) {
    RoleSets rs = role_sets_with(pi, pre);
    std::set<Var> acc;
    auto take = [&](const std::set<Var>& xs) {
        for (const Var& v : xs)
            if (C.count(v.owner)) acc.insert(v);
    };
    take(rs.M);
    take(rs.S);
    take(rs.R);
    take(initial_vars(pi, pre));
    if (with_reveals) acc.insert(rs.P.begin(), rs.P.end());
    return acc;
}

ConfVerdict check_conf_partition(const ConfTyping& t, const Protocol& pi, const Constraint& pre,
                                 const std::set<ClientId>& H, const std::set<ClientId>& C, bool with_reveals) {
    ConfVerdict v;
    v.H = H;
    v.C = C;
    v.closure = leakage_closure(t.gamma, adversary_access(pi, pre, C, with_reveals));
    for (const Var& x : v.closure)
        if (x.kind == VarKind::Secret && H.count(x.owner)) v.leaked.insert(x);
    v.pass = v.leaked.empty();
    return v;
}

std::vector<ConfVerdict> check_conf_all(const ConfTyping& t, const Protocol& pi, const Constraint& pre,
                                        bool with_reveals) {
    std::vector<ConfVerdict> out;
    for (const auto& [H, C] : partitions(federation_with(pi, pre)))
        out.push_back(check_conf_partition(t, pi, pre, H, C, with_reveals));
    return out;
}

std::string print_conftype(const ConfType& t) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const Var& v : t.deps) {
        os << (first ? "" : ", ") << to_string(v);
        first = false;
    }
    for (const auto& c : t.ciphers) {
        os << (first ? "" : ", ") << "c(" << to_string(c.pad) << ", " << print_conftype(*c.body) << ")";
        first = false;
    }
    os << "}";
    return os.str();
}

}  // namespace mpcv
