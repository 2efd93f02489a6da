#include "mpcv/semantics.hpp"

#include <algorithm>

#include "mpcv/error.hpp"

namespace mpcv {

namespace {

// Called for every OT choice bit in evaluation order.
using ChoiceHook = std::function<std::uint64_t(int slot, ClientId at, ClientId recv, std::uint64_t honest)>;

struct Evaluator {
    const Memory& m;
    const Prime& p;
    const ChoiceHook* hook = nullptr;
    int slot = 0;

    std::uint64_t choice(const Expr& b, ClientId at, ClientId recv) {
        std::uint64_t c = ev(b, recv);
        int s = slot++;
        if (hook) c = (*hook)(s, at, recv, c);
        if (c > 1) fail(ErrorKind::Stuck, "OT choice " + std::to_string(c) + " is not a bit");
        return c;
    }

    std::uint64_t ev(const Expr& e, ClientId at) {
        switch (e->op) {
            case Op::Var: {
                const Var& v = e->var;
                if (v.kind == VarKind::Out) fail(ErrorKind::Ownership, "outputs cannot be read");
                if (v.kind != VarKind::Reveal && v.owner != at)
                    fail(ErrorKind::Ownership, to_string(v) + " is not visible at client " + std::to_string(at));
                auto it = m.find(v);
                if (it == m.end() || !it->second) fail(ErrorKind::Unbound, "unbound variable " + to_string(v));
                return p.reduce(*it->second);
            }
            case Op::Const: return p.reduce(e->value);
            case Op::Add: {
                auto a = ev(e->kids[0], at);
                return p.add(a, ev(e->kids[1], at));
            }
            case Op::Sub: {
                auto a = ev(e->kids[0], at);
                return p.sub(a, ev(e->kids[1], at));
            }
            case Op::Mul: {
                auto a = ev(e->kids[0], at);
                return p.mul(a, ev(e->kids[1], at));
            }
            case Op::Neg: return p.neg(ev(e->kids[0], at));
            case Op::Not: return p.sub(p.reduce(1), ev(e->kids[0], at));
            case Op::Mux: {
                auto c = ev(e->kids[0], at);
                auto a = ev(e->kids[1], at);
                auto b = ev(e->kids[2], at);
                return p.add(p.mul(p.sub(p.reduce(1), c), a), p.mul(c, b));
            }
            case Op::OT: {
                auto c = choice(e->kids[0], at, e->recv);
                auto e2 = ev(e->kids[1], at);
                auto e3 = ev(e->kids[2], at);
                return c ? e3 : e2;
            }
            case Op::OT4: {
                auto b1 = choice(e->kids[0], at, e->recv);
                auto b2 = choice(e->kids[1], at, e->recv);
                std::uint64_t rows[4];
                for (int i = 0; i < 4; ++i) rows[i] = ev(e->kids[2 + i], at);
                return rows[2 * b1 + b2];
            }
        }
        return 0;
    }
};

void walk_choices(const Expr& e, ClientId at, int& slot,
                  const std::function<void(int, ClientId, ClientId)>& cb) {
    switch (e->op) {
        case Op::OT:
            walk_choices(e->kids[0], e->recv, slot, cb);
            cb(slot++, at, e->recv);
            walk_choices(e->kids[1], at, slot, cb);
            walk_choices(e->kids[2], at, slot, cb);
            return;
        case Op::OT4:
            walk_choices(e->kids[0], e->recv, slot, cb);
            cb(slot++, at, e->recv);
            walk_choices(e->kids[1], e->recv, slot, cb);
            cb(slot++, at, e->recv);
            for (int i = 2; i < 6; ++i) walk_choices(e->kids[i], at, slot, cb);
            return;
        default:
            for (const auto& k : e->kids) walk_choices(k, at, slot, cb);
    }
}

bool visible_to(const Var& v, const std::set<ClientId>& C) { return v.kind == VarKind::Reveal || C.count(v.owner); }

}  // namespace

std::uint64_t eval_expr(const Memory& m, const Expr& e, ClientId at, const Prime& p) {
    Evaluator ev{m, p};
    return ev.ev(e, at);
}

Memory run(const Memory& m0, const Protocol& pi) {
    Memory m = m0;
    for (std::size_t i = 0; i < pi.cmds.size(); ++i) {
        const Cmd& c = pi.cmds[i];
        if (c.kind == Cmd::Kind::Assign) {
            mpcv::bind(m, c.target, eval_expr(m, c.body, c.client, pi.prime));
        } else {
            Evaluator ev{m, pi.prime};
            auto l = ev.ev(c.body, c.client);
            auto r = ev.ev(c.rhs, c.client);
            if (l != r)
                fail(ErrorKind::Assertion, "assertion " + std::to_string(i + 1) + " failed at client " +
                                               std::to_string(c.client) + " in a passive run");
        }
    }
    return m;
}

Memory corrupt_view(const Memory& m, const std::set<ClientId>& C) {
    Memory r;
    for (const auto& [x, v] : m)
        if (visible_to(x, C)) r.emplace(x, v);
    return r;
}

AdvRun run_adversarial(const Memory& m0, const Protocol& pi, const std::set<ClientId>& C, const AdversaryStrategy& A) {
    AdvRun res;
    res.mem = m0;
    Memory& m = res.mem;
    for (std::size_t i = 0; i < pi.cmds.size(); ++i) {
        const Cmd& c = pi.cmds[i];
        bool corrupt = C.count(c.client) > 0;
        ChoiceHook hook = [&](int slot, ClientId at, ClientId recv, std::uint64_t honest) -> std::uint64_t {
            if (C.count(at) || !C.count(recv)) return honest;
            auto it = A.choices.find({i, slot});
            if (it == A.choices.end()) return honest;
            return pi.prime.reduce(it->second(corrupt_view(m, C), honest));
        };
        Evaluator ev{m, pi.prime, &hook};
        if (c.kind == Cmd::Kind::Assign) {
            std::uint64_t v;
            try {
                v = ev.ev(c.body, c.client);
            } catch (const Error& err) {
                // A rewritten choice that is not a bit stops the honest sender.
                if (err.kind() == ErrorKind::Stuck && !corrupt) {
                    Evaluator plain{m, pi.prime};
                    plain.ev(c.body, c.client);
                    res.aborted = true;
                    return res;
                }
                throw;
            }
            if (corrupt) {
                auto it = A.sites.find(i);
                if (it != A.sites.end()) v = pi.prime.reduce(it->second(corrupt_view(m, C), v));
            }
            mpcv::bind(m, c.target, v);
        } else {
            if (corrupt) continue;
            auto l = ev.ev(c.body, c.client);
            auto r = ev.ev(c.rhs, c.client);
            if (l != r) {
                res.aborted = true;
                return res;
            }
        }
    }
    return res;
}

std::vector<Memory> initial_memories(const Protocol& pi, const Constraint& pre, std::uint64_t budget) {
    std::set<Var> vars = initial_vars(pi, pre);
    const Prime& p = pi.prime;

    // Top-level conjuncts x == t define x, provided the definitions stay acyclic.
    std::map<Var, Term> defs;
    for (const auto& c : conjuncts(pre)) {
        if (c->kind != CNode::Kind::Eq || c->lhs->op != Op::Var) continue;
        const Var& x = c->lhs->var;
        if (defs.count(x)) continue;
        std::set<Var> deps = vars_of(c->rhs);
        if (deps.count(x)) continue;
        defs.emplace(x, c->rhs);
    }
    std::vector<Var> order;
    std::set<Var> done;
    for (bool progress = true; progress;) {
        progress = false;
        for (auto it = defs.begin(); it != defs.end(); ++it) {
            if (done.count(it->first)) continue;
            bool ready = true;
            for (const Var& d : vars_of(it->second))
                if (defs.count(d) && !done.count(d)) ready = false;
            if (ready) {
                order.push_back(it->first);
                done.insert(it->first);
                progress = true;
            }
        }
    }
    std::vector<Var> free;
    for (const Var& v : vars)
        if (!done.count(v)) free.push_back(v);

    std::uint64_t space = 1;
    for (std::size_t i = 0; i < free.size(); ++i) {
        if (space > budget / p.value())
            fail(ErrorKind::Infeasible, "enumeration infeasible: " + std::to_string(free.size()) +
                                            " free initial variables over F_" + std::to_string(p.value()));
        space *= p.value();
    }

    std::vector<Memory> out;
    std::vector<std::uint64_t> vals(free.size(), 0);
    for (std::uint64_t n = 0; n < space; ++n) {
        Memory m;
        for (std::size_t i = 0; i < free.size(); ++i) m[free[i]] = vals[i];
        for (const Var& x : order) m[x] = eval_term(defs.at(x), m, p);
        if (holds(pre, m, p)) out.push_back(std::move(m));
        for (std::size_t i = 0; i < free.size(); ++i) {
            if (++vals[i] < p.value()) break;
            vals[i] = 0;
        }
    }
    return out;
}

std::vector<Memory> enumerate_runs(const Protocol& pi, const Constraint& pre, std::uint64_t budget) {
    check_preprocessing(pi, pre);
    std::vector<Memory> out;
    for (const Memory& m0 : initial_memories(pi, pre, budget)) {
        try {
            out.push_back(run(m0, pi));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Assertion && e.kind() != ErrorKind::Stuck) throw;
        }
    }
    return out;
}

namespace {

struct SiteOptions {
    std::vector<Rewrite> options;
    std::vector<std::string> labels;
    bool exhaustive = false;
};

SiteOptions value_options(const std::vector<Var>& visible, const Prime& p) {
    SiteOptions s;
    if (p.value() == 2 && visible.size() <= 3) {
        s.exhaustive = true;
        std::uint64_t rows = 1ull << visible.size();
        std::uint64_t nfun = 1ull << rows;
        for (std::uint64_t f = 0; f < nfun; ++f) {
            s.options.push_back([visible, f](const Memory& vis, std::uint64_t) -> std::uint64_t {
                std::uint64_t j = 0;
                for (std::size_t k = 0; k < visible.size(); ++k) {
                    auto it = vis.find(visible[k]);
                    if (it != vis.end() && it->second && *it->second) j |= 1ull << k;
                }
                return (f >> j) & 1;
            });
            s.labels.push_back("fn" + std::to_string(f));
        }
        return s;
    }
    s.options.push_back([](const Memory&, std::uint64_t h) { return h; });
    s.labels.push_back("honest");
    std::vector<std::uint64_t> cs;
    if (p.value() <= 7) {
        for (std::uint64_t c = 0; c < p.value(); ++c) cs.push_back(c);
    } else {
        cs = {0, 1, p.value() - 1};
    }
    for (std::uint64_t c : cs) {
        s.options.push_back([c](const Memory&, std::uint64_t) { return c; });
        s.labels.push_back("const" + std::to_string(c));
    }
    for (std::uint64_t c : cs) {
        if (c == 0) continue;
        s.options.push_back([c, p](const Memory&, std::uint64_t h) { return p.add(h, c); });
        s.labels.push_back("offset" + std::to_string(c));
    }
    return s;
}

SiteOptions choice_options() {
    SiteOptions s;
    s.exhaustive = true;
    s.options = {[](const Memory&, std::uint64_t h) { return h; }, [](const Memory&, std::uint64_t) { return 0ull; },
                 [](const Memory&, std::uint64_t) { return 1ull; },
                 [](const Memory&, std::uint64_t h) -> std::uint64_t { return h == 0 ? 1 : 0; }};
    s.labels = {"honest", "const0", "const1", "flip"};
    return s;
}

}  // namespace

StrategyFamily strategy_family(const Protocol& pi0, const Constraint& pre, const std::set<ClientId>& C,
                               std::uint64_t max_strategies) {
    Protocol pi = with_federation(pi0, pre);
    std::set<ClientId> H;
    for (ClientId c : pi.federation)
        if (!C.count(c)) H.insert(c);
    Views views = views_split(pi, H, C);

    std::set<Var> visible;
    for (const Var& v : initial_vars(pi, pre))
        if (visible_to(v, C)) visible.insert(v);

    struct Slot {
        bool is_choice;
        std::size_t cmd;
        int slot;
        SiteOptions opts;
    };
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < pi.cmds.size(); ++i) {
        const Cmd& c = pi.cmds[i];
        if (!C.count(c.client)) {
            int counter = 0;
            auto scan = [&](const Expr& e) {
                walk_choices(e, c.client, counter, [&](int s, ClientId at, ClientId recv) {
                    if (!C.count(at) && C.count(recv)) slots.push_back({true, i, s, choice_options()});
                });
            };
            scan(c.body);
            if (c.rhs) scan(c.rhs);
        } else if (c.kind == Cmd::Kind::Assign && views.c_to_h.count(c.target)) {
            std::vector<Var> vis(visible.begin(), visible.end());
            slots.push_back({false, i, 0, value_options(vis, pi.prime)});
        }
        if (c.kind == Cmd::Kind::Assign && visible_to(c.target, C)) visible.insert(c.target);
    }

    StrategyFamily fam;
    std::uint64_t total = 1;
    for (const auto& s : slots) {
        if (!s.opts.exhaustive) fam.bounded = true;
        if (total > max_strategies / s.opts.options.size())
            fail(ErrorKind::Infeasible, "adversary family exceeds " + std::to_string(max_strategies) + " strategies");
        total *= s.opts.options.size();
    }
    std::vector<std::size_t> digit(slots.size(), 0);
    for (std::uint64_t n = 0; n < total; ++n) {
        AdversaryStrategy A;
        A.label.clear();
        for (std::size_t k = 0; k < slots.size(); ++k) {
            const Slot& s = slots[k];
            if (s.is_choice)
                A.choices[{s.cmd, s.slot}] = s.opts.options[digit[k]];
            else
                A.sites[s.cmd] = s.opts.options[digit[k]];
            if (!A.label.empty()) A.label += ",";
            A.label += "cmd" + std::to_string(s.cmd + 1) + (s.is_choice ? ".choice" + std::to_string(s.slot) : "") +
                       "=" + s.opts.labels[digit[k]];
        }
        if (A.label.empty()) A.label = "honest";
        fam.strategies.push_back(std::move(A));
        for (std::size_t k = 0; k < slots.size(); ++k) {
            if (++digit[k] < slots[k].opts.options.size()) break;
            digit[k] = 0;
        }
    }
    return fam;
}

std::vector<AdvRun> enumerate_runs_adv(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& C,
                                       const AdversaryStrategy& A, std::uint64_t budget) {
    check_preprocessing(pi, pre);
    std::set<Var> padded = assigned_vars(pi);
    std::vector<AdvRun> out;
    for (const Memory& m0 : initial_memories(pi, pre, budget)) {
        AdvRun r;
        try {
            r = run_adversarial(m0, pi, C, A);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Stuck) throw;
            continue;
        }
        if (r.aborted)
            for (const Var& v : padded) r.mem.emplace(v, std::nullopt);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace mpcv
