#include "mpcv/int_types.hpp"

#include <sstream>

#include "mpcv/error.hpp"
#include "mpcv/pmf.hpp"

namespace mpcv {

namespace {

bool is_mesg(const Expr& e, ClientId at) {
    return e->op == Op::Var && e->var.kind == VarKind::Mesg && e->var.owner == at;
}

bool ends_with(const std::string& s, char c) { return !s.empty() && s.back() == c; }

std::optional<MacCheck> match_sides(const Expr& mac, const Expr& sum, ClientId at) {
    if (!is_mesg(mac, at) || !ends_with(mac->var.name, 'm') || sum->op != Op::Add) return std::nullopt;
    for (int order = 0; order < 2; ++order) {
        const Expr& k = sum->kids[order];
        const Expr& prod = sum->kids[1 - order];
        if (!is_mesg(k, at) || !ends_with(k->var.name, 'k') || prod->op != Op::Mul) continue;
        for (int o2 = 0; o2 < 2; ++o2) {
            const Expr& d = prod->kids[o2];
            const Expr& s = prod->kids[1 - o2];
            if (!is_mesg(d, at) || d->var.name != "delta" || !is_mesg(s, at)) continue;
            std::string w = mac->var.name.substr(0, mac->var.name.size() - 1);
            if (s->var.name != w + "s") continue;
            MacCheck m;
            m.at = at;
            m.mac = mac->var;
            m.key = k->var;
            m.delta = d->var;
            m.share = s->var;
            return m;
        }
    }
    return std::nullopt;
}

std::set<Var> views_in(const Expr& e) {
    std::set<Var> out;
    for (const Var& v : vars_of(e))
        if (v.kind == VarKind::Mesg || v.kind == VarKind::Reveal) out.insert(v);
    return out;
}

}  // namespace

std::optional<MacCheck> match_bdoz(const Cmd& c) {
    if (c.kind != Cmd::Kind::Assert) return std::nullopt;
    if (auto m = match_sides(c.body, c.rhs, c.client)) return m;
    return match_sides(c.rhs, c.body, c.client);
}

IntTyping type_protocol_integrity(const Protocol& pi, const Constraint& pre, Solver* solver, bool discharge) {
    if (discharge && !solver) fail(ErrorKind::Structural, "MAC side conditions need a solver");
    IntTyping t;
    t.constraint = toeq(pi);
    for (std::size_t i = 0; i < pi.cmds.size(); ++i) {
        const Cmd& c = pi.cmds[i];
        if (c.kind == Cmd::Kind::Assign) {
            t.delta.push_back({c.target, c.client, views_in(c.body), false, {}, {}});
            continue;
        }
        auto m = match_bdoz(c);
        if (!m) continue;
        m->cmd = i;
        bool ok = true;
        if (discharge) {
            Constraint goal = cn::eq(ex::var(m->mac), ex::add(ex::var(m->key), ex::mul(ex::var(m->delta), ex::var(m->share))));
            EntailResult r = solver->entails(cn::conj(pre, toeq_without(pi, i)), goal);
            m->side = r.verdict;
            ok = r.verdict == Verdict::True;
        } else {
            m->side = Verdict::True;
        }
        t.macs.push_back(*m);
        if (!ok) continue;
        // The share and its MAC are validated together.
        for (const Var& x : {m->share, m->mac}) t.delta.push_back({x, c.client, {}, true, m->key, m->delta});
    }
    return t;
}

Label Labeling::of(const Var& v, const std::set<ClientId>& H) const {
    auto it = label.find(v);
    if (it != label.end()) return it->second;
    return H.count(v.owner) ? Label::High : Label::Low;
}

Labeling assign_labels(const Delta& delta, const std::set<ClientId>& H, const std::set<ClientId>& C) {
    Labeling L;
    for (const IntEntry& e : delta) {
        if (e.upgrade) {
            if (H.count(e.origin) && L.of(e.key, H) == Label::High && L.of(e.delta, H) == Label::High) {
                L.label[e.x] = Label::High;
                L.blame.erase(e.x);
            }
            continue;
        }
        Label l = C.count(e.origin) ? Label::Low : Label::High;
        L.blame.erase(e.x);
        if (l == Label::High) {
            for (const Var& v : e.deps) {
                if (L.of(v, H) == Label::Low) {
                    l = Label::Low;
                    L.blame[e.x] = v;
                    break;
                }
            }
        }
        L.label[e.x] = l;
    }
    return L;
}

IntVerdict check_int_partition(const IntTyping& t, const Protocol& pi, const std::set<ClientId>& H,
                               const std::set<ClientId>& C) {
    IntVerdict v;
    v.H = H;
    v.C = C;
    Labeling L = assign_labels(t.delta, H, C);
    std::set<Var> targets = views_split(pi, H, C).h_to_c;
    for (const Var& o : assigned_vars(pi))
        if (o.kind == VarKind::Out && H.count(o.owner)) targets.insert(o);
    for (const Var& x : targets) {
        if (L.of(x, H) == Label::High) continue;
        v.pass = false;
        v.first_low = x;
        Var cur = x;
        v.chain.push_back(cur);
        for (auto it = L.blame.find(cur); it != L.blame.end() && v.chain.size() <= L.label.size();
             it = L.blame.find(cur)) {
            cur = it->second;
            v.chain.push_back(cur);
        }
        break;
    }
    return v;
}

std::vector<IntVerdict> check_int_all(const IntTyping& t, const Protocol& pi, const Constraint& pre) {
    Protocol fp = with_federation(pi, pre);
    std::vector<IntVerdict> out;
    for (const auto& [H, C] : partitions(fp.federation)) out.push_back(check_int_partition(t, fp, H, C));
    return out;
}

std::string print_delta(const Delta& d) {
    std::ostringstream os;
    for (const IntEntry& e : d) {
        os << to_string(e.x) << " : ";
        if (e.upgrade) {
            os << "checked@" << e.origin << " by " << to_string(e.key) << ", " << to_string(e.delta);
        } else {
            os << "(" << e.origin << ", {";
            bool first = true;
            for (const Var& v : e.deps) {
                os << (first ? "" : ", ") << to_string(v);
                first = false;
            }
            os << "})";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace mpcv
