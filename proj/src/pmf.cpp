#include "mpcv/pmf.hpp"

#include <algorithm>

#include "mpcv/error.hpp"

namespace mpcv {

namespace {

using Key = std::vector<MemValue>;
using u128 = unsigned __int128;

std::vector<std::size_t> positions(const Pmf& P, const std::set<Var>& X) {
    std::vector<std::size_t> pos;
    for (const Var& v : X) {
        auto it = std::lower_bound(P.domain.begin(), P.domain.end(), v);
        if (it == P.domain.end() || !(*it == v))
            fail(ErrorKind::Structural, to_string(v) + " is not in the distribution's domain");
        pos.push_back(static_cast<std::size_t>(it - P.domain.begin()));
    }
    return pos;
}

Key project(const Key& k, const std::vector<std::size_t>& pos) {
    Key r;
    r.reserve(pos.size());
    for (std::size_t i : pos) r.push_back(k[i]);
    return r;
}

Memory as_memory(const std::set<Var>& X, const Key& k) {
    Memory m;
    std::size_t i = 0;
    for (const Var& v : X) m[v] = k[i++];
    return m;
}

// A realization of X1 u X2 u X3 violating X1 _||_ X2 | X3, if any.
std::optional<Memory> separation_witness(const Pmf& P, const std::set<Var>& X1, const std::set<Var>& X2,
                                         const std::set<Var>& X3) {
    for (const Var& v : X1)
        if (X2.count(v)) fail(ErrorKind::Structural, "separation query over overlapping sets");
    auto p1 = positions(P, X1), p2 = positions(P, X2), p3 = positions(P, X3);
    struct Group {
        std::uint64_t n = 0;
        std::map<Key, std::uint64_t> a, b;
        std::map<std::pair<Key, Key>, std::uint64_t> ab;
    };
    std::map<Key, Group> groups;
    for (const auto& [k, c] : P.counts) {
        Group& g = groups[project(k, p3)];
        Key k1 = project(k, p1), k2 = project(k, p2);
        g.n += c;
        g.a[k1] += c;
        g.b[k2] += c;
        g.ab[{k1, k2}] += c;
    }
    for (const auto& [k3, g] : groups) {
        for (const auto& [k1, c1] : g.a) {
            for (const auto& [k2, c2] : g.b) {
                auto it = g.ab.find({k1, k2});
                std::uint64_t c12 = it == g.ab.end() ? 0 : it->second;
                if (static_cast<u128>(c12) * g.n != static_cast<u128>(c1) * c2) {
                    Memory w = as_memory(X1, k1);
                    for (auto& kv : as_memory(X2, k2)) w.insert(kv);
                    for (auto& kv : as_memory(X3, k3)) w.insert(kv);
                    return w;
                }
            }
        }
    }
    return std::nullopt;
}

std::set<Var> domain_set(const Pmf& P) { return {P.domain.begin(), P.domain.end()}; }

std::set<Var> select(const std::set<Var>& xs, VarKind k, const std::set<ClientId>& owners) {
    std::set<Var> r;
    for (const Var& v : xs)
        if (v.kind == k && owners.count(v.owner)) r.insert(v);
    return r;
}

}  // namespace

Rational Pmf::weight(const Memory& m) const {
    Key k;
    for (const Var& v : domain) {
        auto it = m.find(v);
        if (it == m.end()) fail(ErrorKind::Structural, "realization misses " + to_string(v));
        k.push_back(it->second);
    }
    auto it = counts.find(k);
    if (it == counts.end() || total == 0) return Rational(0);
    return Rational(static_cast<std::int64_t>(it->second), static_cast<std::int64_t>(total));
}

Memory Pmf::realization(const Key& key) const { return as_memory(domain_set(*this), key); }

Pmf pmf_from_runs(const std::vector<Memory>& runs, const std::set<Var>& domain) {
    Pmf P;
    P.domain.assign(domain.begin(), domain.end());
    for (const Memory& m : runs) {
        Key k;
        for (const Var& v : P.domain) {
            auto it = m.find(v);
            k.push_back(it == m.end() ? MemValue{} : it->second);
        }
        ++P.counts[k];
        ++P.total;
    }
    return P;
}

Pmf basic_distribution(const Protocol& pi, const Constraint& pre, std::uint64_t budget) {
    auto runs = enumerate_runs(pi, pre, budget);
    std::set<Var> dom = initial_vars(pi, pre);
    for (const Var& v : assigned_vars(pi)) dom.insert(v);
    return pmf_from_runs(runs, dom);
}

Pmf basic_distribution_adv(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& C,
                           const AdversaryStrategy& A, std::uint64_t budget) {
    std::vector<Memory> mems;
    for (auto& r : enumerate_runs_adv(pi, pre, C, A, budget)) mems.push_back(std::move(r.mem));
    std::set<Var> dom = initial_vars(pi, pre);
    for (const Var& v : assigned_vars(pi)) dom.insert(v);
    return pmf_from_runs(mems, dom);
}

Pmf marginal(const Pmf& P, const std::set<Var>& X) {
    auto pos = positions(P, X);
    Pmf M;
    M.domain.assign(X.begin(), X.end());
    M.total = P.total;
    for (const auto& [k, c] : P.counts) M.counts[project(k, pos)] += c;
    return M;
}

Rational conditional(const Pmf& P, const Memory& x1, const Memory& x2) {
    std::set<Var> X1, X2;
    for (const auto& kv : x1) X1.insert(kv.first);
    for (const auto& kv : x2) {
        if (X1.count(kv.first)) fail(ErrorKind::Structural, "conditional over overlapping sets");
        X2.insert(kv.first);
    }
    auto p1 = positions(P, X1), p2 = positions(P, X2);
    Key k1, k2;
    for (const auto& kv : x1) k1.push_back(kv.second);
    for (const auto& kv : x2) k2.push_back(kv.second);
    std::uint64_t joint = 0, cond = 0;
    for (const auto& [k, c] : P.counts) {
        if (project(k, p2) != k2) continue;
        cond += c;
        if (project(k, p1) == k1) joint += c;
    }
    if (cond == 0) return Rational(0);
    return Rational(static_cast<std::int64_t>(joint), static_cast<std::int64_t>(cond));
}

bool separated(const Pmf& P, const std::set<Var>& X1, const std::set<Var>& X2, const std::set<Var>& given) {
    return !separation_witness(P, X1, X2, given);
}

std::vector<std::pair<std::set<ClientId>, std::set<ClientId>>> partitions(const std::set<ClientId>& fed) {
    std::vector<ClientId> ids(fed.begin(), fed.end());
    std::vector<std::pair<std::set<ClientId>, std::set<ClientId>>> out;
    for (std::uint64_t mask = 0; mask < (1ull << ids.size()); ++mask) {
        std::set<ClientId> H, C;
        for (std::size_t i = 0; i < ids.size(); ++i) ((mask >> i) & 1 ? C : H).insert(ids[i]);
        out.emplace_back(std::move(H), std::move(C));
    }
    return out;
}

OracleReport check_gradual_release(const Protocol& pi0, const Constraint& pre, const std::set<ClientId>& H,
                                   const std::set<ClientId>& C, std::uint64_t budget) {
    Protocol pi = with_federation(pi0, pre);
    check_partition(pi.federation, H, C);
    OracleReport rep;
    rep.property = "gradual-release";
    rep.H = H;
    rep.C = C;
    Pmf bd = basic_distribution(pi, pre, budget);
    rep.runs = bd.total;
    std::set<Var> dom = domain_set(bd);
    std::set<Var> MC = select(dom, VarKind::Mesg, C), SH = select(dom, VarKind::Secret, H);
    if (auto w = separation_witness(bd, MC, SH, {})) {
        rep.pass = false;
        rep.witness = w;
        rep.note = "corrupt messages depend on honest secrets";
    }
    return rep;
}

OracleReport check_nimo(const Protocol& pi0, const Constraint& pre, const std::set<ClientId>& H,
                        const std::set<ClientId>& C, std::uint64_t budget) {
    Protocol pi = with_federation(pi0, pre);
    check_partition(pi.federation, H, C);
    OracleReport rep;
    rep.property = "nimo";
    rep.H = H;
    rep.C = C;
    Pmf bd = basic_distribution(pi, pre, budget);
    rep.runs = bd.total;
    std::set<Var> dom = domain_set(bd);
    std::set<Var> SH = select(dom, VarKind::Secret, H);
    std::set<Var> given = select(dom, VarKind::Secret, C);
    for (const Var& v : dom)
        if (v.kind == VarKind::Out) given.insert(v);
    Views views = views_split(pi, H, C);
    // Only realizations with positive mass are compared (see README).
    if (auto w = separation_witness(bd, SH, views.h_to_c, given)) {
        rep.pass = false;
        rep.witness = w;
        rep.note = "corrupt views refine what inputs and outputs reveal about honest secrets";
    }
    return rep;
}

namespace {

std::set<Var> honest_initial(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& H) {
    std::set<Var> hv;
    for (const Var& x : initial_vars(pi, pre))
        if (H.count(x.owner)) hv.insert(x);
    return hv;
}

std::set<Var> integrity_targets(const Protocol& pi, const std::set<ClientId>& H, const Views& v) {
    std::set<Var> x = v.h_to_c;
    for (const Var& o : assigned_vars(pi))
        if (o.kind == VarKind::Out && H.count(o.owner)) x.insert(o);
    return x;
}

}  // namespace

OracleReport check_integrity(const Protocol& pi0, const Constraint& pre, const std::set<ClientId>& H,
                             const std::set<ClientId>& C, std::uint64_t budget, std::uint64_t max_strategies,
                             IntegrityReading reading) {
    Protocol pi = with_federation(pi0, pre);
    check_partition(pi.federation, H, C);
    OracleReport rep;
    rep.property = reading == IntegrityReading::Views ? "integrity" : "integrity-outputs";
    rep.H = H;
    rep.C = C;
    if (C.empty()) return rep;
    Views views = views_split(pi, H, C);
    std::set<Var> keyset = honest_initial(pi, pre, H);
    if (reading == IntegrityReading::Views) keyset.insert(views.c_to_h.begin(), views.c_to_h.end());
    for (const Var& x : integrity_targets(pi, H, views)) keyset.insert(x);

    std::set<Memory> passive;
    for (const Memory& m : enumerate_runs(pi, pre, budget)) passive.insert(restrict_to(m, keyset));

    StrategyFamily fam = strategy_family(pi, pre, C, max_strategies);
    rep.bounded_adversary = fam.bounded;
    rep.strategies = fam.strategies.size();
    for (const auto& A : fam.strategies) {
        for (const AdvRun& r : enumerate_runs_adv(pi, pre, C, A, budget)) {
            ++rep.runs;
            if (r.aborted) continue;
            Memory key = restrict_to(r.mem, keyset);
            if (!passive.count(key)) {
                rep.pass = false;
                rep.witness = key;
                rep.note = "strategy " + A.label + " reaches honest-observable values no passive run produces";
                return rep;
            }
        }
    }
    return rep;
}

InterferenceCase classify_interference(const Pmf& bd, const Var& x, const std::set<Var>& M,
                                       const std::set<Var>& pool, std::size_t max_size) {
    InterferenceCase res;
    res.direct = !separated(bd, {x}, M);
    bool x_sep = !res.direct;
    std::vector<Var> cand;
    for (const Var& v : pool)
        if (!(v == x) && !M.count(v)) cand.push_back(v);
    std::size_t n = cand.size();
    for (std::size_t size = 1; size <= std::min(max_size, n) && !res.encoding; ++size) {
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::set<Var> X;
            for (std::size_t i = 0; i < n; ++i)
                if (pick[i]) X.insert(cand[i]);
            std::set<Var> xX = X;
            xX.insert(x);
            if (x_sep && separated(bd, X, M) && !separated(bd, xX, M)) {
                res.encoding = true;
                res.encoded = X;
                break;
            }
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    res.neither = !res.direct && !res.encoding;
    res.kind = res.direct ? Interference::Direct : res.encoding ? Interference::Encoding : Interference::Separated;
    return res;
}

std::set<Var> find_aberrations(const Protocol& pi0, const Constraint& pre, const std::set<ClientId>& H,
                               const std::set<ClientId>& C, std::uint64_t budget, std::uint64_t max_strategies) {
    Protocol pi = with_federation(pi0, pre);
    check_partition(pi.federation, H, C);
    std::set<Var> SH;
    for (const Var& v : initial_vars(pi, pre))
        if (v.kind == VarKind::Secret && H.count(v.owner)) SH.insert(v);
    std::set<Var> targets = assigned_vars(pi);

    std::map<Var, std::set<std::pair<Memory, MemValue>>> passive;
    for (const Memory& m : enumerate_runs(pi, pre, budget)) {
        Memory s = restrict_to(m, SH);
        for (const Var& x : targets) passive[x].insert({s, m.at(x)});
    }
    std::set<Var> found;
    StrategyFamily fam = strategy_family(pi, pre, C, max_strategies);
    for (const auto& A : fam.strategies) {
        for (const AdvRun& r : enumerate_runs_adv(pi, pre, C, A, budget)) {
            Memory s = restrict_to(r.mem, SH);
            for (const Var& x : targets) {
                auto it = r.mem.find(x);
                if (it == r.mem.end() || !it->second) continue;
                if (!passive[x].count({s, it->second})) found.insert(x);
            }
        }
    }
    return found;
}

}  // namespace mpcv
