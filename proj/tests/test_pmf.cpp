#include <doctest.h>

#include "mpcv/parse.hpp"
#include "mpcv/pmf.hpp"
#include "mpcv/prelude_types.hpp"
#include "support.hpp"

using namespace mpcv;

namespace {

Protocol ovt(const std::string& src, std::uint64_t p = 2) { return parse_overture(src, Prime(p)).pi; }

using Key = std::vector<MemValue>;

Key project(const Memory& m, const std::set<Var>& X) {
    Key k;
    for (const Var& v : X) k.push_back(m.at(v));
    return k;
}

// X1 _|_ X2 | X3 straight from run multiplicities:
// #(x1 x2 x3) * #(x3) == #(x1 x3) * #(x2 x3) for every combination in the support.
bool ref_separated(const std::vector<Memory>& runs, const std::set<Var>& X1, const std::set<Var>& X2,
                   const std::set<Var>& X3 = {}) {
    std::map<std::tuple<Key, Key, Key>, std::uint64_t> j;
    std::map<std::pair<Key, Key>, std::uint64_t> a, b;
    std::map<Key, std::uint64_t> c;
    for (const Memory& m : runs) {
        Key k1 = project(m, X1), k2 = project(m, X2), k3 = project(m, X3);
        ++j[{k1, k2, k3}];
        ++a[{k1, k3}];
        ++b[{k2, k3}];
        ++c[k3];
    }
    for (const auto& [ka, na] : a)
        for (const auto& [kb, nb] : b) {
            if (ka.second != kb.second) continue;
            auto it = j.find({ka.first, kb.first, ka.second});
            std::uint64_t nj = it == j.end() ? 0 : it->second;
            if (nj * c[ka.second] != na * nb) return false;
        }
    return true;
}

struct Case {
    std::string file, pre;
};

const std::vector<Case> kCorpus = {
    {"add3.ovt", ""},
    {"leaky.ovt", ""},
    {"gmw_circuit.pre", ""},
    {"ygc_encode.pre", ""},
    {"bdoz_sum_open.pre", "bdoz.eq"},
    {"bdoz_sum_open_noassert.pre", "bdoz.eq"},
    {"sum_chain.pre", "bdoz.eq"},
};

struct Loaded {
    Protocol pi;
    Hints hints;
    Constraint pre;
};

Loaded load(const Case& c) {
    Loaded l;
    l.pre = c.pre.empty() ? cn::truth() : parse_constraint(read_file(ref::corpus(c.pre)));
    std::string src = read_file(ref::corpus(c.file));
    if (c.file.size() > 4 && c.file.substr(c.file.size() - 4) == ".ovt") {
        OvtProgram o = parse_overture(src, Prime(2));
        l.pi = o.pi;
        l.hints = o.hints;
    } else {
        Expansion e = expand(parse_source(src), Prime(2));
        l.pi = e.pi;
        for (const auto& h : e.emitted.hints) l.hints[h.target] = h.term;
    }
    l.pi = with_federation(l.pi, l.pre);
    return l;
}

}  // namespace

TEST_CASE("basic distribution") {
    Pmf P = basic_distribution(ovt("m[w]@1 := (s[w] - r[w])@2"), cn::truth(), 1000);
    CHECK(P.counts.size() == 4);
    for (const auto& [k, n] : P.counts) CHECK(P.weight(P.realization(k)) == Rational(1, 4));

    Pmf point = basic_distribution(make_protocol({}, Prime(2), {1}), parse_constraint("m[a]@1 == 0"), 1000);
    REQUIRE(point.counts.size() == 1);
    CHECK(point.weight(point.realization(point.counts.begin()->first)) == Rational(1));

    Pmf add = basic_distribution(ovt(read_file(ref::corpus("add3.ovt"))), cn::truth(), 1000);
    CHECK(add.counts.size() == 512);
    CHECK(add.total == 512);
}

TEST_CASE("pmfs sum to one and marginalisation composes") {
    ref::Gen g(17);
    for (int i = 0; i < 60; ++i) {
        Protocol pi = g.protocol(i % 2 ? 3 : 2, 6);
        Pmf P = basic_distribution(pi, cn::truth(), 1u << 14);
        Rational sum(0);
        for (const auto& [k, n] : P.counts) sum += P.weight(P.realization(k));
        CHECK(sum == Rational(1));
        std::set<Var> X2, X1;
        for (const Var& v : P.domain)
            if (g.pick(3)) X2.insert(v);
        for (const Var& v : X2)
            if (g.pick(2)) X1.insert(v);
        Pmf a = marginal(marginal(P, X2), X1), b = marginal(P, X1);
        CHECK(a.domain == b.domain);
        CHECK(a.counts == b.counts);
        Rational msum(0);
        for (const auto& [k, n] : b.counts) msum += b.weight(b.realization(k));
        CHECK(msum == Rational(1));
    }
}

TEST_CASE("marginal and conditional examples") {
    Constraint pre = parse_constraint("m[x]@1 == r[x]@1 /\\ m[y]@1 == r[y]@1");
    Pmf P = basic_distribution(make_protocol({}, Prime(2), {1}), pre, 1000);
    Pmf mx = marginal(P, {mesg("x", 1)});
    CHECK(mx.counts.size() == 2);
    for (const auto& [k, n] : mx.counts) CHECK(mx.weight(mx.realization(k)) == Rational(1, 2));

    Protocol pad = ovt("m[m]@2 := (s[s] - r[r])@1");
    Pmf Q = basic_distribution(pad, cn::truth(), 1000);
    Memory m0 = parse_memory("m[m]@2 == 0", Prime(2)), s0 = parse_memory("s[s]@1 == 0", Prime(2));
    CHECK(conditional(Q, m0, s0) == Rational(1, 2));
    CHECK(separated(Q, {mesg("m", 2)}, {secret("s", 1)}));

    Protocol leak = ovt("p[w] := s[x]@1");
    Pmf L = basic_distribution(leak, cn::truth(), 1000);
    CHECK_FALSE(separated(L, {reveal("w")}, {secret("x", 1)}));
    // zero-mass conditioning gives 0
    Memory bad = parse_memory("p[w] == 1", Prime(2));
    CHECK(conditional(L, bad, parse_memory("s[x]@1 == 0", Prime(2))) == Rational(0));
}

TEST_CASE("separation agrees with direct counting") {
    ref::Gen g(23);
    for (int i = 0; i < 80; ++i) {
        Protocol pi = g.protocol(2, 6);
        auto runs = enumerate_runs(pi, cn::truth(), 1u << 14);
        Pmf P = pmf_from_runs(runs, protocol_vars(pi));
        std::vector<Var> vs(P.domain.begin(), P.domain.end());
        for (int t = 0; t < 5; ++t) {
            std::set<Var> X1{vs[g.pick(vs.size())]}, X2{vs[g.pick(vs.size())]}, X3;
            if (g.pick(2)) X3.insert(vs[g.pick(vs.size())]);
            bool overlap = false;
            for (const Var& v : X1) overlap |= X2.count(v) || X3.count(v);
            for (const Var& v : X2) overlap |= X3.count(v);
            if (overlap) continue;
            CHECK(separated(P, X1, X2, X3) == ref_separated(runs, X1, X2, X3));
        }
    }
}

TEST_CASE("gradual release examples") {
    Protocol share = ovt("m[w]@2 := (s[w] - r[w])@1");
    CHECK(check_gradual_release(share, cn::truth(), {1}, {2}).pass);
    OracleReport leak = check_gradual_release(ovt("m[w]@2 := (s[w])@1"), cn::truth(), {1}, {2});
    CHECK_FALSE(leak.pass);
    CHECK(leak.witness.has_value());
    CHECK(check_gradual_release(share, cn::truth(), {1, 2}, {}).pass);
}

TEST_CASE("nimo examples") {
    Protocol add = ovt(read_file(ref::corpus("add3.ovt")));
    for (const auto& [H, C] : partitions({1, 2, 3})) CHECK(check_nimo(add, cn::truth(), H, C).pass);
    CHECK_FALSE(check_nimo(ovt("m[w]@2 := (s[w])@1"), cn::truth(), {1}, {2}).pass);
    CHECK(check_nimo(ovt("m[w]@2 := (r[w])@1"), cn::truth(), {1}, {2}).pass);
}

TEST_CASE("integrity examples") {
    Constraint pre = parse_constraint(read_file(ref::corpus("bdoz.eq")));
    Protocol with = expand(parse_source(read_file(ref::corpus("bdoz_sum_open.pre"))), Prime(2)).pi;
    Protocol without = expand(parse_source(read_file(ref::corpus("bdoz_sum_open_noassert.pre"))), Prime(2)).pi;
    for (ClientId c : {1, 2}) {
        std::set<ClientId> H{c == 1 ? ClientId(2) : ClientId(1)}, C{c};
        CHECK(check_integrity(with, pre, H, C).pass);
        OracleReport r = check_integrity(without, pre, H, C);
        CHECK_FALSE(r.pass);
        CHECK(r.witness.has_value());
    }
    CHECK(check_integrity(with, pre, {1, 2}, {}).pass);
    CHECK(check_integrity(without, pre, {1, 2}, {}).pass);
    // a forged share always equals the honest value under some other tape, so
    // neither variant has aberrations even though one lacks integrity
    CHECK(find_aberrations(with, pre, {1}, {2}).empty());
    CHECK(find_aberrations(without, pre, {1}, {2}).empty());
}

TEST_CASE("aberrations") {
    Protocol pi = ovt("m[a]@1 := (r[x] * 0 + 1)@2; out@1 := (m[a] + s[z])@1");
    std::set<Var> ab = find_aberrations(pi, cn::truth(), {1}, {2});
    CHECK(ab == std::set<Var>{mesg("a", 1), out(1)});
    CHECK(find_aberrations(pi, cn::truth(), {1, 2}, {}).empty());
}

TEST_CASE("interference trichotomy") {
    for (const char* f : {"add3.ovt", "leaky.ovt"}) {
        Protocol pi = ovt(read_file(ref::corpus(f)));
        auto runs = enumerate_runs(pi, cn::truth(), 1u << 12);
        Pmf bd = pmf_from_runs(runs, protocol_vars(pi));
        RoleSets rs = role_sets(pi);
        std::set<Var> pool = rs.S;
        pool.insert(rs.R.begin(), rs.R.end());
        std::vector<Var> M(rs.M.begin(), rs.M.end());
        std::size_t kinds[3] = {0, 0, 0};
        for (const Var& x : pool) {
            // M' ranges over all subsets of M
            for (std::size_t mask = 1; mask < (1u << M.size()); mask += (M.size() > 4 ? 7 : 1)) {
                std::set<Var> Mp;
                for (std::size_t i = 0; i < M.size(); ++i)
                    if (mask >> i & 1) Mp.insert(M[i]);
                InterferenceCase ic = classify_interference(bd, x, Mp, pool, 2);
                CHECK(int(ic.direct) + int(ic.encoding) + int(ic.neither) == 1);
                CHECK(ic.direct == !ref_separated(runs, {x}, Mp));
                if (ic.encoding) {
                    std::set<Var> xX = ic.encoded;
                    xX.insert(x);
                    CHECK(ref_separated(runs, ic.encoded, Mp));
                    CHECK_FALSE(ref_separated(runs, xX, Mp));
                }
                ++kinds[static_cast<int>(ic.kind)];
            }
        }
        if (std::string(f) == "add3.ovt") {
            CHECK(kinds[1] > 0);
            CHECK(kinds[2] > 0);
        } else {
            CHECK(kinds[0] > 0);
        }
    }
}

TEST_CASE("typing acceptance implies the hyperproperties") {
    // conf typing => gradual release, int typing => integrity, on every
    // partition of every corpus program that enumerates
    int conf_accepts = 0, int_accepts = 0;
    for (const Case& c : kCorpus) {
        Loaded l = load(c);
        Solver s(Prime(2));
        ConfTyping ct = type_protocol_conf(l.pi, l.pre, l.hints, &s);
        IntTyping it = type_protocol_integrity(l.pi, l.pre, &s);
        bool small_adv = c.file.rfind("gmw", 0) != 0;
        for (const auto& [H, C] : partitions(l.pi.federation)) {
            ConfVerdict cv = check_conf_partition(ct, l.pi, l.pre, H, C);
            if (cv.pass) {
                ++conf_accepts;
                CHECK_MESSAGE(check_gradual_release(l.pi, l.pre, H, C).pass, c.file);
            }
            IntVerdict iv = check_int_partition(it, l.pi, H, C);
            if (iv.pass && small_adv) {
                ++int_accepts;
                CHECK_MESSAGE(check_integrity(l.pi, l.pre, H, C).pass, c.file);
            }
        }
    }
    CHECK(conf_accepts >= 15);
    CHECK(int_accepts >= 10);
}
