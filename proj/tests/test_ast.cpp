#include <doctest.h>

#include "mpcv/error.hpp"
#include "mpcv/parse.hpp"
#include "support.hpp"

using namespace mpcv;

namespace {

Protocol ovt(const std::string& src, std::uint64_t p = 2) { return parse_overture(src, Prime(p)).pi; }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Syntax;
}

// Views computed directly from the command list.
Views views_by_definition(const Protocol& pi, const std::set<ClientId>& H, const std::set<ClientId>& C) {
    Views v;
    for (const Cmd& c : pi.cmds) {
        if (c.kind != Cmd::Kind::Assign) continue;
        const Var& x = c.target;
        if (x.kind == VarKind::Mesg) {
            if (H.count(c.client) && C.count(x.owner)) v.h_to_c.insert(x);
            if (C.count(c.client) && H.count(x.owner)) v.c_to_h.insert(x);
        }
        if (x.kind == VarKind::Reveal) {
            if (H.count(c.client)) v.h_to_c.insert(x);
            if (C.count(c.client)) v.c_to_h.insert(x);
        }
    }
    return v;
}

}  // namespace

TEST_CASE("parse: additive sharing lines") {
    Protocol pi = ovt(read_file(ref::corpus("add3.ovt")));
    REQUIRE(pi.cmds.size() == 12);
    const Cmd& c0 = pi.cmds[0];
    CHECK(c0.kind == Cmd::Kind::Assign);
    CHECK(c0.target == mesg("s1", 2));
    CHECK(c0.client == 1);
    Expr want = ex::sub(ex::sub(ex::var(secret("1", 1)), ex::var(flip("local", 1))), ex::var(flip("x", 1)));
    CHECK(equal(c0.body, want));

    const Cmd& last = pi.cmds[9];
    CHECK(last.target == out(1));
    CHECK(last.client == 1);
    CHECK(equal(last.body, ex::add(ex::add(ex::var(reveal("1")), ex::var(reveal("2"))), ex::var(reveal("3")))));
    CHECK(pi.federation == std::set<ClientId>{1, 2, 3});
}

TEST_CASE("parse: assert command") {
    Protocol pi = ovt("assert(m[xm] = m[xk] + (m[delta] * m[xs]))@1");
    REQUIRE(pi.cmds.size() == 1);
    const Cmd& c = pi.cmds[0];
    CHECK(c.kind == Cmd::Kind::Assert);
    CHECK(c.client == 1);
    CHECK(equal(c.body, ex::var(mesg("xm", 1))));
    CHECK(equal(c.rhs, ex::add(ex::var(mesg("xk", 1)), ex::mul(ex::var(mesg("delta", 1)), ex::var(mesg("xs", 1))))));
}

TEST_CASE("parse: r[local] belongs to the computing client") {
    Protocol pi = ovt("m[a]@2 := r[local]@1; m[b]@1 := r[local]@2");
    CHECK(vars_of(pi.cmds[0].body) == std::set<Var>{flip("local", 1)});
    CHECK(vars_of(pi.cmds[1].body) == std::set<Var>{flip("local", 2)});
}

TEST_CASE("parse: errors") {
    CHECK(kind_of([] { ovt("m[w]@2 := (s[w] +)@1"); }) == ErrorKind::Syntax);
    CHECK(kind_of([] { ovt("m[w]@2 := s[w]@1; m[w]@2 := s[v]@1"); }) == ErrorKind::Structural);
    CHECK(kind_of([] { ovt("m[w]@2 := (s[w] + s[v]@3)@1"); }) == ErrorKind::Ownership);
    CHECK(kind_of([] { ovt("out@1 := s[w]@2"); }) == ErrorKind::Structural);
    CHECK(kind_of([] { ovt("m[w]@2 := \"$x\"@1"); }) == ErrorKind::Syntax);
    try {
        ovt("m[w]@2 := s[w]@1;\nm[v]@2 := (s[w] # 1)@1");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2, column 17") != std::string::npos);
    }
}

TEST_CASE("desugar") {
    Expr c = ex::var(secret("c", 1)), a = ex::var(secret("a", 1)), b = ex::var(secret("b", 1));
    Expr m = desugar(ex::mux(c, a, b));
    CHECK(equal(m, ex::add(ex::mul(ex::sub(ex::cnst(1), c), a), ex::mul(c, b))));
    CHECK(equal(desugar(ex::lnot(a)), ex::sub(ex::cnst(1), a)));
    Expr plain = ex::add(a, ex::mul(b, ex::cnst(3)));
    CHECK(equal(desugar(plain), plain));
    CHECK(equal(desugar(m), m));
}

TEST_CASE("desugar preserves values") {
    ref::Gen g(7);
    Expr c = ex::var(secret("c", 1)), a = ex::var(secret("a", 1)), b = ex::var(secret("b", 1));
    std::vector<Expr> es = {ex::mux(c, a, b), ex::lnot(ex::mux(ex::lnot(c), b, a)), ex::neg(ex::sub(a, b))};
    for (std::int64_t p : {2, 3, 5}) {
        for (const Expr& e : es) {
            for (std::int64_t cv = 0; cv < 2; ++cv)
                for (std::int64_t av = 0; av < p; ++av)
                    for (std::int64_t bv = 0; bv < p; ++bv) {
                        ref::Env env{{secret("c", 1), cv}, {secret("a", 1), av}, {secret("b", 1), bv}};
                        CHECK(ref::eval(desugar(e), env, p) == ref::eval(e, env, p));
                    }
        }
    }
}

TEST_CASE("views: additive sharing with C = {3}") {
    Protocol pi = ovt(read_file(ref::corpus("add3.ovt")));
    std::set<ClientId> H{1, 2}, C{3};
    Views v = views_split(pi, H, C);
    CHECK(v.h_to_c.count(mesg("s1", 3)));
    CHECK(v.h_to_c.count(mesg("s2", 3)));
    CHECK(v.c_to_h.count(reveal("3")));
    Views d = views_by_definition(pi, H, C);
    CHECK(v.h_to_c == d.h_to_c);
    CHECK(v.c_to_h == d.c_to_h);
}

TEST_CASE("views: trivial cases") {
    Protocol pi = ovt("m[w]@2 := s[w]@1");
    CHECK(views_split(pi, {1, 2}, {}).h_to_c.empty());
    CHECK(views_split(pi, {1}, {2}).h_to_c == std::set<Var>{mesg("w", 2)});
    CHECK_THROWS(views_split(pi, {1, 2}, {2}));
    CHECK_THROWS(views_split(pi, {1}, {}));
}

TEST_CASE("views match a direct computation on random protocols") {
    ref::Gen g(11);
    for (int i = 0; i < 100; ++i) {
        Protocol pi = g.protocol(2, 6);
        for (const auto& [H, C] : std::vector<std::pair<std::set<ClientId>, std::set<ClientId>>>{
                 {{1, 2}, {}}, {{1}, {2}}, {{2}, {1}}, {{}, {1, 2}}}) {
            if (!pi.federation.count(1) || !pi.federation.count(2)) continue;
            Views v = views_split(pi, H, C), d = views_by_definition(pi, H, C);
            CHECK(v.h_to_c == d.h_to_c);
            CHECK(v.c_to_h == d.c_to_h);
        }
    }
}

TEST_CASE("role sets partition the protocol variables") {
    ref::Gen g(3);
    for (int i = 0; i < 100; ++i) {
        Protocol pi = g.protocol(3, 6);
        RoleSets rs = role_sets(pi);
        std::set<Var> all;
        std::size_t total = 0;
        for (const auto* s : {&rs.S, &rs.R, &rs.M, &rs.P, &rs.O}) {
            total += s->size();
            all.insert(s->begin(), s->end());
        }
        CHECK(total == all.size());
        CHECK(all == protocol_vars(pi));
        std::set<Var> v = rs.M;
        v.insert(rs.P.begin(), rs.P.end());
        CHECK(v == rs.V);
        for (const Var& x : rs.S) CHECK(x.kind == VarKind::Secret);
        for (const Var& x : rs.R) CHECK(x.kind == VarKind::Flip);
    }
}

TEST_CASE("print then parse is the identity") {
    auto same = [](const Protocol& a, const Protocol& b) {
        REQUIRE(a.cmds.size() == b.cmds.size());
        for (std::size_t i = 0; i < a.cmds.size(); ++i) {
            const Cmd &x = a.cmds[i], &y = b.cmds[i];
            CHECK(x.kind == y.kind);
            CHECK(x.target == y.target);
            CHECK(x.client == y.client);
            CHECK(equal(x.body, y.body));
            if (x.kind == Cmd::Kind::Assert) CHECK(equal(x.rhs, y.rhs));
        }
    };
    ref::Gen g(5);
    for (int i = 0; i < 200; ++i) {
        Protocol pi = g.protocol(i % 2 ? 3 : 2, 6);
        same(pi, ovt(print_protocol(pi), pi.prime.value()));
    }
    for (const char* f : {"add3.ovt", "leaky.ovt"}) {
        Protocol pi = ovt(read_file(ref::corpus(f)));
        same(pi, ovt(print_protocol(pi)));
    }
    for (const char* f : {"gmw_circuit.pre", "bdoz_sum_open.pre", "bdoz_mult.pre", "ygc_encode.pre"}) {
        Protocol pi = expand(parse_source(read_file(ref::corpus(f))), Prime(2)).pi;
        same(pi, ovt(print_protocol(pi)));
    }
}
