#include <doctest.h>

#include <chrono>

#include "mpcv/parse.hpp"
#include "mpcv/solver.hpp"
#include "support.hpp"

using namespace mpcv;

namespace {

Expr v(const Var& x) { return ex::var(x); }

Solver smt(std::uint64_t p) { return Solver(Prime(p), SolverConfig{Backend::Smt, default_solver_cmd(), kDefaultBudget, 60.0}); }

struct CGen {
    std::mt19937_64 rng;
    std::vector<Var> pool{secret("x", 1), secret("y", 1), flip("r", 2)};
    explicit CGen(std::uint64_t seed) : rng(seed) {}
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
    Expr term(int d) {
        if (d == 0 || pick(3) == 0) return pick(3) ? v(pool[pick(pool.size())]) : ex::cnst(pick(5));
        Expr a = term(d - 1), b = term(d - 1);
        switch (pick(3)) {
            case 0: return ex::add(a, b);
            case 1: return ex::sub(a, b);
            default: return ex::mul(a, b);
        }
    }
    Constraint formula(int d) {
        if (d == 0 || pick(3) == 0) return cn::eq(term(2), term(2));
        if (pick(3) == 0) return cn::neg(formula(d - 1));
        return cn::conj(formula(d - 1), formula(d - 1));
    }
};

}  // namespace

TEST_CASE("satisfiable examples") {
    Var x = secret("x", 1), y = secret("y", 1);
    Solver s(Prime(2));
    CHECK(s.satisfiable(cn::conj(cn::eq(v(x), ex::add(v(y), ex::cnst(1))), cn::eq(v(x), v(y)))).verdict == Sat::Unsat);
    CHECK(s.satisfiable(cn::eq(v(x), v(x))).verdict == Sat::Sat);

    Solver s5(Prime(5));
    SatResult r = s5.satisfiable(cn::eq(ex::mul(v(x), v(x)), ex::cnst(4)));
    REQUIRE(r.verdict == Sat::Sat);
    REQUIRE(r.model);
    std::uint64_t xv = *r.model->at(x);
    CHECK((xv == 2 || xv == 3));
    CHECK(ref::models(cn::eq(ex::mul(v(x), v(x)), ex::cnst(4)), 5).size() == 2);
}

TEST_CASE("budget exhaustion is unknown, never unsat") {
    std::vector<Constraint> cs;
    for (int i = 0; i < 12; ++i) {
        Var a = secret("a" + std::to_string(i), 1), b = secret("b" + std::to_string(i), 1);
        cs.push_back(cn::neg(cn::eq(ex::mul(v(a), v(b)), ex::cnst(0))));
    }
    SatResult r = satisfiable_enum(cn::conj(cs), Prime(7), 1000);
    CHECK(r.verdict == Sat::Unknown);
}

TEST_CASE("linear elimination keeps large fields tractable") {
    // a chain of definitions over 2^31-1 leaves a single free variable
    Prime p(2147483647);
    std::vector<Constraint> cs;
    Var prev = secret("x0", 1);
    for (int i = 1; i < 20; ++i) {
        Var cur = mesg("x" + std::to_string(i), 1);
        cs.push_back(cn::eq(v(cur), ex::add(v(prev), ex::cnst(3))));
        prev = cur;
    }
    Solver s(p);
    auto t0 = std::chrono::steady_clock::now();
    EntailResult r = s.entails(cn::conj(cs), cn::eq(v(prev), ex::add(v(secret("x0", 1)), ex::cnst(57))));
    CHECK(r.verdict == Verdict::True);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
}

TEST_CASE("smt backend examples") {
    Var x = secret("x", 1), y = secret("y", 1);
    Solver s = smt(2);
    EntailResult r = s.entails(cn::eq(v(x), ex::add(v(y), ex::cnst(1))), cn::eq(v(x), v(y)));
    CHECK(r.verdict == Verdict::False);
    REQUIRE(r.countermodel);
    CHECK(*r.countermodel->at(x) == 1);
    CHECK(*r.countermodel->at(y) == 0);

    Solver s5 = smt(5);
    SatResult m = s5.satisfiable(cn::eq(ex::mul(v(x), v(x)), ex::cnst(4)));
    REQUIRE(m.verdict == Sat::Sat);
    CHECK((*m.model->at(x) == 2 || *m.model->at(x) == 3));

    Solver big = smt(2147483647);
    Constraint sq = cn::eq(ex::mul(v(x), v(x)), ex::cnst(4));
    SatResult b = big.satisfiable(sq);
    REQUIRE(b.verdict == Sat::Sat);
    CHECK(holds(sq, *b.model, Prime(2147483647)));
    CHECK(big.satisfiable(cn::conj(sq, cn::conj(cn::neg(cn::eq(v(x), ex::cnst(2))),
                                                cn::neg(cn::eq(v(x), ex::cnst(2147483645))))))
              .verdict == Sat::Unsat);
}

TEST_CASE("enum and smt backends agree") {
    CGen g(99);
    int queries = 0;
    for (std::uint64_t p : {2, 3, 5}) {
        Solver e{Prime(p)};
        Solver s = smt(p);
        for (int i = 0; i < 12; ++i) {
            Constraint c = g.formula(2);
            SatResult a = e.satisfiable(c), b = s.satisfiable(c);
            CHECK(a.verdict != Sat::Unknown);
            CHECK(a.verdict == b.verdict);
            if (b.verdict == Sat::Sat) {
                REQUIRE(b.model);
                Memory total = *b.model;
                for (const Var& x : vars_of(c))
                    if (!total.count(x)) total[x] = 0;
                CHECK(holds(c, total, Prime(p)));
            }
            ++queries;
        }
    }
    CHECK(queries == 36);
}

TEST_CASE("query counting") {
    Solver s(Prime(3));
    Var x = secret("x", 1);
    s.entails(cn::eq(v(x), v(x)), cn::eq(v(x), v(x)));
    s.satisfiable(cn::eq(v(x), ex::cnst(1)));
    CHECK(s.queries() == 2);
}
