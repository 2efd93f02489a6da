#include <doctest.h>

#include "mpcv/error.hpp"
#include "mpcv/field.hpp"

using namespace mpcv;

namespace {
FieldElem fe(std::uint64_t v, std::uint64_t p) { return FieldElem(v, Prime(p)); }
}  // namespace

TEST_CASE("field examples") {
    CHECK(add(fe(3, 5), fe(4, 5)).value() == 2);
    CHECK(add(fe(1, 2), fe(1, 2)).value() == 0);
    CHECK(add(fe(0, 7), fe(6, 7)).value() == 6);
    CHECK(negate_logical(fe(1, 2)).value() == 0);
    CHECK(mul(fe(3, 7), fe(5, 7)).value() == 1);
    CHECK(sub(fe(1, 5), fe(3, 5)).value() == 3);
}

TEST_CASE("modulus mismatch is a structural error") {
    try {
        (void)add(fe(1, 5), fe(1, 7));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Structural);
    }
}

TEST_CASE("primes are validated") {
    CHECK_THROWS(Prime(1));
    CHECK_THROWS(Prime(4));
    CHECK_THROWS(Prime(2147483649ull));
    CHECK_NOTHROW(Prime(2147483647ull));
    CHECK(is_prime(2));
    CHECK(is_prime(3));
    CHECK(!is_prime(561));  // Carmichael
    CHECK(is_prime(18446744073709551557ull));
    CHECK(!is_prime(18446744073709551555ull));
    const std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    std::size_t k = 0;
    for (std::uint64_t n = 0; n < 50; ++n) {
        bool want = k < std::size(small) && small[k] == n;
        if (want) ++k;
        CHECK(is_prime(n) == want);
    }
}

TEST_CASE("field axioms hold exhaustively for small primes") {
    for (std::uint64_t p : {2u, 3u, 5u, 7u}) {
        for (std::uint64_t a = 0; a < p; ++a) {
            for (std::uint64_t b = 0; b < p; ++b) {
                CHECK(add(fe(a, p), fe(b, p)) == add(fe(b, p), fe(a, p)));
                CHECK(mul(fe(a, p), fe(b, p)) == mul(fe(b, p), fe(a, p)));
                CHECK(add(sub(fe(a, p), fe(b, p)), fe(b, p)) == fe(a, p));
                for (std::uint64_t c = 0; c < p; ++c) {
                    CHECK(add(add(fe(a, p), fe(b, p)), fe(c, p)) == add(fe(a, p), add(fe(b, p), fe(c, p))));
                    CHECK(mul(mul(fe(a, p), fe(b, p)), fe(c, p)) == mul(fe(a, p), mul(fe(b, p), fe(c, p))));
                    CHECK(mul(fe(a, p), add(fe(b, p), fe(c, p))) ==
                          add(mul(fe(a, p), fe(b, p)), mul(fe(a, p), fe(c, p))));
                }
            }
            CHECK(add(fe(a, p), sub(fe(0, p), fe(a, p))).value() == 0);
        }
    }
}

TEST_CASE("logical negation") {
    for (std::uint64_t p : {2u, 3u, 5u}) {
        for (std::uint64_t a = 0; a < 2; ++a) CHECK(negate_logical(negate_logical(fe(a, p))) == fe(a, p));
    }
    for (std::uint64_t a = 0; a < 2; ++a) CHECK(negate_logical(fe(a, 2)) == add(fe(1, 2), fe(a, 2)));
}

TEST_CASE("arithmetic is exact near 2^31-1 and 2^64") {
    const std::uint64_t p = 2147483647ull;
    CHECK(mul(fe(p - 1, p), fe(p - 1, p)).value() == 1);
    CHECK(add(fe(p - 1, p), fe(p - 1, p)).value() == p - 2);
    const std::uint64_t q = 18446744073709551557ull;
    Prime Q(q);
    CHECK(Q.add(q - 1, q - 1) == q - 2);
    CHECK(Q.mul(q - 1, q - 1) == 1);
    CHECK(Q.mul(Q.inv(12345), 12345) == 1);
}
