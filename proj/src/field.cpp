#include "mpcv/field.hpp"

#include <ostream>

namespace mpcv {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These witnesses are deterministic for all n < 2^64.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Prime::Prime(std::uint64_t p) : p_(p) {
    if (!is_prime(p)) fail(ErrorKind::Structural, "not a prime: " + std::to_string(p));
}

std::uint64_t Prime::pow(std::uint64_t base, std::uint64_t exp) const { return powmod(base, exp, p_); }

std::uint64_t Prime::inv(std::uint64_t a) const {
    if (reduce(a) == 0) fail(ErrorKind::Structural, "inverse of zero");
    return powmod(a, p_ - 2, p_);
}

static void same_modulus(const FieldElem& a, const FieldElem& b) {
    if (!(a.modulus() == b.modulus()))
        fail(ErrorKind::Structural, "modulus mismatch: " + std::to_string(a.modulus().value()) + " vs " +
                                        std::to_string(b.modulus().value()));
}

FieldElem add(const FieldElem& a, const FieldElem& b) {
    same_modulus(a, b);
    return {a.modulus().add(a.value(), b.value()), a.modulus()};
}

FieldElem sub(const FieldElem& a, const FieldElem& b) {
    same_modulus(a, b);
    return {a.modulus().sub(a.value(), b.value()), a.modulus()};
}

FieldElem mul(const FieldElem& a, const FieldElem& b) {
    same_modulus(a, b);
    return {a.modulus().mul(a.value(), b.value()), a.modulus()};
}

FieldElem negate_logical(const FieldElem& a) { return {a.modulus().sub(1 % a.modulus().value(), a.value()), a.modulus()}; }

std::ostream& operator<<(std::ostream& os, const FieldElem& e) { return os << e.value(); }

}  // namespace mpcv
