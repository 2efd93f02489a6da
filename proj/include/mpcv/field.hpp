#pragma once

#include <cstdint>
#include <iosfwd>
#include "mpcv/error.hpp"

namespace mpcv {

// Primality is checked on construction (deterministic Miller-Rabin, 64-bit).
class Prime {
  public:
    Prime() : p_(2) {}
    explicit Prime(std::uint64_t p);

    std::uint64_t value() const { return p_; }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        if (s >= p_ || s < a) s -= p_;
        return s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + (p_ - b); }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p_);
    }
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
    std::uint64_t pow(std::uint64_t base, std::uint64_t exp) const;
    // Fermat inverse; only the solver uses it.
    std::uint64_t inv(std::uint64_t a) const;
    std::uint64_t reduce(std::uint64_t v) const { return v % p_; }

    friend bool operator==(const Prime&, const Prime&) = default;

  private:
    std::uint64_t p_;
};

bool is_prime(std::uint64_t n);

class FieldElem {
  public:
    FieldElem(std::uint64_t value, Prime p) : value_(p.reduce(value)), p_(p) {}

    std::uint64_t value() const { return value_; }
    const Prime& modulus() const { return p_; }

    friend bool operator==(const FieldElem&, const FieldElem&) = default;

  private:
    std::uint64_t value_;
    Prime p_;
};

FieldElem add(const FieldElem& a, const FieldElem& b);
FieldElem sub(const FieldElem& a, const FieldElem& b);
FieldElem mul(const FieldElem& a, const FieldElem& b);
// 1 - a for every p; logical negation when p = 2.
FieldElem negate_logical(const FieldElem& a);

std::ostream& operator<<(std::ostream& os, const FieldElem& e);

}  // namespace mpcv
