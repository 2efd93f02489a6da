#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpcv/semantics.hpp"

namespace mpcv {

using Rational = boost::rational<std::int64_t>;

// Exact pmf stored as integer multiplicities over a fixed variable order.
struct Pmf {
    std::vector<Var> domain;
    std::map<std::vector<MemValue>, std::uint64_t> counts;
    std::uint64_t total = 0;

    Rational weight(const Memory& m) const;
    Memory realization(const std::vector<MemValue>& key) const;
};

Pmf pmf_from_runs(const std::vector<Memory>& runs, const std::set<Var>& domain);
Pmf basic_distribution(const Protocol& pi, const Constraint& pre, std::uint64_t budget);
Pmf basic_distribution_adv(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& C,
                           const AdversaryStrategy& A, std::uint64_t budget);

Pmf marginal(const Pmf& P, const std::set<Var>& X);
// P(X1 = x1 | X2 = x2), 0 where x2 has no mass.
Rational conditional(const Pmf& P, const Memory& x1, const Memory& x2);
bool separated(const Pmf& P, const std::set<Var>& X1, const std::set<Var>& X2, const std::set<Var>& given = {});

std::vector<std::pair<std::set<ClientId>, std::set<ClientId>>> partitions(const std::set<ClientId>& fed);

struct OracleReport {
    std::string property;
    std::set<ClientId> H, C;
    bool pass = true;
    std::optional<Memory> witness;
    std::string note;
    bool bounded_adversary = false;
    std::uint64_t runs = 0;
    std::uint64_t strategies = 0;
};

OracleReport check_gradual_release(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& H,
                                   const std::set<ClientId>& C, std::uint64_t budget = 1ull << 20);
OracleReport check_nimo(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& H,
                        const std::set<ClientId>& C, std::uint64_t budget = 1ull << 20);
// Views: a surviving adversarial run must match some passive run (same S_H and
// honest initial values) on V_C|>H, V_H|>C and O_H. Outputs: on V_H|>C and O_H only.
enum class IntegrityReading { Views, Outputs };

OracleReport check_integrity(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& H,
                             const std::set<ClientId>& C, std::uint64_t budget = 1ull << 20,
                             std::uint64_t max_strategies = 1ull << 12,
                             IntegrityReading reading = IntegrityReading::Views);

enum class Interference { Direct, Encoding, Separated };

struct InterferenceCase {
    Interference kind = Interference::Separated;
    std::set<Var> encoded;  // X for the encoding case
    bool direct = false, encoding = false, neither = false;
};

// Classifies x against views M; X ranges over subsets of `pool` up to max_size.
InterferenceCase classify_interference(const Pmf& bd, const Var& x, const std::set<Var>& M,
                                       const std::set<Var>& pool, std::size_t max_size = 3);

// Views and outputs that take some non-bottom adversarial value no passive run
// with the same honest secrets produces.
std::set<Var> find_aberrations(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& H,
                               const std::set<ClientId>& C, std::uint64_t budget = 1ull << 20,
                               std::uint64_t max_strategies = 1ull << 12);

}  // namespace mpcv
