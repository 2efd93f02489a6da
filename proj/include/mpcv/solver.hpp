#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mpcv/constraints.hpp"

namespace mpcv {

enum class Backend { Enum, Smt };
enum class Sat { Sat, Unsat, Unknown };
enum class Verdict { True, False, Unknown };

std::string to_string(Sat s);
std::string to_string(Verdict v);
std::string to_string(Backend b);

struct SatResult {
    Sat verdict = Sat::Unknown;
    std::optional<Memory> model;
    std::string detail;
};

struct EntailResult {
    Verdict verdict = Verdict::Unknown;
    std::optional<Memory> countermodel;
    std::string detail;
};

constexpr std::uint64_t kDefaultBudget = 1ull << 20;

struct SolverConfig {
    Backend backend = Backend::Enum;
    std::string solver_cmd;  // empty: default_solver_cmd()
    std::uint64_t budget = kDefaultBudget;
    double timeout_s = 60.0;
};

// MPCV_SOLVER overrides the bundled finite-field solver script.
std::string default_solver_cmd();

// Exhaustive search after exact elimination of linearly defined variables;
// only the residual variables count against the budget.
SatResult satisfiable_enum(const Constraint& e, const Prime& p, std::uint64_t budget = kDefaultBudget);
SatResult satisfiable_smt(const Constraint& e, const Prime& p, const std::string& cmd, double timeout_s);

std::string emit_smtlib(const Constraint& e, const Prime& p);

class Solver {
  public:
    explicit Solver(Prime p, SolverConfig cfg = {}) : p_(p), cfg_(std::move(cfg)) {}

    SatResult satisfiable(const Constraint& e);
    EntailResult entails(const Constraint& e1, const Constraint& e2);

    const Prime& prime() const { return p_; }
    const SolverConfig& config() const { return cfg_; }
    std::uint64_t queries() const { return queries_; }

  private:
    Prime p_;
    SolverConfig cfg_;
    std::uint64_t queries_ = 0;
};

}  // namespace mpcv
