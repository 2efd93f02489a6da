#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpcv/constraints.hpp"
#include "mpcv/memory.hpp"

namespace mpcv {

// Throws Unbound, Ownership, or Stuck (OT choice outside {0,1}).
std::uint64_t eval_expr(const Memory& m, const Expr& e, ClientId at, const Prime& p);

// Passive big-step run. A failing assert throws ErrorKind::Assertion.
Memory run(const Memory& m0, const Protocol& pi);

// A rewrite sees the corrupt-visible memory and the value the protocol would compute.
using Rewrite = std::function<std::uint64_t(const Memory& visible, std::uint64_t honest)>;

struct AdversaryStrategy {
    std::map<std::size_t, Rewrite> sites;                     // command index
    std::map<std::pair<std::size_t, int>, Rewrite> choices;   // (command index, choice slot)
    std::string label = "honest";
};

struct AdvRun {
    Memory mem;
    bool aborted = false;
};

// Corrupt-computed commands without an entry in A.sites run honestly.
AdvRun run_adversarial(const Memory& m0, const Protocol& pi, const std::set<ClientId>& C, const AdversaryStrategy& A);

Memory corrupt_view(const Memory& m, const std::set<ClientId>& C);

// Initial memories over initial_vars(pi, pre) satisfying pre, uniformly weighted.
std::vector<Memory> initial_memories(const Protocol& pi, const Constraint& pre, std::uint64_t budget);

std::vector<Memory> enumerate_runs(const Protocol& pi, const Constraint& pre, std::uint64_t budget);

struct StrategyFamily {
    std::vector<AdversaryStrategy> strategies;
    bool bounded = false;  // some site fell back to constants and offsets
};

// Adversarial sites: corrupt commands producing V_{C|>H}, plus OT choices an
// honest sender takes from a corrupt receiver.
StrategyFamily strategy_family(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& C,
                               std::uint64_t max_strategies);

// Undefined views and outputs of aborted runs are padded with nullopt.
std::vector<AdvRun> enumerate_runs_adv(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& C,
                                       const AdversaryStrategy& A, std::uint64_t budget);

}  // namespace mpcv
