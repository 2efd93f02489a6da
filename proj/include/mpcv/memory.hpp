#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "mpcv/ast.hpp"

namespace mpcv {

// nullopt is the padding value of adversarial runs.
using MemValue = std::optional<std::uint64_t>;
using Memory = std::map<Var, MemValue>;

// m{x -> v}; x must not be bound yet.
void bind(Memory& m, const Var& x, MemValue v);
// m1 (+) m2, or nullopt when they disagree on a shared variable.
std::optional<Memory> merge(const Memory& a, const Memory& b);
Memory restrict_to(const Memory& m, const std::set<Var>& xs);

std::string print_memory(const Memory& m);

}  // namespace mpcv
