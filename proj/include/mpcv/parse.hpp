#pragma once

#include <string>

#include "mpcv/conf_types.hpp"
#include "mpcv/prelude.hpp"

namespace mpcv {

struct OvtProgram {
    Protocol pi;
    Hints hints;
};

// Overture source: identifiers inside s[..], r[..], m[..], p[..] are literal names.
OvtProgram parse_overture(const std::string& src, const Prime& p);
Constraint parse_constraint(const std::string& src);
// `x == v` conjuncts, e.g. "s[1]@1 == 1 /\ r[x]@1 == 0".
Memory parse_memory(const std::string& src, const Prime& p);

std::string read_file(const std::string& path);

}  // namespace mpcv
