#pragma once

#include <json.hpp>

#include "mpcv/conf_types.hpp"
#include "mpcv/int_types.hpp"
#include "mpcv/pmf.hpp"
#include "mpcv/prelude_types.hpp"

namespace mpcv {

using json = nlohmann::ordered_json;

json to_json(const Memory& m);
json to_json(const std::set<ClientId>& cs);
json to_json(const std::set<Var>& vs);

json report_entail(const Constraint& goal, const EntailResult& r);
json report_conf(const ConfTyping& t, const std::vector<ConfVerdict>& vs);
json report_int(const IntTyping& t, const std::vector<IntVerdict>& vs);
json report_oracle(const OracleReport& r);
json report_obligation(const Obligation& o);
json report_pitype(const PiType& t);
json report_program(const ProgramTyping& t);
json report_bridge(const BridgeReport& b);

// Tape files map variable names (printed form, e.g. "s[x]@1") to integers.
Memory memory_from_json(const json& j, const Prime& p);

}  // namespace mpcv
