#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpcv/solver.hpp"

namespace mpcv {

// A recognised MAC check m[Wm] = m[Xk] + m[delta] * m[Ws] at one client.
struct MacCheck {
    std::size_t cmd = 0;
    ClientId at = 0;
    Var mac, key, delta, share;
    Verdict side = Verdict::Unknown;  // entailment of the MAC equation without the assert
};

std::optional<MacCheck> match_bdoz(const Cmd& c);

struct IntEntry {
    Var x;
    ClientId origin = 0;
    std::set<Var> deps;  // views read by the command
    bool upgrade = false;
    Var key, delta;  // upgrade guards
};

using Delta = std::vector<IntEntry>;

struct IntTyping {
    Delta delta;
    Constraint constraint;
    std::vector<MacCheck> macs;  // every recognised check, upgraded or not
};

// With `discharge`, a MAC check only upgrades when its side condition is
// entailed; otherwise recognised checks upgrade unconditionally (the caller
// has discharged them elsewhere).
IntTyping type_protocol_integrity(const Protocol& pi, const Constraint& pre, Solver* solver, bool discharge = true);

enum class Label { High, Low };

struct Labeling {
    std::map<Var, Label> label;
    std::map<Var, Var> blame;  // Low variable -> the Low dependency it inherited, if any

    Label of(const Var& v, const std::set<ClientId>& H) const;
};

Labeling assign_labels(const Delta& delta, const std::set<ClientId>& H, const std::set<ClientId>& C);

struct IntVerdict {
    std::set<ClientId> H, C;
    bool pass = true;
    std::optional<Var> first_low;
    std::vector<Var> chain;  // first_low back to a corrupt-originated value
};

IntVerdict check_int_partition(const IntTyping& t, const Protocol& pi, const std::set<ClientId>& H,
                               const std::set<ClientId>& C);
std::vector<IntVerdict> check_int_all(const IntTyping& t, const Protocol& pi, const Constraint& pre);

std::string print_delta(const Delta& d);

}  // namespace mpcv
