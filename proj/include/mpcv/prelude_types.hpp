#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpcv/conf_types.hpp"
#include "mpcv/int_types.hpp"
#include "mpcv/prelude.hpp"

namespace mpcv {

enum class ParamKind { String, Client };

struct Obligation {
    std::string kind;  // pre, post, hint, mac
    std::string fn;    // function being verified, or "main"
    std::string site;  // call site or variable the obligation is about
    Constraint goal;
    Verdict verdict = Verdict::Unknown;
    std::optional<Memory> countermodel;
    std::string detail;
};

// Hoare/Pi type of a protocol function, instantiated at fresh parameters.
struct PiType {
    std::string fn;
    std::vector<std::string> params;
    std::vector<ParamKind> kinds;
    std::vector<Value> fresh;
    Constraint pre, post;  // instances at `fresh`
    Gamma gamma;
    RSet R;
    Delta delta;
    bool verified = false;
    std::vector<Obligation> obligations;
};

struct Sig {
    std::map<std::string, PiType> types;
    std::vector<std::string> order;  // verification order
    bool all_verified() const;
};

std::vector<ParamKind> infer_param_kinds(const std::string& fn, const Codebase& cb);

struct FreshScheme {
    ClientId client_base = 1000;  // fresh clients are client_base + k
    int instance = 0;             // distinguishes independent instantiations
};

// Callees must already be in `sig`. Their preconditions are not re-checked
// inside f (only at call sites in main).
PiType verify_signature(const std::string& fn, const Codebase& cb, const Sig& sig, Solver& solver,
                        const FreshScheme& fresh = {});

// Verifies every protocol function in dependency order.
Sig verify_codebase(const Codebase& cb, Solver& solver, const FreshScheme& fresh = {});

struct ProgramTyping {
    Protocol pi;
    Emitted emitted;
    ConfTyping conf;
    IntTyping integ;
    std::vector<Obligation> obligations;
    std::vector<ConfVerdict> conf_verdicts;
    std::vector<IntVerdict> int_verdicts;
    bool obligations_ok = true;  // every obligation valid
    bool unknown = false;        // some obligation undecided
};

ProgramTyping typecheck_program(const SourceProgram& prog, const Sig& sig, const Constraint& pre, Solver& solver);

struct BridgeRow {
    std::set<ClientId> H, C;
    bool comp_conf = false, whole_conf = false;
    bool comp_int = false, whole_int = false;
};

struct BridgeReport {
    std::vector<BridgeRow> rows;
    int disagreements = 0;
};

BridgeReport soundness_bridge(const ProgramTyping& comp, const Constraint& pre, Solver& solver);

struct ObligationCounts {
    int pre = 0, post = 0, hint = 0, mac = 0;
};
ObligationCounts count_obligations(const std::vector<Obligation>& obs);

}  // namespace mpcv
