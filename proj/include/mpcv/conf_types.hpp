#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mpcv/solver.hpp"

namespace mpcv {

struct ConfType;

struct Cipher {
    Var pad;
    std::shared_ptr<const ConfType> body;
};

// Plain dependencies plus one-time-pad encryptions of nested types.
struct ConfType {
    std::set<Var> deps;
    std::vector<Cipher> ciphers;

    bool closed() const { return ciphers.empty(); }
    // Every variable mentioned at any depth, pads included.
    std::set<Var> footprint() const;
};

bool operator==(const ConfType& a, const ConfType& b);

ConfType dep_type(std::set<Var> deps);
ConfType cipher_type(const Var& pad, ConfType body);

using Gamma = std::map<Var, ConfType>;
using RSet = std::set<Var>;
// Programmer equivalences `x as phi`, keyed by the assigned variable.
using Hints = std::map<Var, Term>;

// Algorithmic typing of a term computed at `sender`. sender == 0 accepts any
// flip as a pad. Flips already in R are never pads (the term falls back to
// plain dependencies); newly consumed pads are added to R. With `env`, a flip
// is a pad only if it is outside the transitive footprint of the padded term,
// so values computed from the pad earlier cannot cancel it.
ConfType type_term(const Term& phi, ClientId sender, RSet& R, const Gamma* env = nullptr);

// Variables reachable from vs through the footprints of their types.
std::set<Var> reach(const std::set<Var>& vs, const Gamma& env);
// Demotes to plain dependencies every cipher whose pad is reachable from its body.
ConfType recheck_pads(const ConfType& t, const Gamma& env);

struct HintCheck {
    Var target;
    Term term;
    Verdict verdict = Verdict::Unknown;
};

struct ConfTyping {
    Gamma gamma;
    RSet R;
    std::vector<HintCheck> hints;
};

// Types every assignment of pi, and the definitional conjuncts of pre for
// variables pi does not assign. With `discharge`, each used hint is checked by
// entailment; a refuted hint throws ErrorKind::Hint, an unknown one ErrorKind::Solver.
ConfTyping type_protocol_conf(const Protocol& pi, const Constraint& pre, const Hints& hints, Solver* solver,
                              bool discharge = true);

// Adds types for variables defined by top-level `x == t` conjuncts of pre
// that pi does not assign.
void type_pre_definitions(ConfTyping& t, const Protocol& pi, const Constraint& pre);
// Linear union of pad sets; a pad used twice throws ErrorKind::Linearity.
void consume_pads(RSet& R, const RSet& more, const Var& at);

// Least fixpoint of decryption over the types of `accessible`; remaining
// ciphers are reduced to their pads.
std::set<Var> leakage_closure(const Gamma& gamma, const std::set<Var>& accessible);

struct ConfVerdict {
    std::set<ClientId> H, C;
    bool pass = true;
    std::set<Var> leaked;  // S_H elements in the closure
    std::set<Var> closure;
};

// Adversary access for a partition: M_C (plus P when with_reveals), corrupt
// secrets, flips and corrupt-owned preprocessed variables.
std::set<Var> adversary_access(const Protocol& pi, const Constraint& pre, const std::set<ClientId>& C,
                               bool with_reveals = false);

ConfVerdict check_conf_partition(const ConfTyping& t, const Protocol& pi, const Constraint& pre,
                                 const std::set<ClientId>& H, const std::set<ClientId>& C, bool with_reveals = false);
std::vector<ConfVerdict> check_conf_all(const ConfTyping& t, const Protocol& pi, const Constraint& pre,
                                        bool with_reveals = false);

std::string print_conftype(const ConfType& t);

}  // namespace mpcv
