#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mpcv/ast.hpp"
#include "mpcv/memory.hpp"

namespace mpcv {

// Terms reuse Expr, restricted to Var/Const/Add/Sub/Mul with every owner explicit.
using Term = Expr;

struct CNode;
using Constraint = std::shared_ptr<const CNode>;

struct CNode {
    enum class Kind { Eq, And, Not };
    Kind kind = Kind::Eq;
    Term lhs, rhs;
    std::vector<Constraint> kids;
};

namespace cn {
Constraint eq(Term a, Term b);
Constraint conj(Constraint a, Constraint b);
Constraint conj(const std::vector<Constraint>& cs);
Constraint neg(Constraint a);
Constraint truth();
}  // namespace cn

bool is_truth(const Constraint& c);
std::vector<Constraint> conjuncts(const Constraint& c);
void collect_vars(const Constraint& c, std::set<Var>& out);
std::set<Var> vars_of(const Constraint& c);
Constraint map_vars(const Constraint& c, const std::function<Var(const Var&)>& f);
Expr map_vars(const Expr& e, const std::function<Var(const Var&)>& f);

// Side constraints b(b-1) == 0 for OT choices outside F_2 are appended to `side`.
Term toeq_expr(const Expr& e, const Prime& p, std::vector<Constraint>* side = nullptr);
Constraint toeq_cmd(const Cmd& c, const Prime& p);
Constraint toeq(const Protocol& pi);
Constraint toeq_without(const Protocol& pi, std::size_t skip);

// Total evaluation of a term; unbound or padded variables are errors.
std::uint64_t eval_term(const Term& t, const Memory& m, const Prime& p);
bool holds(const Constraint& c, const Memory& m, const Prime& p);

std::string print_constraint(const Constraint& c);

// Role sets and federation over pi together with the variables of E_pre,
// which form part of every initial memory.
RoleSets role_sets_with(const Protocol& pi, const Constraint& pre);
std::set<ClientId> federation_with(const Protocol& pi, const Constraint& pre);
Protocol with_federation(const Protocol& pi, const Constraint& pre);
// Variables fixed before execution: everything read but never assigned, plus vars(E_pre).
std::set<Var> initial_vars(const Protocol& pi, const Constraint& pre);
// Rejects protocols that assign a preprocessed variable.
void check_preprocessing(const Protocol& pi, const Constraint& pre);

}  // namespace mpcv
