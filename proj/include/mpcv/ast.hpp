#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mpcv/field.hpp"

namespace mpcv {

// 0 means "no owner" (reveals) or "not yet located" inside templates.
using ClientId = std::int64_t;

enum class VarKind { Secret, Flip, Mesg, Reveal, Out };

struct Var {
    VarKind kind = VarKind::Secret;
    std::string name;
    ClientId owner = 0;

    auto operator<=>(const Var&) const = default;
};

Var secret(std::string w, ClientId i);
Var flip(std::string w, ClientId i);
Var mesg(std::string w, ClientId i);
Var reveal(std::string w);
Var out(ClientId i);

std::string to_string(const Var& v);
std::string quote_name(const std::string& w);

enum class Op { Var, Const, Add, Sub, Mul, Neg, Not, Mux, OT, OT4 };

struct Node;
using Expr = std::shared_ptr<const Node>;

// OT kids: choice, e2, e3 (choice computed at recv).
// OT4 kids: b1, b2, row1..row4 (b1, b2 computed at recv).
struct Node {
    Op op = Op::Const;
    Var var;
    std::uint64_t value = 0;
    ClientId recv = 0;
    std::vector<Expr> kids;
};

namespace ex {
Expr var(const Var& v);
Expr cnst(std::uint64_t v);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr neg(Expr a);
Expr lnot(Expr a);
Expr mux(Expr c, Expr a, Expr b);
Expr ot(Expr choice, Expr e2, Expr e3, ClientId recv);
Expr ot4(Expr b1, Expr b2, std::vector<Expr> rows, ClientId recv);
}  // namespace ex

bool equal(const Expr& a, const Expr& b);
void collect_vars(const Expr& e, std::set<Var>& out);
std::set<Var> vars_of(const Expr& e);
bool has_ot(const Expr& e);

// Mux/Not/Neg removed; only Var/Const/Add/Sub/Mul/OT/OT4 remain.
Expr desugar(const Expr& e);

// Give every unlocated non-reveal variable the owner `c`; OT choices go to the receiver.
Expr locate(const Expr& e, ClientId c);

struct Cmd {
    enum class Kind { Assign, Assert };
    Kind kind = Kind::Assign;
    Var target;  // Assign only
    ClientId client = 0;
    Expr body;  // Assign body, or Assert lhs
    Expr rhs;   // Assert rhs

    static Cmd assign(Var target, ClientId src, Expr body);
    static Cmd assertion(Expr lhs, Expr rhs, ClientId at);
};

struct Protocol {
    std::vector<Cmd> cmds;
    std::set<ClientId> federation;
    Prime prime;
};

// Validates the command list and infers the federation from it.
Protocol make_protocol(std::vector<Cmd> cmds, Prime prime, std::set<ClientId> extra_clients = {});
void check_well_formed(const Protocol& pi);

struct RoleSets {
    std::set<Var> S, R, M, P, O, V;
};

RoleSets role_sets(const Protocol& pi);
std::set<Var> assigned_vars(const Protocol& pi);
std::set<Var> protocol_vars(const Protocol& pi);

struct Views {
    std::set<Var> h_to_c;  // V_{H|>C}
    std::set<Var> c_to_h;  // V_{C|>H}
};

Views views_split(const Protocol& pi, const std::set<ClientId>& H, const std::set<ClientId>& C);
void check_partition(const std::set<ClientId>& fed, const std::set<ClientId>& H, const std::set<ClientId>& C);

// Overture concrete syntax. Expressions print relative to the computing client.
std::string print_expr(const Expr& e, ClientId at);
// Terms print with every owner explicit.
std::string print_term(const Expr& e);
std::string print_cmd(const Cmd& c);
std::string print_protocol(const Protocol& pi);

}  // namespace mpcv
