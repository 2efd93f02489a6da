#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpcv/constraints.hpp"

namespace mpcv {

// Template expressions cover both metalanguage values and quoted field
// expressions; Overture source is the same language with no definitions.
struct MExpr;
using MExprP = std::shared_ptr<const MExpr>;

enum class MK {
    Num,
    Str,
    Name,
    Concat,
    Record,  // fields[i] = kids[i]
    Proj,    // kids[0].s
    List,
    Call,  // s(kids...)
    FVar,  // vk, kids[0] = name (absent for out)
    Add,
    Sub,
    Mul,
    Neg,
    Not,
    Mux,
    OT,   // choice, e2, e3 [, recv]
    OT4,  // b1, b2, table, recv [, send]
    At,   // kids[0] located at kids[1]
};

struct MExpr {
    MK k = MK::Num;
    std::string s;
    std::uint64_t num = 0;
    VarKind vk = VarKind::Secret;
    std::vector<MExprP> kids;
    std::vector<std::string> fields;
    int line = 0;
};

struct CTmpl {
    enum class Kind { True, Eq, And, Not };
    Kind k = Kind::True;
    MExprP lhs, rhs;
    std::vector<CTmpl> kids;
};

struct Instr {
    enum class Kind { Assign, Assert, Let, Hint, Expr };
    Kind k = Kind::Expr;
    MExprP a, b, c;  // Assign: target, rhs. Assert: lhs, rhs, client. Let: value. Hint: var, term. Expr: a.
    std::string name;           // Let binder
    std::vector<Instr> body;    // Let scope
    int line = 0;
};

using Seq = std::vector<Instr>;

struct FunDef {
    std::string name;
    std::vector<std::string> params;
    Seq body;
    std::optional<CTmpl> pre, post;
    bool protocol = false;  // emits commands (directly or through callees)
    int line = 0;
};

struct Codebase {
    std::vector<FunDef> funs;
    const FunDef* find(const std::string& name) const;
    // Callees before callers.
    std::vector<std::string> dependency_order() const;
    std::vector<std::string> protocol_callees(const std::string& name) const;
};

struct SourceProgram {
    Codebase cb;
    Seq main;
};

// Rejects duplicate names, calls to unknown functions and recursion.
SourceProgram parse_source(const std::string& src);
CTmpl parse_constraint_template(const std::string& src);

struct Value {
    enum class Kind { Unit, Num, Str, Field, Record, List };
    Kind kind = Kind::Unit;
    std::int64_t num = 0;
    std::string str;
    Expr field;
    ClientId loc = 0;  // computing client when the value is a located expression
    std::map<std::string, Value> rec;
    std::vector<Value> list;

    static Value of_num(std::int64_t n);
    static Value of_str(std::string s);
    static Value of_client(ClientId c) { return of_num(c); }
};

std::string print_value(const Value& v);

struct EmittedHint {
    Var target;
    Term term;
    int depth = 0;
};

struct CallSite {
    std::string fn;
    std::vector<Value> args;
    std::size_t cmd_begin = 0, cmd_end = 0;
    std::size_t hint_begin = 0, hint_end = 0;
    std::size_t call_begin = 0, call_end = 0;  // nested sites recorded inside this one
    int depth = 1;
};

struct Emitted {
    std::vector<Cmd> cmds;
    std::vector<EmittedHint> hints;
    std::vector<CallSite> calls;
};

struct EvalOptions {
    // Unbound identifiers inside s[..], m[..] etc. are literal names.
    bool literal_names = false;
    bool keep_hints = true;
};

class Evaluator {
  public:
    Evaluator(const Codebase& cb, EvalOptions opt = {}) : cb_(cb), opt_(opt) {}

    Value eval(const MExprP& e, const std::map<std::string, Value>& env);
    Value exec(const Seq& s, std::map<std::string, Value> env);
    Value call(const std::string& fn, const std::vector<Value>& args);
    Constraint eval_constraint(const CTmpl& c, const std::map<std::string, Value>& env);

    Emitted& out() { return out_; }

  private:
    const Codebase& cb_;
    EvalOptions opt_;
    Emitted out_;
    int depth_ = 0;
};

// Evaluates main (in literal mode when `literal` is set) to a protocol.
struct Expansion {
    Protocol pi;
    Emitted emitted;
};

Expansion expand(const SourceProgram& prog, const Prime& p, bool literal = false);

}  // namespace mpcv
