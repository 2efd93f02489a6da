#include <sstream>

#include "mpcv/error.hpp"
#include "mpcv/prelude.hpp"

namespace mpcv {

Value Value::of_num(std::int64_t n) {
    Value v;
    v.kind = Kind::Num;
    v.num = n;
    return v;
}

Value Value::of_str(std::string s) {
    Value v;
    v.kind = Kind::Str;
    v.str = std::move(s);
    return v;
}

namespace {

Value of_field(Expr e, ClientId loc = 0) {
    Value v;
    v.kind = Value::Kind::Field;
    v.field = std::move(e);
    v.loc = loc;
    return v;
}

[[noreturn]] void bad(int line, ErrorKind k, const std::string& msg) {
    fail(k, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + msg);
}

Expr as_field(const Value& v, int line) {
    if (v.kind == Value::Kind::Field) return v.field;
    if (v.kind == Value::Kind::Num) {
        if (v.num < 0) return ex::neg(ex::cnst(static_cast<std::uint64_t>(-v.num)));
        return ex::cnst(static_cast<std::uint64_t>(v.num));
    }
    bad(line, ErrorKind::Structural, "expected a field expression, got " + print_value(v));
}

ClientId as_client(const Value& v, int line) {
    if (v.kind != Value::Kind::Num || v.num <= 0) bad(line, ErrorKind::Structural, "expected a client id, got " + print_value(v));
    return v.num;
}

std::string as_name(const Value& v, int line) {
    if (v.kind == Value::Kind::Str) return v.str;
    if (v.kind == Value::Kind::Num) return std::to_string(v.num);
    bad(line, ErrorKind::Structural, "expected an identifier string, got " + print_value(v));
}

const Var& as_var(const Value& v, int line) {
    if (v.kind != Value::Kind::Field || v.field->op != Op::Var) bad(line, ErrorKind::Structural, "expected a variable");
    return v.field->var;
}

}  // namespace

std::string print_value(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Unit: return "()";
        case Value::Kind::Num: return std::to_string(v.num);
        case Value::Kind::Str: return "\"" + v.str + "\"";
        case Value::Kind::Field: return print_term(v.field);
        case Value::Kind::Record: {
            std::string s = "{ ";
            for (const auto& [k, x] : v.rec) s += k + " = " + print_value(x) + "; ";
            return s + "}";
        }
        case Value::Kind::List: {
            std::string s = "[";
            for (std::size_t i = 0; i < v.list.size(); ++i) s += (i ? ", " : "") + print_value(v.list[i]);
            return s + "]";
        }
    }
    return "?";
}

Value Evaluator::eval(const MExprP& e, const std::map<std::string, Value>& env) {
    auto sub = [&](std::size_t i) { return eval(e->kids[i], env); };
    auto fld = [&](std::size_t i) { return as_field(sub(i), e->line); };
    switch (e->k) {
        case MK::Num: return Value::of_num(static_cast<std::int64_t>(e->num));
        case MK::Str: return Value::of_str(e->s);
        case MK::Name: {
            auto it = env.find(e->s);
            if (it == env.end()) bad(e->line, ErrorKind::Unbound, "unbound name '" + e->s + "'");
            return it->second;
        }
        case MK::Concat: {
            Value a = sub(0), b = sub(1);
            if (a.kind != Value::Kind::Str || b.kind != Value::Kind::Str)
                bad(e->line, ErrorKind::Structural, "'++' needs strings");
            return Value::of_str(a.str + b.str);
        }
        case MK::Record: {
            Value r;
            r.kind = Value::Kind::Record;
            for (std::size_t i = 0; i < e->kids.size(); ++i) r.rec[e->fields[i]] = sub(i);
            return r;
        }
        case MK::Proj: {
            Value r = sub(0);
            if (r.kind != Value::Kind::Record) bad(e->line, ErrorKind::Structural, "projection from a non-record");
            auto it = r.rec.find(e->s);
            if (it == r.rec.end()) bad(e->line, ErrorKind::Structural, "record has no field '" + e->s + "'");
            return it->second;
        }
        case MK::List: {
            Value l;
            l.kind = Value::Kind::List;
            for (std::size_t i = 0; i < e->kids.size(); ++i) l.list.push_back(sub(i));
            return l;
        }
        case MK::Call: {
            std::vector<Value> args;
            for (std::size_t i = 0; i < e->kids.size(); ++i) args.push_back(sub(i));
            return call(e->s, args);
        }
        case MK::FVar: {
            if (e->kids.empty()) return of_field(ex::var(mpcv::out(0)));
            const MExprP& n = e->kids[0];
            std::string name;
            if (n->k == MK::Name && !env.count(n->s) && (opt_.literal_names || n->s == "local"))
                name = n->s;
            else
                name = as_name(eval(n, env), e->line);
            return of_field(ex::var(Var{e->vk, name, 0}));
        }
        case MK::Add: return of_field(ex::add(fld(0), fld(1)));
        case MK::Sub: return of_field(ex::sub(fld(0), fld(1)));
        case MK::Mul: return of_field(ex::mul(fld(0), fld(1)));
        case MK::Neg: return of_field(ex::neg(fld(0)));
        case MK::Not: return of_field(ex::lnot(fld(0)));
        case MK::Mux: return of_field(ex::mux(fld(0), fld(1), fld(2)));
        case MK::At: {
            ClientId c = as_client(sub(1), e->line);
            return of_field(locate(fld(0), c), c);
        }
        case MK::OT: {
            Value ch = sub(0);
            ClientId recv = e->kids.size() == 4 ? as_client(sub(3), e->line) : ch.loc;
            if (recv == 0) bad(e->line, ErrorKind::Structural, "OT choice must be located at the receiver, e.g. OT(x@2, a, b)");
            Expr c = locate(as_field(ch, e->line), recv);
            return of_field(ex::ot(c, fld(1), fld(2), recv));
        }
        case MK::OT4: {
            ClientId recv = as_client(sub(3), e->line);
            ClientId send = e->kids.size() == 5 ? as_client(sub(4), e->line) : 0;
            Value table = sub(2);
            std::vector<Expr> rows;
            if (table.kind == Value::Kind::Record) {
                for (const char* f : {"row1", "row2", "row3", "row4"}) {
                    auto it = table.rec.find(f);
                    if (it == table.rec.end()) bad(e->line, ErrorKind::Structural, std::string("OT4 table lacks ") + f);
                    rows.push_back(as_field(it->second, e->line));
                }
            } else if (table.kind == Value::Kind::List && table.list.size() == 4) {
                for (const auto& r : table.list) rows.push_back(as_field(r, e->line));
            } else {
                bad(e->line, ErrorKind::Structural, "OT4 table must be a record row1..row4 or a 4-element list");
            }
            if (send)
                for (auto& r : rows) r = locate(r, send);
            Expr b1 = locate(fld(0), recv), b2 = locate(fld(1), recv);
            return of_field(ex::ot4(b1, b2, rows, recv), send);
        }
    }
    return {};
}

Value Evaluator::exec(const Seq& s, std::map<std::string, Value> env) {
    Value last;
    for (const Instr& i : s) {
        switch (i.k) {
            case Instr::Kind::Assign: {
                Value t = eval(i.a, env);
                const Var& x = as_var(t, i.line);
                if (x.kind != VarKind::Reveal && x.owner == 0)
                    bad(i.line, ErrorKind::Structural, "assignment target " + to_string(x) + " needs a client");
                Value rhs = eval(i.b, env);
                if (rhs.loc == 0)
                    bad(i.line, ErrorKind::Structural, "cannot tell which client computes the right-hand side of " + to_string(x));
                out_.cmds.push_back(Cmd::assign(x, rhs.loc, locate(as_field(rhs, i.line), rhs.loc)));
                last = Value{};
                break;
            }
            case Instr::Kind::Assert: {
                ClientId c = as_client(eval(i.c, env), i.line);
                Expr l = locate(as_field(eval(i.a, env), i.line), c);
                Expr r = locate(as_field(eval(i.b, env), i.line), c);
                out_.cmds.push_back(Cmd::assertion(l, r, c));
                last = Value{};
                break;
            }
            case Instr::Kind::Let: {
                auto inner = env;
                inner[i.name] = eval(i.a, env);
                last = exec(i.body, std::move(inner));
                break;
            }
            case Instr::Kind::Hint: {
                Value t = eval(i.a, env);
                const Var& x = as_var(t, i.line);
                if (x.kind != VarKind::Reveal && x.owner == 0)
                    bad(i.line, ErrorKind::Structural, "hinted variable " + to_string(x) + " needs a client");
                Expr term = as_field(eval(i.b, env), i.line);
                for (const Var& v : vars_of(term))
                    if (v.kind != VarKind::Reveal && v.owner == 0)
                        bad(i.line, ErrorKind::Structural, "unlocated variable " + to_string(v) + " in hint");
                if (opt_.keep_hints) out_.hints.push_back({x, term, depth_});
                last = Value{};
                break;
            }
            case Instr::Kind::Expr: last = eval(i.a, env); break;
        }
    }
    return last;
}

Value Evaluator::call(const std::string& fn, const std::vector<Value>& args) {
    const FunDef* f = cb_.find(fn);
    if (!f) fail(ErrorKind::Unbound, "call to undefined function '" + fn + "'");
    if (args.size() != f->params.size())
        fail(ErrorKind::Structural, fn + " expects " + std::to_string(f->params.size()) + " arguments, got " +
                                        std::to_string(args.size()));
    std::map<std::string, Value> env;
    for (std::size_t i = 0; i < args.size(); ++i) env[f->params[i]] = args[i];
    if (!f->protocol) return exec(f->body, std::move(env));

    std::size_t idx = out_.calls.size();
    CallSite cs;
    cs.fn = fn;
    cs.args = args;
    cs.cmd_begin = out_.cmds.size();
    cs.hint_begin = out_.hints.size();
    cs.call_begin = idx + 1;
    cs.depth = depth_ + 1;
    out_.calls.push_back(cs);
    ++depth_;
    Value r = exec(f->body, std::move(env));
    --depth_;
    CallSite& done = out_.calls[idx];
    done.cmd_end = out_.cmds.size();
    done.hint_end = out_.hints.size();
    done.call_end = out_.calls.size();
    return r;
}

namespace {

Term as_term(const Value& v, int line) {
    Expr e = desugar(as_field(v, line));
    if (has_ot(e)) bad(line, ErrorKind::Structural, "OT is not allowed in constraints");
    for (const Var& x : vars_of(e))
        if (x.kind != VarKind::Reveal && x.owner == 0)
            bad(line, ErrorKind::Structural, "unlocated variable " + to_string(x) + " in constraint");
    return e;
}

}  // namespace

Constraint Evaluator::eval_constraint(const CTmpl& c, const std::map<std::string, Value>& env) {
    switch (c.k) {
        case CTmpl::Kind::True: return cn::truth();
        case CTmpl::Kind::Eq:
            return cn::eq(as_term(eval(c.lhs, env), c.lhs->line), as_term(eval(c.rhs, env), c.rhs->line));
        case CTmpl::Kind::And: {
            std::vector<Constraint> cs;
            for (const auto& k : c.kids) cs.push_back(eval_constraint(k, env));
            return cn::conj(cs);
        }
        case CTmpl::Kind::Not: return cn::neg(eval_constraint(c.kids[0], env));
    }
    return cn::truth();
}

Expansion expand(const SourceProgram& prog, const Prime& p, bool literal) {
    EvalOptions opt;
    opt.literal_names = literal;
    Evaluator ev(prog.cb, opt);
    ev.exec(prog.main, {});
    Expansion x;
    x.emitted = ev.out();
    x.pi = make_protocol(x.emitted.cmds, p);
    return x;
}

}  // namespace mpcv
