#include "mpcv/parse.hpp"

#include <fstream>
#include <sstream>

#include "mpcv/error.hpp"

namespace mpcv {

OvtProgram parse_overture(const std::string& src, const Prime& p) {
    SourceProgram prog = parse_source(src);
    Expansion x = expand(prog, p, true);
    OvtProgram out{x.pi, {}};
    for (const auto& h : x.emitted.hints) {
        if (out.hints.count(h.target)) fail(ErrorKind::Structural, "two hints for " + to_string(h.target));
        out.hints[h.target] = h.term;
    }
    return out;
}

Constraint parse_constraint(const std::string& src) {
    CTmpl t = parse_constraint_template(src);
    Codebase none;
    EvalOptions opt;
    opt.literal_names = true;
    Evaluator ev(none, opt);
    return ev.eval_constraint(t, {});
}

Memory parse_memory(const std::string& src, const Prime& p) {
    Memory m;
    for (const Constraint& c : conjuncts(parse_constraint(src))) {
        if (c->kind != CNode::Kind::Eq || c->lhs->op != Op::Var || c->rhs->op != Op::Const)
            fail(ErrorKind::Syntax, "memory entries must have the form x == value");
        mpcv::bind(m, c->lhs->var, p.reduce(c->rhs->value));
    }
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Structural, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace mpcv
