#include "mpcv/ast.hpp"

#include <map>
#include <sstream>

#include "mpcv/error.hpp"

namespace mpcv {

Var secret(std::string w, ClientId i) { return {VarKind::Secret, std::move(w), i}; }
Var flip(std::string w, ClientId i) { return {VarKind::Flip, std::move(w), i}; }
Var mesg(std::string w, ClientId i) { return {VarKind::Mesg, std::move(w), i}; }
Var reveal(std::string w) { return {VarKind::Reveal, std::move(w), 0}; }
Var out(ClientId i) { return {VarKind::Out, "", i}; }

namespace {

const std::set<std::string> kKeywords = {"let", "in", "as", "assert", "pre", "post", "not",
                                         "mux", "OT", "OT4", "out", "s", "r", "m", "p"};

bool ident_like(const std::string& w) {
    if (w.empty()) return false;
    bool digits = true;
    for (char c : w)
        if (c < '0' || c > '9') digits = false;
    if (digits) return true;
    if (!(std::isalpha(static_cast<unsigned char>(w[0])) || w[0] == '_')) return false;
    for (char c : w)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return !kKeywords.count(w);
}

char kind_letter(VarKind k) {
    switch (k) {
        case VarKind::Secret: return 's';
        case VarKind::Flip: return 'r';
        case VarKind::Mesg: return 'm';
        case VarKind::Reveal: return 'p';
        case VarKind::Out: return 'o';
    }
    return '?';
}

}  // namespace

std::string quote_name(const std::string& w) { return ident_like(w) ? w : "\"" + w + "\""; }

std::string to_string(const Var& v) {
    if (v.kind == VarKind::Out) return "out@" + std::to_string(v.owner);
    std::string s = std::string(1, kind_letter(v.kind)) + "[" + quote_name(v.name) + "]";
    if (v.owner != 0) s += "@" + std::to_string(v.owner);
    return s;
}

namespace ex {

static Expr node(Op op, std::vector<Expr> kids, ClientId recv = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = std::move(kids);
    n->recv = recv;
    return n;
}

Expr var(const Var& v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->var = v;
    return n;
}
Expr cnst(std::uint64_t v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}
Expr add(Expr a, Expr b) { return node(Op::Add, {std::move(a), std::move(b)}); }
Expr sub(Expr a, Expr b) { return node(Op::Sub, {std::move(a), std::move(b)}); }
Expr mul(Expr a, Expr b) { return node(Op::Mul, {std::move(a), std::move(b)}); }
Expr neg(Expr a) { return node(Op::Neg, {std::move(a)}); }
Expr lnot(Expr a) { return node(Op::Not, {std::move(a)}); }
Expr mux(Expr c, Expr a, Expr b) { return node(Op::Mux, {std::move(c), std::move(a), std::move(b)}); }
Expr ot(Expr choice, Expr e2, Expr e3, ClientId recv) {
    return node(Op::OT, {std::move(choice), std::move(e2), std::move(e3)}, recv);
}
Expr ot4(Expr b1, Expr b2, std::vector<Expr> rows, ClientId recv) {
    if (rows.size() != 4) fail(ErrorKind::Structural, "OT4 needs exactly four rows");
    std::vector<Expr> kids{std::move(b1), std::move(b2)};
    for (auto& r : rows) kids.push_back(std::move(r));
    return node(Op::OT4, std::move(kids), recv);
}

}  // namespace ex

bool equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (a->op != b->op || a->recv != b->recv || a->kids.size() != b->kids.size()) return false;
    if (a->op == Op::Var && !(a->var == b->var)) return false;
    if (a->op == Op::Const && a->value != b->value) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
    return true;
}

void collect_vars(const Expr& e, std::set<Var>& out) {
    if (e->op == Op::Var) out.insert(e->var);
    for (const auto& k : e->kids) collect_vars(k, out);
}

std::set<Var> vars_of(const Expr& e) {
    std::set<Var> s;
    collect_vars(e, s);
    return s;
}

bool has_ot(const Expr& e) {
    if (e->op == Op::OT || e->op == Op::OT4) return true;
    for (const auto& k : e->kids)
        if (has_ot(k)) return true;
    return false;
}

Expr desugar(const Expr& e) {
    switch (e->op) {
        case Op::Var:
        case Op::Const: return e;
        case Op::Not: return ex::sub(ex::cnst(1), desugar(e->kids[0]));
        case Op::Neg: return ex::sub(ex::cnst(0), desugar(e->kids[0]));
        case Op::Mux: {
            auto c = desugar(e->kids[0]);
            return ex::add(ex::mul(ex::sub(ex::cnst(1), c), desugar(e->kids[1])), ex::mul(c, desugar(e->kids[2])));
        }
        default: {
            auto n = std::make_shared<Node>(*e);
            for (auto& k : n->kids) k = desugar(k);
            return n;
        }
    }
}

Expr locate(const Expr& e, ClientId c) {
    if (e->op == Op::Var) {
        if (e->var.owner != 0 || e->var.kind == VarKind::Reveal) return e;
        Var v = e->var;
        v.owner = c;
        return ex::var(v);
    }
    if (e->op == Op::Const) return e;
    auto n = std::make_shared<Node>(*e);
    std::size_t nchoice = e->op == Op::OT ? 1 : e->op == Op::OT4 ? 2 : 0;
    for (std::size_t i = 0; i < n->kids.size(); ++i) n->kids[i] = locate(n->kids[i], i < nchoice ? e->recv : c);
    return n;
}

Cmd Cmd::assign(Var target, ClientId src, Expr body) {
    Cmd c;
    c.kind = Kind::Assign;
    c.target = std::move(target);
    c.client = src;
    c.body = std::move(body);
    return c;
}

Cmd Cmd::assertion(Expr lhs, Expr rhs, ClientId at) {
    Cmd c;
    c.kind = Kind::Assert;
    c.client = at;
    c.body = std::move(lhs);
    c.rhs = std::move(rhs);
    return c;
}

namespace {

void check_owned(const Expr& e, ClientId at, const std::string& where) {
    if (e->op == Op::Var) {
        const Var& v = e->var;
        if (v.kind == VarKind::Out) fail(ErrorKind::Ownership, where + ": outputs cannot be read");
        if (v.kind == VarKind::Reveal) return;
        if (v.owner != at)
            fail(ErrorKind::Ownership, where + ": " + to_string(v) + " is not visible at client " + std::to_string(at));
        return;
    }
    std::size_t nchoice = e->op == Op::OT ? 1 : e->op == Op::OT4 ? 2 : 0;
    for (std::size_t i = 0; i < e->kids.size(); ++i) check_owned(e->kids[i], i < nchoice ? e->recv : at, where);
}

void collect_clients(const Expr& e, std::set<ClientId>& out) {
    if (e->op == Op::Var && e->var.owner != 0) out.insert(e->var.owner);
    if (e->op == Op::OT || e->op == Op::OT4) out.insert(e->recv);
    for (const auto& k : e->kids) collect_clients(k, out);
}

}  // namespace

void check_well_formed(const Protocol& pi) {
    std::map<Var, std::size_t> assigned_at;
    for (std::size_t i = 0; i < pi.cmds.size(); ++i) {
        const Cmd& c = pi.cmds[i];
        std::string where = "command " + std::to_string(i + 1);
        if (c.client <= 0) fail(ErrorKind::Structural, where + ": missing computing client");
        if (c.kind == Cmd::Kind::Assign) {
            const Var& t = c.target;
            switch (t.kind) {
                case VarKind::Secret:
                case VarKind::Flip: fail(ErrorKind::Structural, where + ": cannot assign " + to_string(t));
                case VarKind::Mesg:
                    if (t.owner <= 0) fail(ErrorKind::Structural, where + ": message target needs an owner");
                    break;
                case VarKind::Reveal:
                    if (t.owner != 0) fail(ErrorKind::Structural, where + ": reveals are public");
                    break;
                case VarKind::Out:
                    if (t.owner != c.client)
                        fail(ErrorKind::Structural, where + ": out@" + std::to_string(t.owner) +
                                                        " must be computed at client " + std::to_string(t.owner));
                    break;
            }
            if (!assigned_at.emplace(t, i).second)
                fail(ErrorKind::Structural, where + ": " + to_string(t) + " is assigned twice");
            check_owned(c.body, c.client, where);
        } else {
            check_owned(c.body, c.client, where);
            check_owned(c.rhs, c.client, where);
        }
    }
    for (std::size_t i = 0; i < pi.cmds.size(); ++i) {
        const Cmd& c = pi.cmds[i];
        std::set<Var> used = vars_of(c.body);
        if (c.rhs) collect_vars(c.rhs, used);
        for (const Var& v : used) {
            auto it = assigned_at.find(v);
            if (it != assigned_at.end() && it->second >= i)
                fail(ErrorKind::Structural,
                     "command " + std::to_string(i + 1) + ": " + to_string(v) + " is read before it is assigned");
        }
    }
}

Protocol make_protocol(std::vector<Cmd> cmds, Prime prime, std::set<ClientId> extra_clients) {
    Protocol pi;
    pi.cmds = std::move(cmds);
    pi.prime = prime;
    pi.federation = std::move(extra_clients);
    for (const Cmd& c : pi.cmds) {
        pi.federation.insert(c.client);
        if (c.kind == Cmd::Kind::Assign && c.target.owner != 0) pi.federation.insert(c.target.owner);
        collect_clients(c.body, pi.federation);
        if (c.rhs) collect_clients(c.rhs, pi.federation);
    }
    pi.federation.erase(0);
    check_well_formed(pi);
    return pi;
}

std::set<Var> assigned_vars(const Protocol& pi) {
    std::set<Var> s;
    for (const Cmd& c : pi.cmds)
        if (c.kind == Cmd::Kind::Assign) s.insert(c.target);
    return s;
}

std::set<Var> protocol_vars(const Protocol& pi) {
    std::set<Var> s = assigned_vars(pi);
    for (const Cmd& c : pi.cmds) {
        collect_vars(c.body, s);
        if (c.rhs) collect_vars(c.rhs, s);
    }
    return s;
}

RoleSets role_sets(const Protocol& pi) {
    RoleSets rs;
    for (const Var& v : protocol_vars(pi)) {
        switch (v.kind) {
            case VarKind::Secret: rs.S.insert(v); break;
            case VarKind::Flip: rs.R.insert(v); break;
            case VarKind::Mesg: rs.M.insert(v); break;
            case VarKind::Reveal: rs.P.insert(v); break;
            case VarKind::Out: rs.O.insert(v); break;
        }
    }
    rs.V = rs.M;
    rs.V.insert(rs.P.begin(), rs.P.end());
    return rs;
}

void check_partition(const std::set<ClientId>& fed, const std::set<ClientId>& H, const std::set<ClientId>& C) {
    for (ClientId h : H)
        if (C.count(h)) fail(ErrorKind::Structural, "client " + std::to_string(h) + " is both honest and corrupt");
    std::set<ClientId> all = H;
    all.insert(C.begin(), C.end());
    if (all != fed) fail(ErrorKind::Structural, "H and C do not cover the federation");
}

Views views_split(const Protocol& pi, const std::set<ClientId>& H, const std::set<ClientId>& C) {
    check_partition(pi.federation, H, C);
    Views v;
    for (const Cmd& c : pi.cmds) {
        if (c.kind != Cmd::Kind::Assign) continue;
        bool src_honest = H.count(c.client) > 0;
        if (c.target.kind == VarKind::Reveal) {
            (src_honest ? v.h_to_c : v.c_to_h).insert(c.target);
        } else if (c.target.kind == VarKind::Mesg) {
            bool dst_honest = H.count(c.target.owner) > 0;
            if (src_honest && !dst_honest) v.h_to_c.insert(c.target);
            if (!src_honest && dst_honest) v.c_to_h.insert(c.target);
        }
    }
    return v;
}

namespace {

int level(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul: return 2;
        case Op::Neg:
        case Op::Not: return 3;
        default: return 4;
    }
}

// at < 0 prints every owner.
std::string pr(const Expr& e, ClientId at);

std::string wrap(const Expr& e, ClientId at, int min_level) {
    std::string s = pr(e, at);
    return level(e->op) < min_level ? "(" + s + ")" : s;
}

std::string pr_var(const Var& v, ClientId at) {
    if (v.kind == VarKind::Out || v.kind == VarKind::Reveal) return to_string(v);
    if (at >= 0 && v.owner == at) {
        Var u = v;
        u.owner = 0;
        return to_string(u);
    }
    return to_string(v);
}

std::string pr_located(const Expr& e, ClientId recv, ClientId at) {
    if (at < 0) return pr(e, at);
    if (e->op == Op::Var) return pr_var(e->var, -1);
    return "(" + pr(e, recv) + ")@" + std::to_string(recv);
}

std::string pr(const Expr& e, ClientId at) {
    switch (e->op) {
        case Op::Var: return pr_var(e->var, at);
        case Op::Const: return std::to_string(e->value);
        case Op::Add: return wrap(e->kids[0], at, 1) + " + " + wrap(e->kids[1], at, 2);
        case Op::Sub: return wrap(e->kids[0], at, 1) + " - " + wrap(e->kids[1], at, 2);
        case Op::Mul: return wrap(e->kids[0], at, 2) + " * " + wrap(e->kids[1], at, 3);
        case Op::Neg: return "-" + wrap(e->kids[0], at, 3);
        case Op::Not: return "!" + wrap(e->kids[0], at, 3);
        case Op::Mux: return "mux(" + pr(e->kids[0], at) + ", " + pr(e->kids[1], at) + ", " + pr(e->kids[2], at) + ")";
        case Op::OT:
            return "OT(" + pr_located(e->kids[0], e->recv, at) + ", " + pr(e->kids[1], at) + ", " +
                   pr(e->kids[2], at) + ")";
        case Op::OT4: {
            ClientId cat = at < 0 ? at : e->recv;
            std::string s = "OT4(" + pr(e->kids[0], cat) + ", " + pr(e->kids[1], cat) + ", [";
            for (int i = 2; i < 6; ++i) s += (i > 2 ? ", " : "") + pr(e->kids[i], at);
            return s + "], " + std::to_string(e->recv) + ")";
        }
    }
    return "?";
}

}  // namespace

std::string print_expr(const Expr& e, ClientId at) { return pr(e, at); }
std::string print_term(const Expr& e) { return pr(e, -1); }

std::string print_cmd(const Cmd& c) {
    std::string at = std::to_string(c.client);
    if (c.kind == Cmd::Kind::Assert)
        return "assert(" + pr(c.body, c.client) + " = " + pr(c.rhs, c.client) + ")@" + at + ";";
    return to_string(c.target) + " := (" + pr(c.body, c.client) + ")@" + at + ";";
}

std::string print_protocol(const Protocol& pi) {
    std::ostringstream os;
    for (const Cmd& c : pi.cmds) os << print_cmd(c) << "\n";
    return os.str();
}

}  // namespace mpcv
