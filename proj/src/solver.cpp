#include "mpcv/solver.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <map>
#include <sstream>

#include "mpcv/error.hpp"

#ifndef MPCV_PYTHON
#define MPCV_PYTHON "python3"
#endif
#ifndef MPCV_SOLVER_SCRIPT
#define MPCV_SOLVER_SCRIPT "ff_smt_solver.py"
#endif

namespace mpcv {

std::string to_string(Sat s) {
    switch (s) {
        case Sat::Sat: return "sat";
        case Sat::Unsat: return "unsat";
        case Sat::Unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::True: return "valid";
        case Verdict::False: return "invalid";
        case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(Backend b) { return b == Backend::Enum ? "enum" : "smt"; }

std::string default_solver_cmd() {
    if (const char* env = std::getenv("MPCV_SOLVER"); env && *env) return env;
    return std::string("'") + MPCV_PYTHON + "' '" + MPCV_SOLVER_SCRIPT + "'";
}

namespace {

// ---- polynomials over F_p, reduced to function-canonical form ----

using Mono = std::vector<std::pair<int, std::uint64_t>>;
using Poly = std::map<Mono, std::uint64_t>;

std::uint64_t reduce_exp(std::uint64_t e, const Prime& p) {
    if (e < p.value()) return e;
    return ((e - 1) % (p.value() - 1)) + 1;
}

void add_term(Poly& P, const Mono& m, std::uint64_t c, const Prime& p) {
    if (c == 0) return;
    auto [it, fresh] = P.emplace(m, c);
    if (!fresh) {
        it->second = p.add(it->second, c);
        if (it->second == 0) P.erase(it);
    }
}

Mono mono_mul(const Mono& a, const Mono& b, const Prime& p) {
    Mono r;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            r.emplace_back(a[i].first, reduce_exp(a[i].second + b[j].second, p));
            ++i;
            ++j;
        }
    }
    return r;
}

Poly pconst(std::uint64_t c, const Prime& p) {
    Poly P;
    add_term(P, {}, p.reduce(c), p);
    return P;
}

Poly padd(Poly a, const Poly& b, const Prime& p) {
    for (const auto& [m, c] : b) add_term(a, m, c, p);
    return a;
}

Poly pscale(const Poly& a, std::uint64_t k, const Prime& p) {
    Poly r;
    for (const auto& [m, c] : a) add_term(r, m, p.mul(c, k), p);
    return r;
}

Poly psub(Poly a, const Poly& b, const Prime& p) {
    for (const auto& [m, c] : b) add_term(a, m, p.neg(c), p);
    return a;
}

Poly pmul(const Poly& a, const Poly& b, const Prime& p) {
    Poly r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) add_term(r, mono_mul(ma, mb, p), p.mul(ca, cb), p);
    return r;
}

Poly from_term(const Term& t, const std::map<Var, int>& idx, const Prime& p) {
    switch (t->op) {
        case Op::Var: {
            Poly P;
            P.emplace(Mono{{idx.at(t->var), 1}}, 1);
            return P;
        }
        case Op::Const: return pconst(t->value, p);
        case Op::Add: return padd(from_term(t->kids[0], idx, p), from_term(t->kids[1], idx, p), p);
        case Op::Sub: return psub(from_term(t->kids[0], idx, p), from_term(t->kids[1], idx, p), p);
        case Op::Mul: return pmul(from_term(t->kids[0], idx, p), from_term(t->kids[1], idx, p), p);
        default: return from_term(toeq_expr(t, p), idx, p);
    }
}

// x := q in P
Poly subst(const Poly& P, int x, const Poly& q, const Prime& p) {
    std::map<std::uint64_t, Poly> powers;
    Poly r;
    for (const auto& [m, c] : P) {
        std::uint64_t e = 0;
        Mono rest;
        for (const auto& f : m) {
            if (f.first == x)
                e = f.second;
            else
                rest.push_back(f);
        }
        if (e == 0) {
            add_term(r, m, c, p);
            continue;
        }
        auto it = powers.find(e);
        if (it == powers.end()) {
            Poly acc = pconst(1, p);
            for (std::uint64_t k = 0; k < e; ++k) acc = pmul(acc, q, p);
            it = powers.emplace(e, std::move(acc)).first;
        }
        Poly term;
        term.emplace(rest, c);
        r = padd(std::move(r), pmul(term, it->second, p), p);
    }
    return r;
}

bool is_const(const Poly& P) { return P.empty() || (P.size() == 1 && P.begin()->first.empty()); }

std::uint64_t eval_poly(const Poly& P, const std::vector<std::uint64_t>& vals, const Prime& p) {
    std::uint64_t acc = 0;
    for (const auto& [m, c] : P) {
        std::uint64_t t = c;
        for (const auto& [x, e] : m) {
            t = p.mul(t, e == 1 ? vals[x] : p.pow(vals[x], e));
            if (t == 0) break;
        }
        acc = p.add(acc, t);
    }
    return acc;
}

void poly_vars(const Poly& P, std::set<int>& out) {
    for (const auto& [m, c] : P)
        for (const auto& f : m) out.insert(f.first);
}

// ---- formulas over polynomial atoms (atom means poly == 0) ----

struct PF {
    enum class K { Zero, And, Not, Bool };
    K k = K::Bool;
    Poly poly;
    bool b = true;
    std::vector<PF> kids;
};

PF to_pf(const Constraint& c, const std::map<Var, int>& idx, const Prime& p) {
    PF f;
    switch (c->kind) {
        case CNode::Kind::Eq:
            f.k = PF::K::Zero;
            f.poly = psub(from_term(c->lhs, idx, p), from_term(c->rhs, idx, p), p);
            break;
        case CNode::Kind::And:
            f.k = PF::K::And;
            for (const auto& k : c->kids) f.kids.push_back(to_pf(k, idx, p));
            break;
        case CNode::Kind::Not:
            f.k = PF::K::Not;
            f.kids.push_back(to_pf(c->kids[0], idx, p));
            break;
    }
    return f;
}

PF simplify(PF f) {
    switch (f.k) {
        case PF::K::Bool: return f;
        case PF::K::Zero:
            if (is_const(f.poly)) {
                PF r;
                r.b = f.poly.empty();
                return r;
            }
            return f;
        case PF::K::Not: {
            PF k = simplify(std::move(f.kids[0]));
            if (k.k == PF::K::Bool) {
                k.b = !k.b;
                return k;
            }
            f.kids[0] = std::move(k);
            return f;
        }
        case PF::K::And: {
            std::vector<PF> keep;
            for (auto& k : f.kids) {
                PF s = simplify(std::move(k));
                if (s.k == PF::K::Bool) {
                    if (!s.b) return s;
                    continue;
                }
                keep.push_back(std::move(s));
            }
            if (keep.empty()) return PF{};
            if (keep.size() == 1) return std::move(keep[0]);
            f.kids = std::move(keep);
            return f;
        }
    }
    return f;
}

void subst_pf(PF& f, int x, const Poly& q, const Prime& p) {
    if (f.k == PF::K::Zero) f.poly = subst(f.poly, x, q, p);
    for (auto& k : f.kids) subst_pf(k, x, q, p);
}

void pf_vars(const PF& f, std::set<int>& out) {
    if (f.k == PF::K::Zero) poly_vars(f.poly, out);
    for (const auto& k : f.kids) pf_vars(k, out);
}

bool eval_pf(const PF& f, const std::vector<std::uint64_t>& vals, const Prime& p) {
    switch (f.k) {
        case PF::K::Bool: return f.b;
        case PF::K::Zero: return eval_poly(f.poly, vals, p) == 0;
        case PF::K::Not: return !eval_pf(f.kids[0], vals, p);
        case PF::K::And:
            for (const auto& k : f.kids)
                if (!eval_pf(k, vals, p)) return false;
            return true;
    }
    return false;
}

// A variable occurring in P only as a degree-one monomial c*x.
std::optional<std::pair<int, std::uint64_t>> linear_var(const Poly& P) {
    std::map<int, int> occurrences;
    std::map<int, std::uint64_t> pure;
    for (const auto& [m, c] : P) {
        for (const auto& f : m) ++occurrences[f.first];
        if (m.size() == 1 && m[0].second == 1) pure[m[0].first] = c;
    }
    for (const auto& [x, c] : pure)
        if (occurrences[x] == 1) return std::make_pair(x, c);
    return std::nullopt;
}

}  // namespace

SatResult satisfiable_enum(const Constraint& e, const Prime& p, std::uint64_t budget) {
    std::set<Var> vs = vars_of(e);
    std::vector<Var> vars(vs.begin(), vs.end());
    std::map<Var, int> idx;
    for (int i = 0; i < static_cast<int>(vars.size()); ++i) idx[vars[i]] = i;

    std::vector<Poly> pos;
    std::vector<PF> rest;
    for (const auto& c : conjuncts(e)) {
        PF f = simplify(to_pf(c, idx, p));
        if (f.k == PF::K::Bool) {
            if (!f.b) return {Sat::Unsat, std::nullopt, "contradiction"};
        } else if (f.k == PF::K::Zero) {
            pos.push_back(std::move(f.poly));
        } else {
            rest.push_back(std::move(f));
        }
    }

    std::vector<std::pair<int, Poly>> elim;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            auto lin = linear_var(pos[i]);
            if (!lin) continue;
            auto [x, c] = *lin;
            Poly q = pos[i];
            q.erase(Mono{{x, 1}});
            q = pscale(q, p.neg(p.inv(c)), p);
            pos.erase(pos.begin() + static_cast<std::ptrdiff_t>(i));
            std::vector<Poly> next;
            for (auto& P : pos) {
                Poly s = subst(P, x, q, p);
                if (is_const(s)) {
                    if (!s.empty()) return {Sat::Unsat, std::nullopt, "contradiction after elimination"};
                    continue;
                }
                next.push_back(std::move(s));
            }
            pos = std::move(next);
            std::vector<PF> next_rest;
            for (auto& f : rest) {
                subst_pf(f, x, q, p);
                PF s = simplify(std::move(f));
                if (s.k == PF::K::Bool) {
                    if (!s.b) return {Sat::Unsat, std::nullopt, "contradiction after elimination"};
                    continue;
                }
                next_rest.push_back(std::move(s));
            }
            rest = std::move(next_rest);
            elim.emplace_back(x, std::move(q));
            changed = true;
            break;
        }
    }

    std::set<int> residual_set;
    for (const auto& P : pos) poly_vars(P, residual_set);
    for (const auto& f : rest) pf_vars(f, residual_set);
    std::vector<int> residual(residual_set.begin(), residual_set.end());

    std::uint64_t space = 1;
    for (std::size_t i = 0; i < residual.size(); ++i) {
        if (space > budget / p.value()) return {Sat::Unknown, std::nullopt, "enumeration infeasible"};
        space *= p.value();
    }

    std::vector<std::uint64_t> vals(vars.size(), 0);
    auto check = [&]() {
        for (const auto& P : pos)
            if (eval_poly(P, vals, p) != 0) return false;
        for (const auto& f : rest)
            if (!eval_pf(f, vals, p)) return false;
        return true;
    };

    bool found = false;
    for (std::uint64_t n = 0; n < space; ++n) {
        if (check()) {
            found = true;
            break;
        }
        for (int x : residual) {
            if (++vals[x] < p.value()) break;
            vals[x] = 0;
        }
    }
    if (!found) return {Sat::Unsat, std::nullopt, "exhausted " + std::to_string(space) + " assignments"};

    for (auto it = elim.rbegin(); it != elim.rend(); ++it) vals[it->first] = eval_poly(it->second, vals, p);
    Memory model;
    for (std::size_t i = 0; i < vars.size(); ++i) model[vars[i]] = vals[i];
    if (!holds(e, model, p)) fail(ErrorKind::Solver, "internal: reconstructed model does not satisfy the constraint");
    return {Sat::Sat, model, ""};
}

// ---- SMT-LIB ----

namespace {

std::string smt_symbol(const Var& v) { return "|" + to_string(v) + "|"; }

std::string smt_term(const Term& t, const Prime& p) {
    switch (t->op) {
        case Op::Var: return smt_symbol(t->var);
        case Op::Const: return "(as ff" + std::to_string(p.reduce(t->value)) + " F)";
        case Op::Add: return "(ff.add " + smt_term(t->kids[0], p) + " " + smt_term(t->kids[1], p) + ")";
        case Op::Sub:
            return "(ff.add " + smt_term(t->kids[0], p) + " (ff.neg " + smt_term(t->kids[1], p) + "))";
        case Op::Mul: return "(ff.mul " + smt_term(t->kids[0], p) + " " + smt_term(t->kids[1], p) + ")";
        default: return smt_term(toeq_expr(t, p), p);
    }
}

std::string smt_formula(const Constraint& c, const Prime& p) {
    switch (c->kind) {
        case CNode::Kind::Eq: return "(= " + smt_term(c->lhs, p) + " " + smt_term(c->rhs, p) + ")";
        case CNode::Kind::Not: return "(not " + smt_formula(c->kids[0], p) + ")";
        case CNode::Kind::And: {
            std::string s = "(and";
            for (const auto& k : c->kids) s += " " + smt_formula(k, p);
            return s + ")";
        }
    }
    return "";
}

struct ProcResult {
    bool ok = false;
    bool timed_out = false;
    int status = -1;
    std::string out;
};

ProcResult run_process(const std::string& cmd, const std::string& input, double timeout_s) {
    ProcResult res;
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0) return res;
    if (pipe(out_pipe) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        return res;
    }
    pid_t pid = fork();
    if (pid < 0) return res;
    if (pid == 0) {
        dup2(in_pipe[0], 0);
        dup2(out_pipe[1], 1);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        setpgid(0, 0);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    signal(SIGPIPE, SIG_IGN);

    std::size_t written = 0;
    while (written < input.size()) {
        ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            break;
        }
        written += static_cast<std::size_t>(n);
    }
    close(in_pipe[1]);

    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    char buf[4096];
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            res.timed_out = true;
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            break;
        }
        pollfd pfd{out_pipe[0], POLLIN, 0};
        int r = poll(&pfd, 1, static_cast<int>(left.count()));
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) continue;
        ssize_t n = read(out_pipe[0], buf, sizeof buf);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        res.out.append(buf, static_cast<std::size_t>(n));
    }
    close(out_pipe[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    res.status = status;
    res.ok = !res.timed_out && WIFEXITED(status);
    return res;
}

std::optional<std::uint64_t> parse_value(const std::string& s, std::size_t& i, const Prime& p) {
    auto signed_int = [&](std::size_t& j) -> std::optional<std::uint64_t> {
        bool negv = false;
        if (j < s.size() && s[j] == '-') {
            negv = true;
            ++j;
        }
        if (j >= s.size() || !std::isdigit(static_cast<unsigned char>(s[j]))) return std::nullopt;
        unsigned __int128 v = 0;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) v = v * 10 + (s[j++] - '0');
        std::uint64_t r = static_cast<std::uint64_t>(v % p.value());
        if (negv) r = p.neg(r);
        return r;
    };
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (s.compare(i, 2, "#f") == 0) {
        i += 2;
        auto v = signed_int(i);
        return v;
    }
    if (s.compare(i, 6, "(as ff") == 0) {
        i += 6;
        auto v = signed_int(i);
        return v;
    }
    return std::nullopt;
}

}  // namespace

std::string emit_smtlib(const Constraint& e, const Prime& p) {
    std::ostringstream os;
    os << "(set-option :produce-models true)\n";
    os << "(set-logic QF_FF)\n";
    os << "(define-sort F () (_ FiniteField " << p.value() << "))\n";
    std::set<Var> vs = vars_of(e);
    for (const Var& v : vs) os << "(declare-fun " << smt_symbol(v) << " () F)\n";
    for (const auto& c : conjuncts(e)) {
        if (is_truth(c)) continue;
        os << "(assert " << smt_formula(c, p) << ")\n";
    }
    os << "(check-sat)\n";
    if (!vs.empty()) {
        os << "(get-value (";
        bool first = true;
        for (const Var& v : vs) {
            os << (first ? "" : " ") << smt_symbol(v);
            first = false;
        }
        os << "))\n";
    }
    return os.str();
}

SatResult satisfiable_smt(const Constraint& e, const Prime& p, const std::string& cmd, double timeout_s) {
    std::string script = emit_smtlib(e, p);
    ProcResult pr = run_process(cmd, script, timeout_s);
    if (pr.timed_out) return {Sat::Unknown, std::nullopt, "solver timeout"};
    std::istringstream is(pr.out);
    std::string first;
    is >> first;
    if (first == "unsat") return {Sat::Unsat, std::nullopt, ""};
    if (first != "sat") {
        std::string msg = pr.out.substr(0, 200);
        return {Sat::Unknown, std::nullopt, first.empty() ? "solver produced no verdict" : "solver: " + msg};
    }

    std::map<std::string, Var> by_symbol;
    for (const Var& v : vars_of(e)) by_symbol.emplace(to_string(v), v);
    Memory model;
    for (const auto& [name, v] : by_symbol) model[v] = 0;
    const std::string& s = pr.out;
    for (std::size_t i = s.find("(|"); i != std::string::npos; i = s.find("(|", i)) {
        std::size_t end = s.find('|', i + 2);
        if (end == std::string::npos) break;
        std::string name = s.substr(i + 2, end - i - 2);
        std::size_t j = end + 1;
        auto v = parse_value(s, j, p);
        auto it = by_symbol.find(name);
        if (v && it != by_symbol.end()) model[it->second] = *v;
        i = j;
    }
    if (!holds(e, model, p)) return {Sat::Unknown, std::nullopt, "solver model failed validation"};
    return {Sat::Sat, model, ""};
}

SatResult Solver::satisfiable(const Constraint& e) {
    ++queries_;
    if (cfg_.backend == Backend::Enum) return satisfiable_enum(e, p_, cfg_.budget);
    std::string cmd = cfg_.solver_cmd.empty() ? default_solver_cmd() : cfg_.solver_cmd;
    return satisfiable_smt(e, p_, cmd, cfg_.timeout_s);
}

EntailResult Solver::entails(const Constraint& e1, const Constraint& e2) {
    SatResult r = satisfiable(cn::conj(e1, cn::neg(e2)));
    switch (r.verdict) {
        case Sat::Unsat: return {Verdict::True, std::nullopt, r.detail};
        case Sat::Sat: return {Verdict::False, r.model, r.detail};
        case Sat::Unknown: return {Verdict::Unknown, std::nullopt, r.detail};
    }
    return {};
}

}  // namespace mpcv
