#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "mpcv/error.hpp"
#include "mpcv/parse.hpp"
#include "mpcv/prelude_types.hpp"
#include "mpcv/report.hpp"

using namespace mpcv;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kUnknown = 3 };

struct RunConfig {
    std::uint64_t prime = 2;
    std::string backend = "enum";
    std::string solver_cmd;
    std::uint64_t budget = kDefaultBudget;
    double timeout = 60.0;
    std::string pre_path;
    std::string tape_path;
    std::string goal;
    std::string partition;
    std::string input;
    std::string output;
    std::string fn;
    bool json = false;
    bool bridge = false;
    std::string reading = "views";

    Prime field() const {
        if (!is_prime(prime)) fail(ErrorKind::Structural, std::to_string(prime) + " is not prime");
        return Prime(prime);
    }
    Solver solver() const {
        SolverConfig c;
        c.backend = backend == "smt" ? Backend::Smt : Backend::Enum;
        c.solver_cmd = solver_cmd;
        c.budget = budget;
        c.timeout_s = timeout;
        return Solver(field(), c);
    }
    Constraint pre() const { return pre_path.empty() ? cn::truth() : parse_constraint(read_file(pre_path)); }
};

bool is_source(const std::string& path) { return path.size() >= 4 && path.substr(path.size() - 4) == ".pre"; }

struct Loaded {
    Protocol pi;
    Hints hints;
};

Loaded load(const RunConfig& rc) {
    Prime p = rc.field();
    Loaded l;
    if (is_source(rc.input)) {
        SourceProgram prog = parse_source(read_file(rc.input));
        Evaluator ev(prog.cb);
        ev.exec(prog.main, {});
        l.pi = make_protocol(ev.out().cmds, p);
        for (const auto& h : ev.out().hints)
            if (!l.hints.emplace(h.target, h.term).second)
                fail(ErrorKind::Hint, "two hints for " + to_string(h.target));
    } else {
        OvtProgram o = parse_overture(read_file(rc.input), p);
        l.pi = o.pi;
        l.hints = o.hints;
    }
    return l;
}

std::set<ClientId> parse_clients(const std::string& s) {
    std::set<ClientId> out;
    if (s == "none" || s.empty()) return out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = s.find(',', i);
        if (j == std::string::npos) j = s.size();
        try {
            out.insert(std::stoll(s.substr(i, j - i)));
        } catch (const std::exception&) {
            fail(ErrorKind::Structural, "bad client list '" + s + "'");
        }
        i = j + 1;
    }
    return out;
}

// Partitions to report on: all of them, or the one whose corrupt set is --partition.
bool selected(const RunConfig& rc, const std::set<ClientId>& C) {
    return rc.partition.empty() || parse_clients(rc.partition) == C;
}

void check_filter(const RunConfig& rc, const std::set<ClientId>& fed) {
    if (rc.partition.empty()) return;
    std::set<ClientId> C = parse_clients(rc.partition), H;
    for (ClientId c : fed)
        if (!C.count(c)) H.insert(c);
    check_partition(fed, H, C);
}

std::string clients(const std::set<ClientId>& cs) {
    std::string s = "{";
    for (ClientId c : cs) s += (s.size() > 1 ? "," : "") + std::to_string(c);
    return s + "}";
}

void emit(const RunConfig& rc, const json& j, const std::string& text) {
    if (rc.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

int verdict_exit(Verdict v) { return v == Verdict::True ? kPass : v == Verdict::False ? kFail : kUnknown; }

int cmd_parse(const RunConfig& rc) {
    if (is_source(rc.input)) {
        SourceProgram prog = parse_source(read_file(rc.input));
        json fs = json::array();
        std::string text;
        for (const auto& f : prog.cb.funs) {
            json p = json::array();
            std::string ps;
            for (const auto& x : f.params) {
                p.push_back(x);
                ps += (ps.empty() ? "" : ", ") + x;
            }
            fs.push_back({{"name", f.name}, {"params", p}, {"protocol", f.protocol}, {"pre", f.pre.has_value()},
                          {"post", f.post.has_value()}});
            text += f.name + "(" + ps + ")" + (f.protocol ? " protocol" : "") + (f.pre ? " pre" : "") +
                    (f.post ? " post" : "") + "\n";
        }
        emit(rc, {{"functions", fs}, {"main_statements", prog.main.size()}}, text);
        return kPass;
    }
    Loaded l = load(rc);
    std::string text = print_protocol(l.pi);
    for (const auto& [x, t] : l.hints) text += to_string(x) + " as " + print_term(t) + ";\n";
    emit(rc, {{"protocol", print_protocol(l.pi)}, {"commands", l.pi.cmds.size()}, {"clients", to_json(l.pi.federation)}},
         text);
    return kPass;
}

int cmd_expand(const RunConfig& rc) {
    if (!is_source(rc.input)) fail(ErrorKind::Structural, "expand needs a .pre source file");
    Loaded l = load(rc);
    std::string text = print_protocol(l.pi);
    json hs = json::array();
    for (const auto& [x, t] : l.hints) {
        text += to_string(x) + " as " + print_term(t) + ";\n";
        hs.push_back({{"target", to_string(x)}, {"term", print_term(t)}});
    }
    emit(rc, {{"protocol", print_protocol(l.pi)}, {"hints", hs}}, text);
    return kPass;
}

int cmd_eval(const RunConfig& rc) {
    if (rc.tape_path.empty()) fail(ErrorKind::Structural, "eval needs --tape");
    Loaded l = load(rc);
    Memory m0 = memory_from_json(json::parse(read_file(rc.tape_path)), rc.field());
    Memory m = run(m0, l.pi);
    emit(rc, {{"final_memory", to_json(m)}}, print_memory(m) + "\n");
    return kPass;
}

int cmd_constraints(const RunConfig& rc) {
    Loaded l = load(rc);
    Constraint c = cn::conj(rc.pre(), toeq(l.pi));
    json cs = json::array();
    std::string text;
    for (const auto& k : conjuncts(c)) {
        cs.push_back(print_constraint(k));
        text += print_constraint(k) + "\n";
    }
    emit(rc, {{"conjuncts", cs}}, text);
    return kPass;
}

int cmd_prove(const RunConfig& rc) {
    if (rc.goal.empty()) fail(ErrorKind::Structural, "prove needs --goal");
    Loaded l = load(rc);
    Constraint pre = rc.pre();
    check_preprocessing(l.pi, pre);
    Constraint goal = parse_constraint(rc.goal);
    Solver s = rc.solver();
    EntailResult r = s.entails(cn::conj(pre, toeq(l.pi)), goal);
    json j = report_entail(goal, r);
    j["backend"] = rc.backend;
    j["prime"] = rc.prime;
    std::string text = to_string(r.verdict);
    if (r.countermodel) text += "\ncountermodel: " + print_memory(*r.countermodel);
    if (r.verdict == Verdict::Unknown) text += "\n" + r.detail;
    emit(rc, j, text + "\n");
    return verdict_exit(r.verdict);
}

int cmd_check_conf(const RunConfig& rc) {
    Loaded l = load(rc);
    Constraint pre = rc.pre();
    check_preprocessing(l.pi, pre);
    check_filter(rc, federation_with(l.pi, pre));
    Solver s = rc.solver();
    ConfTyping t = type_protocol_conf(l.pi, pre, l.hints, &s, true);
    std::vector<ConfVerdict> vs;
    std::string text;
    for (const auto& v : check_conf_all(t, l.pi, pre)) {
        if (!selected(rc, v.C)) continue;
        text += "H=" + clients(v.H) + " C=" + clients(v.C) + (v.pass ? " pass" : " FAIL leaks");
        for (const Var& x : v.leaked) text += " " + to_string(x);
        text += "\n";
        vs.push_back(v);
    }
    emit(rc, report_conf(t, vs), text);
    for (const auto& v : vs)
        if (!v.pass) return kFail;
    return kPass;
}

int cmd_check_int(const RunConfig& rc) {
    Loaded l = load(rc);
    Constraint pre = rc.pre();
    check_preprocessing(l.pi, pre);
    check_filter(rc, federation_with(l.pi, pre));
    Solver s = rc.solver();
    IntTyping t = type_protocol_integrity(l.pi, pre, &s, true);
    std::vector<IntVerdict> vs;
    std::string text;
    bool unknown = false;
    for (const auto& m : t.macs)
        if (m.side == Verdict::Unknown) unknown = true;
    for (const auto& v : check_int_all(t, l.pi, pre)) {
        if (!selected(rc, v.C)) continue;
        text += "H=" + clients(v.H) + " C=" + clients(v.C) + (v.pass ? " pass" : " FAIL");
        if (v.first_low) {
            text += " low " + to_string(*v.first_low) + " via";
            for (const Var& x : v.chain) text += " " + to_string(x);
        }
        text += "\n";
        vs.push_back(v);
    }
    emit(rc, report_int(t, vs), text);
    for (const auto& v : vs)
        if (!v.pass) return unknown ? kUnknown : kFail;
    return kPass;
}

int sig_exit(const std::vector<Obligation>& obs) {
    int code = kPass;
    for (const auto& o : obs) {
        if (o.verdict == Verdict::Unknown) return kUnknown;
        if (o.verdict == Verdict::False) code = kFail;
    }
    return code;
}

int cmd_verify_sig(const RunConfig& rc) {
    if (!is_source(rc.input)) fail(ErrorKind::Structural, "verify-sig needs a .pre source file");
    SourceProgram prog = parse_source(read_file(rc.input));
    Solver s = rc.solver();
    Sig sig = verify_codebase(prog.cb, s);
    json fs = json::array();
    std::string text;
    std::vector<Obligation> all;
    for (const auto& n : sig.order) {
        if (!rc.fn.empty() && n != rc.fn) continue;
        const PiType& T = sig.types.at(n);
        fs.push_back(report_pitype(T));
        text += n + (T.verified ? " verified" : " NOT verified") + "\n";
        for (const auto& o : T.obligations) {
            text += "  " + o.kind + " " + o.site + ": " + to_string(o.verdict) + "\n";
            if (o.countermodel) text += "    countermodel: " + print_memory(*o.countermodel) + "\n";
            all.push_back(o);
        }
    }
    if (!rc.fn.empty() && fs.empty()) fail(ErrorKind::Unbound, "no protocol function '" + rc.fn + "'");
    text += "solver queries: " + std::to_string(s.queries()) + "\n";
    emit(rc, {{"signatures", fs}, {"solver_queries", s.queries()}}, text);
    return sig_exit(all);
}

int cmd_typecheck(const RunConfig& rc) {
    if (!is_source(rc.input)) fail(ErrorKind::Structural, "typecheck needs a .pre source file");
    SourceProgram prog = parse_source(read_file(rc.input));
    Constraint pre = rc.pre();
    Solver s = rc.solver();
    Sig sig = verify_codebase(prog.cb, s);
    std::uint64_t sig_queries = s.queries();
    ProgramTyping t = typecheck_program(prog, sig, pre, s);
    check_filter(rc, federation_with(t.pi, pre));
    std::uint64_t main_queries = s.queries() - sig_queries;

    json j;
    json fs = json::array();
    std::string text;
    std::vector<Obligation> all;
    for (const auto& n : sig.order) {
        const PiType& T = sig.types.at(n);
        fs.push_back(report_pitype(T));
        text += n + (T.verified ? " verified" : " NOT verified") + "\n";
        all.insert(all.end(), T.obligations.begin(), T.obligations.end());
    }
    j["signatures"] = fs;
    json prog_j = report_program(t);
    for (const auto& o : t.obligations) {
        text += "main " + o.kind + " " + o.site + ": " + to_string(o.verdict) + "\n";
        all.push_back(o);
    }
    bool pass = true;
    json cps = json::array(), ips = json::array();
    for (std::size_t i = 0; i < t.conf_verdicts.size(); ++i) {
        const auto& cv = t.conf_verdicts[i];
        const auto& iv = t.int_verdicts[i];
        if (!selected(rc, cv.C)) continue;
        cps.push_back(prog_j["confidentiality"]["partitions"][i]);
        ips.push_back(prog_j["integrity"]["partitions"][i]);
        text += "H=" + clients(cv.H) + " C=" + clients(cv.C) + " conf " + (cv.pass ? "pass" : "FAIL") + " int " +
                (iv.pass ? "pass" : "FAIL") + "\n";
        pass = pass && cv.pass && iv.pass;
    }
    prog_j["confidentiality"]["partitions"] = cps;
    prog_j["integrity"]["partitions"] = ips;
    j["program"] = prog_j;
    j["solver_queries"] = {{"signatures", sig_queries}, {"main", main_queries}};
    text += "solver queries: signatures " + std::to_string(sig_queries) + ", main " + std::to_string(main_queries) + "\n";
    if (rc.bridge) {
        BridgeReport b = soundness_bridge(t, pre, s);
        j["bridge"] = report_bridge(b);
        text += "bridge disagreements: " + std::to_string(b.disagreements) + "\n";
        if (b.disagreements) pass = false;
    }
    emit(rc, j, text);
    int code = sig_exit(all);
    if (code != kPass) return code;
    return pass ? kPass : kFail;
}

int cmd_oracle(const RunConfig& rc, const std::string& which) {
    Loaded l = load(rc);
    Constraint pre = rc.pre();
    check_preprocessing(l.pi, pre);
    Protocol pi = with_federation(l.pi, pre);
    check_filter(rc, pi.federation);
    json rs = json::array();
    std::string text;
    bool pass = true;
    for (const auto& [H, C] : partitions(pi.federation)) {
        if (!selected(rc, C)) continue;
        OracleReport r = which == "gr"     ? check_gradual_release(pi, pre, H, C, rc.budget)
                         : which == "nimo" ? check_nimo(pi, pre, H, C, rc.budget)
                                           : check_integrity(pi, pre, H, C, rc.budget, 1ull << 12,
                                                             rc.reading == "views" ? IntegrityReading::Views
                                                                                   : IntegrityReading::Outputs);
        rs.push_back(report_oracle(r));
        text += r.property + " H=" + clients(H) + " C=" + clients(C) + (r.pass ? " pass" : " FAIL");
        if (r.bounded_adversary) text += " (bounded adversary)";
        if (r.witness) text += "\n  witness: " + print_memory(*r.witness);
        text += "\n";
        pass = pass && r.pass;
    }
    emit(rc, {{"reports", rs}, {"pass", pass}}, text);
    return pass ? kPass : kFail;
}

int cmd_emit_smtlib(const RunConfig& rc) {
    Loaded l = load(rc);
    Constraint world = cn::conj(rc.pre(), toeq(l.pi));
    Constraint q = rc.goal.empty() ? world : cn::conj(world, cn::neg(parse_constraint(rc.goal)));
    std::string script = emit_smtlib(q, rc.field());
    if (rc.output.empty()) {
        std::cout << script;
    } else {
        std::ofstream out(rc.output);
        if (!out) fail(ErrorKind::Structural, "cannot write " + rc.output);
        out << script;
    }
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mpcverify: verification of secure multiparty protocols"};
    app.require_subcommand(1);
    RunConfig rc;

    auto common = [&](CLI::App* sub, bool with_solver) {
        sub->add_option("input", rc.input, "Overture (.ovt) or Prelude (.pre) file")->required()->check(CLI::ExistingFile);
        sub->add_option("--prime,-p", rc.prime, "field size")->check(CLI::PositiveNumber);
        sub->add_option("--pre", rc.pre_path, "preprocessing constraint file")->check(CLI::ExistingFile);
        sub->add_flag("--json", rc.json, "machine-readable report");
        if (with_solver) {
            sub->add_option("--backend", rc.backend, "enum or smt")->check(CLI::IsMember({"enum", "smt"}));
            sub->add_option("--solver-cmd", rc.solver_cmd, "SMT-LIB solver command (stdin script, stdout answer)");
            sub->add_option("--budget", rc.budget, "enumeration budget")->check(CLI::PositiveNumber);
            sub->add_option("--timeout", rc.timeout, "solver timeout in seconds")->check(CLI::PositiveNumber);
        }
    };
    auto part = [&](CLI::App* sub) {
        sub->add_option("--partition", rc.partition, "only the partition with this corrupt set, e.g. 2,3 or none");
    };

    std::string which;
    auto* parse = app.add_subcommand("parse", "parse and pretty-print");
    common(parse, false);
    auto* expand = app.add_subcommand("expand", "expand Prelude into Overture");
    common(expand, false);
    auto* eval = app.add_subcommand("eval", "run the protocol on an initial memory");
    common(eval, false);
    eval->add_option("--tape", rc.tape_path, "JSON map from variable to value")->check(CLI::ExistingFile);
    auto* cons = app.add_subcommand("constraints", "print the equational constraints of the protocol");
    common(cons, false);
    auto* prove = app.add_subcommand("prove", "check that the protocol constraints entail a goal");
    common(prove, true);
    prove->add_option("--goal", rc.goal, "constraint to prove")->required();
    auto* conf = app.add_subcommand("check-conf", "confidentiality typing");
    common(conf, true);
    part(conf);
    auto* integ = app.add_subcommand("check-int", "integrity typing");
    common(integ, true);
    part(integ);
    auto* vsig = app.add_subcommand("verify-sig", "verify function signatures");
    common(vsig, true);
    vsig->add_option("--fn", rc.fn, "only report this function");
    auto* tc = app.add_subcommand("typecheck", "compositional type checking of a Prelude program");
    common(tc, true);
    part(tc);
    tc->add_flag("--bridge", rc.bridge, "compare with whole-program typing");
    auto* orc = app.add_subcommand("oracle", "brute-force hyperproperty oracles");
    orc->add_option("property", which, "gr, nimo or integrity")->required()->check(CLI::IsMember({"gr", "nimo", "integrity"}));
    common(orc, false);
    orc->add_option("--budget", rc.budget, "enumeration budget")->check(CLI::PositiveNumber);
    orc->add_option("--reading", rc.reading, "integrity: views (default) or outputs")
        ->check(CLI::IsMember({"views", "outputs"}));
    part(orc);
    auto* smt = app.add_subcommand("emit-smtlib", "write the SMT-LIB query for the protocol");
    common(smt, false);
    smt->add_option("--goal", rc.goal, "negated goal is conjoined when given");
    smt->add_option("-o,--output", rc.output, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? kPass : kUsage;
    }

    try {
        if (*parse) return cmd_parse(rc);
        if (*expand) return cmd_expand(rc);
        if (*eval) return cmd_eval(rc);
        if (*cons) return cmd_constraints(rc);
        if (*prove) return cmd_prove(rc);
        if (*conf) return cmd_check_conf(rc);
        if (*integ) return cmd_check_int(rc);
        if (*vsig) return cmd_verify_sig(rc);
        if (*tc) return cmd_typecheck(rc);
        if (*orc) return cmd_oracle(rc, which);
        if (*smt) return cmd_emit_smtlib(rc);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.kind() == ErrorKind::Solver || e.kind() == ErrorKind::Infeasible) return kUnknown;
        // a failing assert or a refuted hint is a property failure of the input
        if (e.kind() == ErrorKind::Assertion || e.kind() == ErrorKind::Hint) return kFail;
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
