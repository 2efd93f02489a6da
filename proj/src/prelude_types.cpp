#include "mpcv/prelude_types.hpp"

#include <functional>

#include "mpcv/error.hpp"
#include "mpcv/pmf.hpp"

namespace mpcv {

bool Sig::all_verified() const {
    for (const auto& [n, t] : types)
        if (!t.verified) return false;
    return true;
}

ObligationCounts count_obligations(const std::vector<Obligation>& obs) {
    ObligationCounts c;
    for (const auto& o : obs) {
        if (o.kind == "pre") ++c.pre;
        if (o.kind == "post") ++c.post;
        if (o.kind == "hint") ++c.hint;
        if (o.kind == "mac") ++c.mac;
    }
    return c;
}

namespace {

void client_names(const MExprP& e, bool client_pos, std::set<std::string>& out, const Codebase& cb,
                  const std::function<std::vector<ParamKind>(const std::string&)>& kinds_of) {
    if (!e) return;
    if (client_pos && e->k == MK::Name) out.insert(e->s);
    switch (e->k) {
        case MK::At:
            client_names(e->kids[0], false, out, cb, kinds_of);
            client_names(e->kids[1], true, out, cb, kinds_of);
            return;
        case MK::OT:
        case MK::OT4:
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                bool cp = (e->k == MK::OT && i == 3) || (e->k == MK::OT4 && i >= 3);
                client_names(e->kids[i], cp, out, cb, kinds_of);
            }
            return;
        case MK::Call: {
            std::vector<ParamKind> ks = kinds_of(e->s);
            for (std::size_t i = 0; i < e->kids.size(); ++i)
                client_names(e->kids[i], i < ks.size() && ks[i] == ParamKind::Client, out, cb, kinds_of);
            return;
        }
        default:
            for (const auto& k : e->kids) client_names(k, false, out, cb, kinds_of);
    }
}

void client_names(const CTmpl& c, std::set<std::string>& out, const Codebase& cb,
                  const std::function<std::vector<ParamKind>(const std::string&)>& kinds_of) {
    client_names(c.lhs, false, out, cb, kinds_of);
    client_names(c.rhs, false, out, cb, kinds_of);
    for (const auto& k : c.kids) client_names(k, out, cb, kinds_of);
}

void client_names(const Seq& s, std::set<std::string>& out, const Codebase& cb,
                  const std::function<std::vector<ParamKind>(const std::string&)>& kinds_of) {
    for (const Instr& i : s) {
        client_names(i.a, false, out, cb, kinds_of);
        client_names(i.b, false, out, cb, kinds_of);
        client_names(i.c, i.k == Instr::Kind::Assert, out, cb, kinds_of);
        client_names(i.body, out, cb, kinds_of);
    }
}

}  // namespace

std::vector<ParamKind> infer_param_kinds(const std::string& fn, const Codebase& cb) {
    const FunDef* f = cb.find(fn);
    if (!f) fail(ErrorKind::Unbound, "no function '" + fn + "'");
    std::set<std::string> cs;
    auto rec = [&](const std::string& g) { return infer_param_kinds(g, cb); };
    client_names(f->body, cs, cb, rec);
    if (f->pre) client_names(*f->pre, cs, cb, rec);
    if (f->post) client_names(*f->post, cs, cb, rec);
    std::vector<ParamKind> ks;
    for (const auto& p : f->params) ks.push_back(cs.count(p) ? ParamKind::Client : ParamKind::String);
    return ks;
}

namespace {

struct Region {
    int depth = 0;
    std::size_t cb = 0, ce = 0, hb = 0, he = 0, kb = 0, ke = 0;
};

std::map<std::string, Value> bind_params(const FunDef& f, const std::vector<Value>& args) {
    std::map<std::string, Value> env;
    for (std::size_t i = 0; i < f.params.size(); ++i) env[f.params[i]] = args[i];
    return env;
}

Constraint instance(const std::optional<CTmpl>& t, const Codebase& cb, const std::map<std::string, Value>& env) {
    if (!t) return cn::truth();
    Evaluator ev(cb);
    return ev.eval_constraint(*t, env);
}

class Renamer {
  public:
    Renamer(const PiType& T, const std::vector<Value>& args) {
        for (std::size_t i = 0; i < T.params.size(); ++i) {
            const Value& f = T.fresh[i];
            const Value& a = args[i];
            if (T.kinds[i] == ParamKind::Client) {
                if (a.kind != Value::Kind::Num || a.num <= 0)
                    fail(ErrorKind::Structural, T.fn + ": parameter " + T.params[i] + " expects a client id");
                clients_[f.num] = a.num;
            } else {
                if (a.kind == Value::Kind::Str)
                    strs_.emplace_back(f.str, a.str);
                else if (a.kind == Value::Kind::Num)
                    strs_.emplace_back(f.str, std::to_string(a.num));
                else
                    fail(ErrorKind::Structural, T.fn + ": parameter " + T.params[i] + " expects a string");
            }
        }
        fn_ = T.fn;
    }

    // Single left-to-right scan so that argument text is never rescanned. A
    // '$' outside a fresh parameter string means the signature is malformed.
    Var operator()(const Var& v) const {
        Var u = v;
        u.name.clear();
        for (std::size_t pos = 0; pos < v.name.size();) {
            bool hit = false;
            for (const auto& [from, to] : strs_) {
                if (v.name.compare(pos, from.size(), from) == 0) {
                    u.name += to;
                    pos += from.size();
                    hit = true;
                    break;
                }
            }
            if (hit) continue;
            if (v.name[pos] == '$')
                fail(ErrorKind::Structural, "instantiating " + fn_ + " leaves a fresh value in " + to_string(v));
            u.name += v.name[pos++];
        }
        if (auto it = clients_.find(v.owner); it != clients_.end()) u.owner = it->second;
        return u;
    }

    ConfType operator()(const ConfType& t) const {
        ConfType r;
        for (const Var& d : t.deps) r.deps.insert((*this)(d));
        for (const auto& c : t.ciphers) r.ciphers.push_back({(*this)(c.pad), std::make_shared<const ConfType>((*this)(*c.body))});
        return r;
    }

  private:
    std::vector<std::pair<std::string, std::string>> strs_;
    std::map<ClientId, ClientId> clients_;
    std::string fn_;
};

std::set<Var> views_of(const Expr& e) {
    std::set<Var> out;
    for (const Var& v : vars_of(e))
        if (v.kind == VarKind::Mesg || v.kind == VarKind::Reveal) out.insert(v);
    return out;
}

// Walks one function body (or main): direct commands are typed directly,
// direct calls are typed by instantiating their verified signatures.
class Composer {
  public:
    enum class Mode { Sig, Main };

    Composer(Mode mode, const Emitted& em, Region rg, const Codebase& cb, const Sig& sig, Solver& solver,
             Constraint pre, std::string fn)
        : mode_(mode), em_(em), rg_(rg), cb_(cb), sig_(sig), solver_(solver), pre_(std::move(pre)), fn_(std::move(fn)) {}

    // whole: toeq of the full function body, used for Sig-mode obligations.
    void run(const Protocol* whole) {
        whole_ = whole;
        for (std::size_t h = rg_.hb; h < rg_.he; ++h)
            if (em_.hints[h].depth == rg_.depth) hints_[em_.hints[h].target] = em_.hints[h].term;
        std::vector<const CallSite*> kids;
        for (std::size_t k = rg_.kb; k < rg_.ke; ++k)
            if (em_.calls[k].depth == rg_.depth + 1) kids.push_back(&em_.calls[k]);
        std::size_t ki = 0;
        std::size_t i = rg_.cb;
        while (i < rg_.ce || ki < kids.size()) {
            if (ki < kids.size() && kids[ki]->cmd_begin <= i) {
                call_site(*kids[ki]);
                i = std::max(i, kids[ki]->cmd_end);
                ++ki;
                continue;
            }
            if (i >= rg_.ce) break;
            direct(i);
            ++i;
        }
    }

    ConfTyping conf;
    Delta delta;
    std::vector<MacCheck> macs;
    std::vector<Obligation> obligations;
    std::vector<Constraint> facts;

  private:
    Mode mode_;
    const Emitted& em_;
    Region rg_;
    const Codebase& cb_;
    const Sig& sig_;
    Solver& solver_;
    Constraint pre_;
    std::string fn_;
    const Protocol* whole_ = nullptr;
    Hints hints_;

    Constraint knowledge() const {
        std::vector<Constraint> cs{pre_};
        cs.insert(cs.end(), facts.begin(), facts.end());
        return cn::conj(cs);
    }

    void discharge(const std::string& kind, const std::string& site, const Constraint& world, const Constraint& goal) {
        Obligation o;
        o.kind = kind;
        o.fn = fn_;
        o.site = site;
        o.goal = goal;
        EntailResult r = solver_.entails(world, goal);
        o.verdict = r.verdict;
        o.countermodel = r.countermodel;
        o.detail = r.detail;
        obligations.push_back(std::move(o));
    }

    void direct(std::size_t i) {
        const Cmd& c = em_.cmds[i];
        const Prime& p = solver_.prime();
        if (c.kind == Cmd::Kind::Assign) {
            Term phi = toeq_expr(c.body, p);
            facts.push_back(toeq_cmd(c, p));
            auto h = hints_.find(c.target);
            if (h != hints_.end()) {
                phi = toeq_expr(h->second, p);
                Constraint world = mode_ == Mode::Sig ? cn::conj(pre_, toeq(*whole_)) : knowledge();
                discharge("hint", to_string(c.target), world, cn::eq(ex::var(c.target), phi));
                conf.hints.push_back({c.target, phi, obligations.back().verdict});
            }
            ConfType t = type_term(phi, c.client, conf.R, &conf.gamma);
            conf.gamma[c.target] = std::move(t);
            delta.push_back({c.target, c.client, views_of(c.body), false, {}, {}});
            return;
        }
        auto m = match_bdoz(c);
        if (m) {
            m->cmd = i;
            Constraint world =
                mode_ == Mode::Sig ? cn::conj(pre_, toeq_without(*whole_, i - rg_.cb)) : knowledge();
            Constraint goal =
                cn::eq(ex::var(m->mac), ex::add(ex::var(m->key), ex::mul(ex::var(m->delta), ex::var(m->share))));
            discharge("mac", "assert@" + std::to_string(c.client) + " on " + to_string(m->share), world, goal);
            m->side = obligations.back().verdict;
            macs.push_back(*m);
            if (m->side == Verdict::True)
                for (const Var& x : {m->share, m->mac}) delta.push_back({x, c.client, {}, true, m->key, m->delta});
        }
        facts.push_back(toeq_cmd(c, solver_.prime()));
    }

    void call_site(const CallSite& cs) {
        auto it = sig_.types.find(cs.fn);
        if (it == sig_.types.end()) fail(ErrorKind::Structural, "no signature for " + cs.fn);
        const PiType& T = it->second;
        const FunDef* f = cb_.find(cs.fn);
        std::string site = cs.fn + "(";
        for (std::size_t a = 0; a < cs.args.size(); ++a) site += (a ? ", " : "") + print_value(cs.args[a]);
        site += ")";
        if (!T.verified) {
            Obligation o;
            o.kind = "sig";
            o.fn = fn_;
            o.site = site;
            o.goal = cn::truth();
            o.verdict = Verdict::False;
            o.detail = "signature of " + cs.fn + " did not verify";
            obligations.push_back(o);
        }
        auto env = bind_params(*f, cs.args);
        if (mode_ == Mode::Main) {
            Constraint pre_i = instance(f->pre, cb_, env);
            if (!is_truth(pre_i)) {
                Constraint world = knowledge();
                discharge("pre", site, world, pre_i);
                // Diagnostic only; not an obligation of its own.
                if (obligations.back().verdict == Verdict::False) {
                    for (const Constraint& c : conjuncts(pre_i)) {
                        if (solver_.entails(world, c).verdict == Verdict::False) {
                            obligations.back().detail = "missing conjunct " + print_constraint(c);
                            break;
                        }
                    }
                }
            }
        }
        Renamer ren(T, cs.args);
        std::vector<Var> added;
        for (const auto& [x, t] : T.gamma) {
            Var y = ren(x);
            if (conf.gamma.count(y)) fail(ErrorKind::Structural, to_string(y) + " typed twice");
            conf.gamma[y] = ren(t);
            added.push_back(y);
        }
        // caller values the callee body reads may depend on its pads
        for (const Var& y : added) conf.gamma[y] = recheck_pads(conf.gamma[y], conf.gamma);
        RSet pads;
        for (const Var& r : T.R) pads.insert(ren(r));
        consume_pads(conf.R, pads, ren(T.gamma.empty() ? Var{} : T.gamma.begin()->first));
        for (const IntEntry& e : T.delta) {
            IntEntry g = e;
            g.x = ren(e.x);
            std::set<Var> deps;
            for (const Var& d : e.deps) deps.insert(ren(d));
            g.deps = std::move(deps);
            if (e.upgrade) {
                g.key = ren(e.key);
                g.delta = ren(e.delta);
            }
            Var o{VarKind::Mesg, "", e.origin};
            g.origin = ren(o).owner;
            delta.push_back(std::move(g));
        }
        facts.push_back(instance(f->post, cb_, env));
    }
};

Region region_of(const Emitted& em, std::size_t call) {
    const CallSite& c = em.calls[call];
    return {c.depth, c.cmd_begin, c.cmd_end, c.hint_begin, c.hint_end, c.call_begin, c.call_end};
}

}  // namespace

PiType verify_signature(const std::string& fn, const Codebase& cb, const Sig& sig, Solver& solver,
                        const FreshScheme& scheme) {
    const FunDef* f = cb.find(fn);
    if (!f) fail(ErrorKind::Unbound, "no function '" + fn + "'");
    if (!f->protocol) fail(ErrorKind::Structural, fn + " does not produce a protocol");
    PiType T;
    T.fn = fn;
    T.params = f->params;
    T.kinds = infer_param_kinds(fn, cb);
    for (std::size_t i = 0; i < f->params.size(); ++i) {
        int k = scheme.instance * 100 + static_cast<int>(i) + 1;
        T.fresh.push_back(T.kinds[i] == ParamKind::Client ? Value::of_client(scheme.client_base + k)
                                                          : Value::of_str("$fresh_" + std::to_string(k) + "$"));
    }
    Evaluator ev(cb);
    ev.call(fn, T.fresh);
    const Emitted& em = ev.out();
    auto env = bind_params(*f, T.fresh);
    T.pre = instance(f->pre, cb, env);
    T.post = instance(f->post, cb, env);

    Region rg = region_of(em, 0);
    std::vector<Cmd> body(em.cmds.begin() + static_cast<std::ptrdiff_t>(rg.cb),
                          em.cmds.begin() + static_cast<std::ptrdiff_t>(rg.ce));
    Protocol pf = make_protocol(body, solver.prime());

    Composer comp(Composer::Mode::Sig, em, rg, cb, sig, solver, T.pre, fn);
    comp.run(&pf);
    if (!is_truth(T.post)) {
        Obligation o;
        o.kind = "post";
        o.fn = fn;
        o.site = fn;
        o.goal = T.post;
        EntailResult r = solver.entails(cn::conj(T.pre, toeq(pf)), T.post);
        o.verdict = r.verdict;
        o.countermodel = r.countermodel;
        o.detail = r.detail;
        comp.obligations.push_back(o);
    }
    T.gamma = comp.conf.gamma;
    T.R = comp.conf.R;
    T.delta = comp.delta;
    T.obligations = comp.obligations;
    T.verified = true;
    for (const auto& o : T.obligations)
        if (o.verdict != Verdict::True) T.verified = false;
    return T;
}

Sig verify_codebase(const Codebase& cb, Solver& solver, const FreshScheme& fresh) {
    Sig sig;
    for (const auto& n : cb.dependency_order()) {
        if (!cb.find(n)->protocol) continue;
        sig.types[n] = verify_signature(n, cb, sig, solver, fresh);
        sig.order.push_back(n);
    }
    return sig;
}

ProgramTyping typecheck_program(const SourceProgram& prog, const Sig& sig, const Constraint& pre, Solver& solver) {
    ProgramTyping out;
    Evaluator ev(prog.cb);
    ev.exec(prog.main, {});
    out.emitted = ev.out();
    out.pi = make_protocol(out.emitted.cmds, solver.prime());
    check_preprocessing(out.pi, pre);

    Region rg{0, 0, out.emitted.cmds.size(), 0, out.emitted.hints.size(), 0, out.emitted.calls.size()};
    Composer comp(Composer::Mode::Main, out.emitted, rg, prog.cb, sig, solver, pre, "main");
    type_pre_definitions(comp.conf, out.pi, pre);
    comp.run(nullptr);
    out.obligations = comp.obligations;
    for (const auto& o : out.obligations) {
        if (o.verdict != Verdict::True) out.obligations_ok = false;
        if (o.verdict == Verdict::Unknown) out.unknown = true;
    }
    out.conf = comp.conf;
    out.integ.delta = comp.delta;
    out.integ.constraint = toeq(out.pi);
    out.integ.macs = comp.macs;
    out.conf_verdicts = check_conf_all(out.conf, out.pi, pre);
    out.int_verdicts = check_int_all(out.integ, out.pi, pre);
    return out;
}

BridgeReport soundness_bridge(const ProgramTyping& comp, const Constraint& pre, Solver& solver) {
    Hints hints;
    for (const auto& h : comp.emitted.hints) hints.emplace(h.target, h.term);
    std::vector<ConfVerdict> wc;
    try {
        ConfTyping t = type_protocol_conf(comp.pi, pre, hints, &solver, true);
        wc = check_conf_all(t, comp.pi, pre);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Hint && e.kind() != ErrorKind::Linearity) throw;
    }
    IntTyping it = type_protocol_integrity(comp.pi, pre, &solver, true);
    std::vector<IntVerdict> wi = check_int_all(it, comp.pi, pre);

    BridgeReport rep;
    for (std::size_t i = 0; i < comp.conf_verdicts.size(); ++i) {
        BridgeRow r;
        r.H = comp.conf_verdicts[i].H;
        r.C = comp.conf_verdicts[i].C;
        r.comp_conf = comp.obligations_ok && comp.conf_verdicts[i].pass;
        r.whole_conf = !wc.empty() && wc[i].pass;
        r.comp_int = comp.obligations_ok && comp.int_verdicts[i].pass;
        r.whole_int = wi[i].pass;
        if (r.comp_conf != r.whole_conf || r.comp_int != r.whole_int) ++rep.disagreements;
        rep.rows.push_back(r);
    }
    return rep;
}

}  // namespace mpcv
