#include "mpcv/report.hpp"

#include "mpcv/error.hpp"
#include "mpcv/parse.hpp"

namespace mpcv {

json to_json(const Memory& m) {
    json j = json::object();
    for (const auto& [v, x] : m) {
        if (x)
            j[to_string(v)] = *x;
        else
            j[to_string(v)] = nullptr;
    }
    return j;
}

json to_json(const std::set<ClientId>& cs) {
    json j = json::array();
    for (ClientId c : cs) j.push_back(c);
    return j;
}

json to_json(const std::set<Var>& vs) {
    json j = json::array();
    for (const Var& v : vs) j.push_back(to_string(v));
    return j;
}

json report_entail(const Constraint& goal, const EntailResult& r) {
    json j;
    j["goal"] = print_constraint(goal);
    j["verdict"] = to_string(r.verdict);
    if (r.countermodel) j["countermodel"] = to_json(*r.countermodel);
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

json report_conf(const ConfTyping& t, const std::vector<ConfVerdict>& vs) {
    json j;
    json g = json::object();
    for (const auto& [x, ty] : t.gamma) g[to_string(x)] = print_conftype(ty);
    j["gamma"] = g;
    j["pads"] = to_json(t.R);
    json hs = json::array();
    for (const auto& h : t.hints)
        hs.push_back({{"target", to_string(h.target)}, {"term", print_term(h.term)}, {"verdict", to_string(h.verdict)}});
    j["hints"] = hs;
    json ps = json::array();
    bool all = true;
    for (const auto& v : vs) {
        json p{{"honest", to_json(v.H)}, {"corrupt", to_json(v.C)}, {"pass", v.pass}};
        if (!v.pass) p["leaked"] = to_json(v.leaked);
        all = all && v.pass;
        ps.push_back(p);
    }
    j["partitions"] = ps;
    j["pass"] = all;
    return j;
}

json report_int(const IntTyping& t, const std::vector<IntVerdict>& vs) {
    json j;
    j["delta"] = print_delta(t.delta);
    json ms = json::array();
    for (const auto& m : t.macs)
        ms.push_back({{"command", m.cmd},
                      {"client", m.at},
                      {"share", to_string(m.share)},
                      {"mac", to_string(m.mac)},
                      {"key", to_string(m.key)},
                      {"delta", to_string(m.delta)},
                      {"side_condition", to_string(m.side)}});
    j["macs"] = ms;
    json ps = json::array();
    bool all = true;
    for (const auto& v : vs) {
        json p{{"honest", to_json(v.H)}, {"corrupt", to_json(v.C)}, {"pass", v.pass}};
        if (v.first_low) {
            p["first_low"] = to_string(*v.first_low);
            json c = json::array();
            for (const Var& x : v.chain) c.push_back(to_string(x));
            p["chain"] = c;
        }
        all = all && v.pass;
        ps.push_back(p);
    }
    j["partitions"] = ps;
    j["pass"] = all;
    return j;
}

json report_oracle(const OracleReport& r) {
    json j{{"property", r.property}, {"honest", to_json(r.H)}, {"corrupt", to_json(r.C)}, {"pass", r.pass}};
    if (r.witness) j["witness"] = to_json(*r.witness);
    j["runs"] = r.runs;
    if (r.strategies) j["strategies"] = r.strategies;
    j["bounded_adversary"] = r.bounded_adversary;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json report_obligation(const Obligation& o) {
    json j{{"kind", o.kind}, {"function", o.fn}, {"site", o.site}, {"goal", print_constraint(o.goal)},
           {"verdict", to_string(o.verdict)}};
    if (o.countermodel) j["countermodel"] = to_json(*o.countermodel);
    if (!o.detail.empty()) j["detail"] = o.detail;
    return j;
}

json report_pitype(const PiType& t) {
    json j;
    j["function"] = t.fn;
    json ps = json::array();
    for (std::size_t i = 0; i < t.params.size(); ++i)
        ps.push_back({{"name", t.params[i]},
                      {"kind", t.kinds[i] == ParamKind::Client ? "client" : "string"},
                      {"fresh", print_value(t.fresh[i])}});
    j["params"] = ps;
    j["pre"] = print_constraint(t.pre);
    j["post"] = print_constraint(t.post);
    json g = json::object();
    for (const auto& [x, ty] : t.gamma) g[to_string(x)] = print_conftype(ty);
    j["gamma"] = g;
    j["pads"] = to_json(t.R);
    j["delta"] = print_delta(t.delta);
    json os = json::array();
    for (const auto& o : t.obligations) os.push_back(report_obligation(o));
    j["obligations"] = os;
    j["verified"] = t.verified;
    return j;
}

json report_program(const ProgramTyping& t) {
    json j;
    json os = json::array();
    for (const auto& o : t.obligations) os.push_back(report_obligation(o));
    j["obligations"] = os;
    ObligationCounts c = count_obligations(t.obligations);
    j["obligation_counts"] = {{"pre", c.pre}, {"post", c.post}, {"hint", c.hint}, {"mac", c.mac}};
    j["obligations_ok"] = t.obligations_ok;
    j["confidentiality"] = report_conf(t.conf, t.conf_verdicts);
    j["integrity"] = report_int(t.integ, t.int_verdicts);
    return j;
}

json report_bridge(const BridgeReport& b) {
    json j;
    json rs = json::array();
    for (const auto& r : b.rows)
        rs.push_back({{"honest", to_json(r.H)},
                      {"corrupt", to_json(r.C)},
                      {"compositional_conf", r.comp_conf},
                      {"whole_conf", r.whole_conf},
                      {"compositional_int", r.comp_int},
                      {"whole_int", r.whole_int}});
    j["rows"] = rs;
    j["disagreements"] = b.disagreements;
    return j;
}

Memory memory_from_json(const json& j, const Prime& p) {
    if (!j.is_object()) fail(ErrorKind::Syntax, "tape must be a JSON object");
    std::string text;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number_integer()) fail(ErrorKind::Syntax, "tape value for " + k + " is not an integer");
        if (!text.empty()) text += " /\\ ";
        std::int64_t n = v.get<std::int64_t>();
        auto q = static_cast<std::int64_t>(p.value());
        text += k + " == " + std::to_string(((n % q) + q) % q);
    }
    if (text.empty()) return {};
    return parse_memory(text, p);
}

}  // namespace mpcv
