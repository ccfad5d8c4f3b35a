#include "dispatch.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "jointdesc/behavior.hpp"
#include "jointdesc/behavior_io.hpp"
#include "jointdesc/duplication.hpp"
#include "jointdesc/error.hpp"
#include "jointdesc/induction.hpp"
#include "jointdesc/membership.hpp"
#include "jointdesc/quantum.hpp"

namespace jointdesc::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct Report {
    int exit_code = kExitOk;
    ojson json = ojson::object();
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    std::string human;
};

struct Options {
    std::string format = "human";
    std::string out;
    std::uint64_t seed = 1;
    std::uint64_t vertex_cap = kDefaultVertexCap;
    std::optional<std::uint64_t> den_cap;
    int max_len = 16;
    std::uint64_t steps = 10'000;
    std::uint64_t runs = 10'000;
    std::optional<std::uint64_t> labs;  // default 1, or 200 for simulate
    std::uint64_t multiplier = 2;
    std::string q = "1/2";
    std::string eps = "1/20";
    std::string price;
    std::string rule_f = "elga";
    std::string rule_w = "elga";
    std::optional<std::uint64_t> budget;

    // Per-command extras.
    std::vector<std::string> files;
    std::vector<std::string> bits;
    std::string test = "ld";
    std::optional<int> reversals;
    std::size_t samples = 200;
    int settings_a = 0;
    int settings_b = 0;
    std::string scenario = "2x2";
    std::string outcomes = "2x2";
    bool friend_a = false;
    bool friend_b = false;
    bool product = false;
    std::string counts;
    std::string trace;
    std::string save;
    std::string y_oo;
    std::string y_bb;
    std::uint64_t n_oo = 1;
    std::uint64_t n_bb = 1000;
    std::string bb_rule = "both";
};

std::string decimal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string yes_no(bool v) { return v ? "true" : "false"; }

Rational rational_flag(const std::string& text, const std::string& flag) {
    try {
        return Rational::parse(text);
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidArgument, flag + ": " + e.what());
    }
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char c : s) {
        if (c == '"') r += '"';
        r += c;
    }
    return r + "\"";
}

std::string render(const Report& r, const std::string& format) {
    if (format == "json") return r.json.dump(2) + "\n";
    if (format == "csv") {
        std::string s;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + csv_escape(cells[i]);
            s += "\n";
        };
        line(r.csv_header);
        for (const auto& row : r.csv_rows) line(row);
        return s;
    }
    return r.human;
}

ojson rationals_json(const std::vector<Rational>& v) {
    ojson a = ojson::array();
    for (const auto& r : v) a.push_back(r.to_string());
    return a;
}

Behavior load(const Options& o, std::size_t index = 0) {
    if (o.files.size() <= index) throw Error(ErrorKind::InvalidArgument, "missing behavior file argument");
    ReadOptions ro;
    ro.max_den = o.den_cap;
    return read_behavior(o.files[index], ro);
}

std::pair<int, int> parse_pair(const std::string& text, const std::string& flag) {
    const auto x = text.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument(text);
        return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidArgument, flag + " expects AxB, got '" + text + "'");
    }
}

// ---- behavior-core -------------------------------------------------------

Report cmd_validate(const Options& o) {
    const Behavior b = load(o);
    const ValidationReport v = validate_behavior(b);
    Report r;
    r.exit_code = v.ok() ? kExitOk : kExitFinding;
    r.json["command"] = "validate";
    r.json["normalization_ok"] = v.normalization_ok;
    r.json["nonnegativity_ok"] = v.nonnegativity_ok;
    r.json["no_signalling_a_ok"] = v.no_signalling_a_ok;
    r.json["no_signalling_b_ok"] = v.no_signalling_b_ok;
    ojson failures = ojson::array();
    r.csv_header = {"condition", "x", "y", "a", "b", "value"};
    std::ostringstream h;
    h << "normalization: " << (v.normalization_ok ? "ok" : "FAIL") << "\n"
      << "nonnegativity: " << (v.nonnegativity_ok ? "ok" : "FAIL") << "\n"
      << "no-signalling (Alice): " << (v.no_signalling_a_ok ? "ok" : "FAIL") << "\n"
      << "no-signalling (Bob): " << (v.no_signalling_b_ok ? "ok" : "FAIL") << "\n";
    for (const auto& f : v.failures) {
        const std::string cond(to_string(f.condition));
        failures.push_back({{"condition", cond}, {"x", f.x}, {"y", f.y}, {"a", f.a}, {"b", f.b},
                            {"value", f.value.to_string()}});
        r.csv_rows.push_back({cond, std::to_string(f.x), std::to_string(f.y), std::to_string(f.a),
                              std::to_string(f.b), f.value.to_string()});
        h << "  " << cond << " at x=" << f.x << " y=" << f.y << " a=" << f.a << " b=" << f.b << ": " << f.value
          << "\n";
    }
    r.json["failures"] = std::move(failures);
    r.human = h.str();
    return r;
}

Report cmd_vertices(const Options& o) {
    ScenarioDescriptor s;
    if (!o.files.empty()) {
        s = load(o).scenario();
    } else {
        std::tie(s.settings_a, s.settings_b) = parse_pair(o.scenario, "--scenario");
        std::tie(s.outcomes_a, s.outcomes_b) = parse_pair(o.outcomes, "--outcomes");
        s.friend_on_a = o.friend_a;
        s.friend_on_b = o.friend_b;
        s.validate();
    }
    const auto vs = enumerate_deterministic_vertices(s, o.vertex_cap);
    Report r;
    r.json["command"] = "vertices";
    r.json["count"] = vs.size();
    r.csv_header = {"index", "alice", "bob", "friend_c", "friend_d"};
    ojson list = ojson::array();
    std::ostringstream h;
    h << vs.size() << " deterministic vertices\n";
    auto digits = [](const std::vector<int>& v) {
        std::string t;
        for (int d : v) t += std::to_string(d);
        return t;
    };
    auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const auto& v = vs[i];
        ojson item;
        item["alice"] = v.alice;
        item["bob"] = v.bob;
        if (v.friend_c) item["friend_c"] = *v.friend_c;
        if (v.friend_d) item["friend_d"] = *v.friend_d;
        list.push_back(std::move(item));
        r.csv_rows.push_back({std::to_string(i), digits(v.alice), digits(v.bob), opt(v.friend_c), opt(v.friend_d)});
        h << "  " << i << ": alice=" << digits(v.alice) << " bob=" << digits(v.bob);
        if (v.friend_c) h << " c=" << *v.friend_c;
        if (v.friend_d) h << " d=" << *v.friend_d;
        h << "\n";
    }
    r.json["vertices"] = std::move(list);
    r.human = h.str();
    return r;
}

Report cmd_chsh(const Options& o) {
    const Rational v = chsh_value(load(o));
    Report r;
    r.json["command"] = "chsh";
    r.json["value"] = v.to_string();
    r.csv_header = {"value"};
    r.csv_rows = {{v.to_string()}};
    r.human = "CHSH = " + v.to_string() + " (" + decimal(v.to_double()) + ")\n";
    return r;
}

// ---- feasibility-engine --------------------------------------------------

MembershipResult run_test(MembershipTest test, const Behavior& b, const Options& o) {
    if (test == MembershipTest::SequentialWigner) {
        SequentialScenario s{b.scenario(), o.reversals.value_or(b.scenario().settings_a - 1)};
        return check_sw_sequential(b, s, o.vertex_cap);
    }
    return run_membership(test, b, o.vertex_cap);
}

// Every certificate is re-checked by the independent verifier before output.
void require_verified(const MembershipResult& m) {
    const VerificationResult v = verify_membership(m);
    if (!v.ok) throw std::runtime_error("certificate failed independent verification: " + v.reason);
}

ojson inequality_json(const InequalityReport& ineq) {
    ojson j;
    j["test"] = std::string(to_string(ineq.test));
    j["coefficients"] = rationals_json(ineq.coefficients);
    j["bound"] = ineq.bound.to_string();
    j["value"] = ineq.value.to_string();
    j["bound_is_tight"] = ineq.bound_is_tight;
    return j;
}

std::string inequality_human(const InequalityReport& ineq) {
    std::ostringstream h;
    h << "inequality: sum c.p <= " << ineq.bound << (ineq.bound_is_tight ? " (tight over vertices)" : "")
      << "; value on input = " << ineq.value << "\n  coefficients:";
    for (const auto& c : ineq.coefficients) h << " " << c;
    h << "\n";
    return h.str();
}

Report cmd_check(MembershipTest test, const Options& o) {
    const Behavior b = load(o);
    const MembershipResult m = run_test(test, b, o);
    require_verified(m);
    Report r;
    const bool feasible = m.feasible();
    r.exit_code = feasible ? kExitOk : kExitFinding;
    const std::string name(to_string(test));
    const auto& values = feasible ? m.certificate.witness() : m.certificate.functional();
    const std::string kind = feasible ? "witness" : "separating_functional";
    r.json["command"] = "check-" + name;
    r.json["test"] = name;
    r.json["verdict"] = feasible ? "feasible" : "infeasible";
    r.json["verified"] = true;
    r.json["certificate"] = {{"kind", kind}, {"values", rationals_json(values)}};
    std::ostringstream h;
    h << name << ": " << (feasible ? "FEASIBLE" : "INFEASIBLE") << " (certificate verified, " << values.size()
      << " " << (feasible ? "weights" : "row multipliers") << ")\n";
    if (!feasible) {
        const auto ineq = extract_inequality(m.certificate, m.problem, b);
        r.json["inequality"] = inequality_json(ineq);
        h << inequality_human(ineq);
    }
    r.csv_header = {"test", "verdict", "kind", "index", "value"};
    for (std::size_t i = 0; i < values.size(); ++i) {
        r.csv_rows.push_back({name, feasible ? "feasible" : "infeasible", kind, std::to_string(i), values[i].to_string()});
    }
    r.human = h.str();
    return r;
}

Report cmd_extract(const Options& o) {
    const auto test = parse_membership_test(o.test);
    if (!test) throw Error(ErrorKind::InvalidArgument, "--test must be joint, ld, lf or sw");
    const Behavior b = load(o);
    const MembershipResult m = run_test(*test, b, o);
    require_verified(m);
    Report r;
    r.json["command"] = "extract-ineq";
    r.csv_header = {"index", "coefficient"};
    if (m.feasible()) {
        r.json["verdict"] = "feasible";
        r.human = std::string(to_string(*test)) + ": FEASIBLE, no separating inequality\n";
        return r;
    }
    const auto ineq = extract_inequality(m.certificate, m.problem, b);
    r.exit_code = kExitFinding;
    r.json["verdict"] = "infeasible";
    r.json["inequality"] = inequality_json(ineq);
    for (std::size_t i = 0; i < ineq.coefficients.size(); ++i) {
        r.csv_rows.push_back({std::to_string(i), ineq.coefficients[i].to_string()});
    }
    r.csv_rows.push_back({"bound", ineq.bound.to_string()});
    r.csv_rows.push_back({"value", ineq.value.to_string()});
    r.human = inequality_human(ineq);
    return r;
}

Report cmd_ld_sw(const Options& o) {
    const int sa = o.settings_a == 0 ? 2 : o.settings_a;
    const auto rep = ld_sw_equivalence_test(o.samples, o.seed, sa);
    Report r;
    r.exit_code = rep.disagreements.empty() ? kExitOk : kExitFinding;
    r.json["command"] = "ld-sw-test";
    r.json["settings_a"] = rep.settings_a;
    r.json["reversals"] = rep.reversals;
    r.json["seed"] = rep.seed;
    r.json["vertices_checked"] = rep.vertices_checked;
    r.json["samples_checked"] = rep.samples_checked;
    r.json["ld_feasible"] = rep.ld_feasible;
    r.json["ld_infeasible"] = rep.ld_infeasible;
    ojson d = ojson::array();
    r.csv_header = {"label", "ld_feasible", "sw_feasible"};
    for (const auto& x : rep.disagreements) {
        d.push_back({{"label", x.label}, {"ld_feasible", x.ld_feasible}, {"sw_feasible", x.sw_feasible}});
        r.csv_rows.push_back({x.label, yes_no(x.ld_feasible), yes_no(x.sw_feasible)});
    }
    r.json["disagreements"] = std::move(d);
    std::ostringstream h;
    h << "LD vs SW (" << sa << "x" << sa << ", R=" << rep.reversals << ", seed " << rep.seed << "): "
      << rep.vertices_checked << " vertices + " << rep.samples_checked << " samples, " << rep.disagreements.size()
      << " disagreements (" << rep.ld_feasible << " feasible, " << rep.ld_infeasible << " infeasible)\n";
    r.human = h.str();
    return r;
}

// ---- quantum-sim ---------------------------------------------------------

EwfsProtocol chsh_preset() {
    constexpr double pi = std::numbers::pi;
    EwfsProtocol p;
    p.initial = PureState::singlet();
    p.alice_angles = {0.0, pi / 2};
    p.bob_angles = {-3 * pi / 4, 3 * pi / 4};
    return p;
}

ojson behavior_container(const Behavior& b, const EwfsProtocol& p) {
    ojson j = behavior_to_json(b);
    j["protocol"] = protocol_to_json(p);
    return j;
}

Report cmd_quantum_behavior(const Options& o) {
    EwfsProtocol p = chsh_preset();
    if (!o.files.empty()) {
        const auto j = nlohmann::json::parse(read_text_file(o.files[0]), nullptr, false);
        if (j.is_discarded()) throw Error(ErrorKind::ParseError, "protocol file is not valid JSON");
        p = protocol_from_json(j.contains("protocol") ? j.at("protocol") : j);
    }
    const auto born = born_behavior(p, o.den_cap.value_or(kDefaultQuantumDenCap));
    Report r;
    r.json = behavior_container(born.rational, p);
    r.csv_header = {"x", "y", "a", "b", "probability", "float"};
    const auto& s = born.exact.scenario;
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int y = 1; y <= s.settings_b; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    r.csv_rows.push_back({std::to_string(x), std::to_string(y), std::to_string(a), std::to_string(b),
                                          born.rational(x, y, a, b).to_string(), decimal(born.exact(x, y, a, b))});
                }
            }
        }
    }
    std::ostringstream h;
    h << "Born behavior: " << s.settings_a << "x" << s.settings_b << " settings, friend on Alice's wing\n"
      << "  reverse check: " << (reverse_check(p) ? "ok" : "FAIL") << "\n"
      << "  max normalization error: " << max_normalization_error(born.exact) << "\n"
      << "  max signalling: " << max_signalling(born.exact) << "\n";
    if (s.settings_a >= 3 && s.settings_b >= 2) {
        const int xs[] = {2, 3}, ys[] = {1, 2};
        h << "  CHSH on settings {2,3}x{1,2}: " << decimal(chsh_value(born.exact.restrict_settings(xs, ys))) << "\n";
    }
    r.human = h.str() + format_behavior(born.rational);
    return r;
}

Report cmd_quantum_optimize(const Options& o) {
    const auto opt = chsh_optimize(o.seed, o.budget.value_or(10'000), o.product);
    Report r;
    r.json["command"] = "quantum optimize";
    r.json["seed"] = o.seed;
    r.json["product_only"] = o.product;
    r.json["iterations"] = opt.iterations;
    r.json["schmidt_angle"] = decimal(opt.schmidt_angle);
    r.json["alice_angles"] = {decimal(opt.alice_angles[0]), decimal(opt.alice_angles[1])};
    r.json["bob_angles"] = {decimal(opt.bob_angles[0]), decimal(opt.bob_angles[1])};
    r.json["value"] = decimal(opt.value);
    r.csv_header = {"seed", "iterations", "schmidt_angle", "alice1", "alice2", "bob1", "bob2", "value"};
    r.csv_rows = {{std::to_string(o.seed), std::to_string(opt.iterations), decimal(opt.schmidt_angle),
                   decimal(opt.alice_angles[0]), decimal(opt.alice_angles[1]), decimal(opt.bob_angles[0]),
                   decimal(opt.bob_angles[1]), decimal(opt.value)}};
    r.human = "CHSH optimum " + decimal(opt.value) + " (Schmidt angle " + decimal(opt.schmidt_angle) + ", " +
              std::to_string(opt.iterations) + " iterations)\n";
    return r;
}

Report cmd_quantum_lf_search(const Options& o) {
    const int sa = o.settings_a == 0 ? 3 : o.settings_a;
    const int sb = o.settings_b == 0 ? 3 : o.settings_b;
    const auto res =
        lf_violation_search(sa, sb, o.seed, o.budget.value_or(1000), o.den_cap.value_or(kDefaultQuantumDenCap));
    require_verified(res.membership);
    const auto ineq = extract_inequality(res.membership.certificate, res.membership.problem, res.behavior);
    if (!o.save.empty()) write_text_file(o.save, behavior_container(res.behavior, res.protocol).dump(2) + "\n");

    Report r;
    r.exit_code = kExitFinding;
    r.json["command"] = "quantum lf-search";
    r.json["seed"] = o.seed;
    r.json["candidates"] = res.trace.size();
    r.json["behavior"] = behavior_container(res.behavior, res.protocol);
    r.json["certificate"] = {{"kind", "separating_functional"},
                             {"values", rationals_json(res.membership.certificate.functional())},
                             {"verified", true}};
    r.json["inequality"] = inequality_json(ineq);
    ojson trace = ojson::array();
    r.csv_header = {"candidate", "schmidt_angle", "best_chsh", "lf_feasible"};
    for (const auto& t : res.trace) {
        trace.push_back({{"candidate", t.candidate}, {"schmidt_angle", decimal(t.schmidt_angle)},
                         {"best_chsh", decimal(t.best_chsh)}, {"lf_feasible", t.lf_feasible}});
        r.csv_rows.push_back({std::to_string(t.candidate), decimal(t.schmidt_angle), decimal(t.best_chsh),
                              yes_no(t.lf_feasible)});
    }
    r.json["trace"] = std::move(trace);
    std::ostringstream h;
    h << "LF-infeasible quantum behavior found at candidate " << res.trace.back().candidate << " of "
      << o.budget.value_or(1000) << " (certificate verified)\n"
      << inequality_human(ineq);
    r.human = h.str();
    return r;
}

// ---- duplication-lab -----------------------------------------------------

Report cmd_dup_credence(const Options& o) {
    const CredenceRule rf = CredenceRule::parse(o.rule_f);
    Report r;
    r.json["command"] = "dup credence";
    std::ostringstream h;
    if (!o.counts.empty()) {
        std::vector<std::pair<std::string, std::uint64_t>> counts;
        std::stringstream ss(o.counts);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--counts expects label=count,...");
            try {
                counts.emplace_back(item.substr(0, eq), std::stoull(item.substr(eq + 1)));
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::InvalidArgument, "bad count in '" + item + "'");
            }
        }
        const auto dist = self_locate(counts, rf);
        r.json["rule"] = rf.name();
        r.csv_header = {"label", "credence"};
        ojson d = ojson::object();
        for (const auto& [label, p] : dist) {
            d[label] = p.to_string();
            r.csv_rows.push_back({label, p.to_string()});
            h << label << ": " << p << "\n";
        }
        r.json["distribution"] = std::move(d);
        r.human = h.str();
        return r;
    }
    const CredenceRule rw = CredenceRule::parse(o.rule_w);
    DuplicationExperiment e;
    e.labs = o.labs.value_or(1);
    e.multiplier = o.multiplier;
    e.heads_probability = rational_flag(o.q, "--q");
    e.validate();
    const auto f = credence_outcome(rf, e, AgentRole::Freya);
    const auto w = credence_outcome(rw, e, AgentRole::Wigner);
    r.json["M"] = o.multiplier;
    r.json["q"] = e.heads_probability.to_string();
    r.json["freya"] = {{"rule", rf.name()}, {"heads", f.heads.to_string()}, {"tails", f.tails.to_string()}};
    r.json["wigner"] = {{"rule", rw.name()}, {"heads", w.heads.to_string()}, {"tails", w.tails.to_string()}};
    r.csv_header = {"role", "rule", "heads", "tails"};
    r.csv_rows = {{"freya", rf.name(), f.heads.to_string(), f.tails.to_string()},
                  {"wigner", rw.name(), w.heads.to_string(), w.tails.to_string()}};
    h << "Freya (" << rf.name() << "): P(H)=" << f.heads << " P(T)=" << f.tails << "\n"
      << "Wigner (" << rw.name() << "): P(H)=" << w.heads << " P(T)=" << w.tails << "\n";
    r.human = h.str();
    return r;
}

Report cmd_dup_binomial(const Options& o) {
    const Rational q = rational_flag(o.q, "--q");
    if (q < Rational(0) || q > Rational(1)) throw Error(ErrorKind::InvalidArgument, "--q must lie in [0, 1]");
    const auto dist = heads_count_distribution(o.labs.value_or(1), o.multiplier, q);
    const auto cred = credence_via_binomial(o.labs.value_or(1), o.multiplier, q);
    Report r;
    r.json["command"] = "dup binomial";
    r.json["N"] = o.labs.value_or(1);
    r.json["M"] = o.multiplier;
    r.json["q"] = q.to_string();
    r.json["heads_count_distribution"] = rationals_json(dist);
    r.json["c"] = cred.normalization.to_string();
    r.json["heads"] = cred.credence.heads.to_string();
    r.json["tails"] = cred.credence.tails.to_string();
    r.csv_header = {"quantity", "value"};
    for (std::size_t k = 0; k < dist.size(); ++k) r.csv_rows.push_back({"P_F(k=" + std::to_string(k) + ")", dist[k].to_string()});
    r.csv_rows.push_back({"c", cred.normalization.to_string()});
    r.csv_rows.push_back({"P(H)", cred.credence.heads.to_string()});
    r.csv_rows.push_back({"P(T)", cred.credence.tails.to_string()});
    r.human = "P(H)=" + cred.credence.heads.to_string() + "\nP(T)=" + cred.credence.tails.to_string() +
              "\nc=" + cred.normalization.to_string() + "\n";
    return r;
}

Report cmd_dup_simulate(const Options& o) {
    DuplicationExperiment e;
    e.labs = o.labs.value_or(200);
    e.multiplier = o.multiplier;
    e.heads_probability = rational_flag(o.q, "--q");
    e.epsilon = rational_flag(o.eps, "--eps");
    e.price = o.price.empty() ? Rational(2, 3) - e.epsilon : rational_flag(o.price, "--price");
    e.validate();
    const auto sim = simulate_betting(e, o.runs, o.seed);
    if (!o.trace.empty()) {
        std::ofstream f(o.trace, std::ios::binary);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write trace file '" + o.trace + "'");
        write_betting_trace(f, e, o.runs, o.seed);
    }
    Report r;
    r.json["command"] = "dup simulate";
    r.json["N"] = e.labs;
    r.json["M"] = e.multiplier;
    r.json["q"] = e.heads_probability.to_string();
    r.json["epsilon"] = e.epsilon.to_string();
    r.json["price"] = e.price.to_string();
    r.json["runs"] = sim.runs;
    r.json["seed"] = sim.seed;
    r.json["bookkeeping_ok"] = sim.bookkeeping_ok();
    r.csv_header = {"quantity", "exact", "empirical_mean", "standard_error"};
    ojson rows = ojson::array();
    std::ostringstream h;
    h << "pays 1 on Heads, price " << e.price << ", " << sim.runs << " runs, seed " << sim.seed << "\n";
    auto add = [&](const std::string& name, const Rational& exact, const Estimate& est) {
        rows.push_back({{"quantity", name},
                        {"exact", exact.to_string()},
                        {"empirical_mean", decimal(est.mean)},
                        {"standard_error", decimal(est.standard_error)}});
        r.csv_rows.push_back({name, exact.to_string(), decimal(est.mean), decimal(est.standard_error)});
        h << "  " << name << ": exact " << exact << " (" << exact.to_double() << "), empirical " << est.mean
          << " +- " << est.standard_error << "\n";
    };
    add("freya_tails_fraction", sim.expected_freya_tails, sim.freya_tails_fraction);
    add("wigner_tails_fraction", sim.expected_wigner_tails, sim.wigner_tails_fraction);
    add("freya_profit", sim.expected_freya_profit, sim.freya_profit);
    add("wigner_profit", sim.expected_wigner_profit, sim.wigner_profit);
    add("heads_fraction", e.heads_probability, sim.heads_fraction);
    r.json["summary"] = std::move(rows);
    h << "  copy-count bookkeeping: " << (sim.bookkeeping_ok() ? "ok" : "FAIL") << "\n";
    r.human = h.str();
    return r;
}

Report cmd_dup_cp_check(const Options& o) {
    const CredenceRule rf = CredenceRule::parse(o.rule_f);
    const CredenceRule rw = CredenceRule::parse(o.rule_w);
    const auto rep = check_cp_consistency(rf, rw, o.multiplier, rational_flag(o.q, "--q"));
    Report r;
    r.exit_code = rep.consistent ? kExitOk : kExitFinding;
    r.json["command"] = "dup cp-check";
    r.json["M"] = rep.multiplier;
    r.json["rule_f"] = rf.name();
    r.json["rule_w"] = rw.name();
    r.json["freya_tails"] = rep.freya_tails.to_string();
    r.json["wigner_tails"] = rep.wigner_tails.to_string();
    r.json["consistent"] = rep.consistent;
    r.csv_header = {"M", "rule_f", "rule_w", "freya_tails", "wigner_tails", "consistent"};
    r.csv_rows = {{std::to_string(rep.multiplier), rf.name(), rw.name(), rep.freya_tails.to_string(),
                   rep.wigner_tails.to_string(), yes_no(rep.consistent)}};
    r.human = std::string(rep.consistent ? "consistent: " : "INCONSISTENT: ") + rep.freya_tails.to_string() +
              (rep.consistent ? " = " : " vs ") + rep.wigner_tails.to_string() + "\n";
    if (!rep.consistent) {
        // Short form as well, e.g. "1/3 vs 1/2".
        auto shortform = [](const Rational& x) {
            return x.denominator() == 1 ? x.numerator().get_str() : x.to_string();
        };
        r.human = "INCONSISTENT: " + shortform(rep.freya_tails) + " vs " + shortform(rep.wigner_tails) + "\n";
    }
    return r;
}

// ---- induction-toy -------------------------------------------------------

std::string bit_arg(const std::string& s) { return s == "-" ? std::string() : s; }

ToyMachineConfig machine_config(const Options& o) {
    ToyMachineConfig cfg;
    cfg.max_length = o.max_len;
    cfg.steps = o.steps;
    return cfg;
}

Report cmd_induct_m(const Options& o) {
    const auto cfg = machine_config(o);
    Report r;
    r.json["command"] = "induct m";
    r.json["machine"] = cfg.machine_id;
    r.csv_header = {"string", "L", "T", "mass_num", "mass_den", "programs_counted", "truncated"};
    ojson rows = ojson::array();
    std::ostringstream h;
    std::vector<std::string> inputs = o.bits;
    if (inputs.empty()) inputs.push_back("");
    for (const auto& raw : inputs) {
        const std::string x = bit_arg(raw);
        const auto est = estimate_M(x, cfg);
        const std::string num = est.mass.numerator().get_str(), den = est.mass.denominator().get_str();
        rows.push_back({{"string", x}, {"L", cfg.max_length}, {"T", cfg.steps}, {"mass", est.mass.to_string()},
                        {"programs_counted", est.programs_counted}, {"truncated", est.truncated}});
        r.csv_rows.push_back({x, std::to_string(cfg.max_length), std::to_string(cfg.steps), num, den,
                              std::to_string(est.programs_counted), yes_no(est.truncated)});
        h << "M(" << (x.empty() ? "<empty>" : x) << ") >= " << est.mass << " (" << est.programs_counted
          << " programs" << (est.truncated ? ", truncated" : "") << ")\n";
    }
    r.json["estimates"] = std::move(rows);
    r.human = h.str();
    return r;
}

Report cmd_induct_cond(const Options& o) {
    if (o.bits.size() != 2) throw Error(ErrorKind::InvalidArgument, "induct cond expects X and Y");
    const auto cfg = machine_config(o);
    const std::string x = bit_arg(o.bits[0]), y = bit_arg(o.bits[1]);
    const Rational c = conditional_M(x, y, cfg);
    Report r;
    r.json["command"] = "induct cond";
    r.json["x"] = x;
    r.json["y"] = y;
    r.json["L"] = cfg.max_length;
    r.json["T"] = cfg.steps;
    r.json["conditional"] = c.to_string();
    r.csv_header = {"x", "y", "L", "T", "conditional"};
    r.csv_rows = {{x, y, std::to_string(cfg.max_length), std::to_string(cfg.steps), c.to_string()}};
    r.human = "M(y|x) = " + c.to_string() + " (" + decimal(c.to_double()) + ")\n";
    return r;
}

Report cmd_induct_bb(const Options& o) {
    if (o.bits.size() != 1) throw Error(ErrorKind::InvalidArgument, "induct bb expects the history X");
    const auto cfg = machine_config(o);
    const std::string x = bit_arg(o.bits[0]);
    if (o.y_oo.empty()) throw Error(ErrorKind::InvalidArgument, "--y-oo is required");
    const std::string y_bb = o.y_bb.empty() ? random_bits(o.y_oo.size(), o.seed) : o.y_bb;
    std::vector<std::pair<std::string, BbRule>> rules;
    if (o.bb_rule == "indifference" || o.bb_rule == "both") rules.emplace_back("indifference", BbRule::Indifference);
    if (o.bb_rule == "induction" || o.bb_rule == "both") rules.emplace_back("induction", BbRule::Induction);
    if (rules.empty()) throw Error(ErrorKind::InvalidArgument, "--rule must be indifference, induction or both");

    Report r;
    r.json["command"] = "induct bb";
    r.json["x"] = x;
    r.json["y_oo"] = o.y_oo;
    r.json["y_bb"] = y_bb;
    r.json["n_oo"] = o.n_oo;
    r.json["n_bb"] = o.n_bb;
    r.json["L"] = cfg.max_length;
    r.json["T"] = cfg.steps;
    r.csv_header = {"rule", "p_oo", "p_bb", "m_oo_given_x", "m_bb_given_x"};
    ojson results = ojson::array();
    std::ostringstream h;
    h << "y_BB = " << y_bb << "\n";
    for (const auto& [name, rule] : rules) {
        const auto c = bb_credence(x, o.y_oo, y_bb, o.n_oo, o.n_bb, rule, cfg);
        const bool ind = rule == BbRule::Induction;
        ojson item = {{"rule", name}, {"p_oo", c.ordinary.to_string()}, {"p_bb", c.thermal.to_string()}};
        if (ind) {
            item["m_oo_given_x"] = c.conditional_ordinary.to_string();
            item["m_bb_given_x"] = c.conditional_thermal.to_string();
        }
        results.push_back(std::move(item));
        r.csv_rows.push_back({name, c.ordinary.to_string(), c.thermal.to_string(),
                              ind ? c.conditional_ordinary.to_string() : "",
                              ind ? c.conditional_thermal.to_string() : ""});
        h << name << ": P(OO)=" << c.ordinary << " P(BB)=" << c.thermal;
        if (ind) h << "  [M(y_OO|x)=" << c.conditional_ordinary << ", M(y_BB|x)=" << c.conditional_thermal << "]";
        h << "\n";
    }
    r.json["results"] = std::move(results);
    r.human = h.str();
    return r;
}

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::NotFound: return kExitInternal;
        default: return kExitUsage;
    }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Exact joint-description membership, duplication credences and toy induction"};
    app.name("jointdesc");
    app.require_subcommand(1);

    std::function<Report()> action;
    auto common = [&](CLI::App* c) {
        c->add_option("--format", o.format, "Output format")
            ->check(CLI::IsMember({"human", "csv", "json"}))
            ->capture_default_str();
        c->add_option("--out", o.out, "Write the report to this file instead of stdout");
    };
    auto file_cmd = [&](const std::string& name, const std::string& help, std::function<Report()> f) {
        auto* c = app.add_subcommand(name, help);
        common(c);
        c->add_option("file", o.files, "Behavior file")->required();
        c->add_option("--den-cap", o.den_cap, "Round decimal entries to denominators <= cap");
        c->add_option("--vertex-cap", o.vertex_cap, "Variable/vertex cap")->capture_default_str();
        c->callback([&action, f] { action = f; });
        return c;
    };

    file_cmd("validate", "Check normalization, nonnegativity and no-signalling", [&] { return cmd_validate(o); });
    file_cmd("chsh", "CHSH value of a binary 2x2 behavior", [&] { return cmd_chsh(o); });
    file_cmd("check-joint", "Joint (Fine) distribution membership", [&] {
        return cmd_check(MembershipTest::JointFine, o);
    });
    file_cmd("check-ld", "Local deterministic membership", [&] {
        return cmd_check(MembershipTest::LocalDeterministic, o);
    });
    file_cmd("check-lf", "Local Friendliness membership", [&] {
        return cmd_check(MembershipTest::LocalFriendliness, o);
    });
    auto* sw = file_cmd("check-sw", "Sequential reverse-and-remeasure membership", [&] {
        return cmd_check(MembershipTest::SequentialWigner, o);
    });
    sw->add_option("--reversals", o.reversals, "Number of reversals R (default settings_a - 1)");
    auto* ex = file_cmd("extract-ineq", "Separating inequality from an infeasibility certificate",
                        [&] { return cmd_extract(o); });
    ex->add_option("--test", o.test, "joint, ld, lf or sw")->capture_default_str();
    ex->add_option("--reversals", o.reversals, "Number of reversals R for --test sw");

    {
        auto* c = app.add_subcommand("vertices", "Enumerate deterministic strategies");
        common(c);
        c->add_option("file", o.files, "Take the scenario from this behavior file");
        c->add_option("--scenario", o.scenario, "Settings as AxB")->capture_default_str();
        c->add_option("--outcomes", o.outcomes, "Outcomes as AxB")->capture_default_str();
        c->add_flag("--friend-a", o.friend_a, "Friend on Alice's wing");
        c->add_flag("--friend-b", o.friend_b, "Friend on Bob's wing");
        c->add_option("--vertex-cap", o.vertex_cap, "Vertex cap")->capture_default_str();
        c->callback([&] { action = [&] { return cmd_vertices(o); }; });
    }
    {
        auto* c = app.add_subcommand("ld-sw-test", "Paired LD / sequential membership runs");
        common(c);
        c->add_option("--seed", o.seed, "Master seed")->capture_default_str();
        c->add_option("--samples", o.samples, "Random behaviors besides the vertices")->capture_default_str();
        c->add_option("--settings-a", o.settings_a, "Settings per party, 2 or 3 (default 2)");
        c->callback([&] { action = [&] { return cmd_ld_sw(o); }; });
    }

    auto* quantum = app.add_subcommand("quantum", "Quantum protocol simulation");
    quantum->require_subcommand(1);
    {
        auto* c = quantum->add_subcommand("behavior", "Born-rule behavior of a protocol (default: CHSH preset)");
        common(c);
        c->add_option("file", o.files, "Protocol file (behavior container with a protocol object)");
        c->add_option("--den-cap", o.den_cap, "Denominator cap for rationalization (default 10000)");
        c->callback([&] { action = [&] { return cmd_quantum_behavior(o); }; });
    }
    {
        auto* c = quantum->add_subcommand("optimize", "Maximize the two-qubit CHSH value");
        common(c);
        c->add_option("--seed", o.seed, "Seed")->capture_default_str();
        c->add_option("--budget", o.budget, "Iterations (default 10000)");
        c->add_flag("--product", o.product, "Restrict to product states");
        c->callback([&] { action = [&] { return cmd_quantum_optimize(o); }; });
    }
    {
        auto* c = quantum->add_subcommand("lf-search", "Search for an LF-infeasible quantum behavior");
        common(c);
        c->add_option("--seed", o.seed, "Seed")->capture_default_str();
        c->add_option("--budget", o.budget, "Candidates (default 1000)");
        c->add_option("--den-cap", o.den_cap, "Denominator cap (default 10000)");
        c->add_option("--settings-a", o.settings_a, "Alice settings including x=1 (default 3)");
        c->add_option("--settings-b", o.settings_b, "Bob settings (default 3)");
        c->add_option("--save", o.save, "Also write the found behavior and protocol to this file");
        c->callback([&] { action = [&] { return cmd_quantum_lf_search(o); }; });
    }

    auto* dup = app.add_subcommand("dup", "Duplication credences and betting (tickets pay 1 on Heads)");
    dup->require_subcommand(1);
    auto dup_flags = [&](CLI::App* c) {
        common(c);
        c->add_option("--N", o.labs, "Number of labs (default 1; 200 for simulate)");
        c->add_option("--M", o.multiplier, "Copies made on Heads")->capture_default_str();
        c->add_option("--q", o.q, "Probability of Heads")->capture_default_str();
    };
    {
        auto* c = dup->add_subcommand("credence", "Single-lab credences, or self-location with --counts");
        dup_flags(c);
        c->add_option("--rule-f", o.rule_f, "Freya's rule: elga, reflection or custom:heads=w,tails=w")
            ->capture_default_str();
        c->add_option("--rule-w", o.rule_w, "Wigner's rule")->capture_default_str();
        c->add_option("--counts", o.counts, "label=count,... for self-location under --rule-f");
        c->callback([&] { action = [&] { return cmd_dup_credence(o); }; });
    }
    {
        auto* c = dup->add_subcommand("binomial", "Copy-weighted Heads-count calculus");
        dup_flags(c);
        c->callback([&] { action = [&] { return cmd_dup_binomial(o); }; });
    }
    {
        auto* c = dup->add_subcommand("simulate", "Monte Carlo betting simulation");
        dup_flags(c);
        c->add_option("--eps", o.eps, "Epsilon")->capture_default_str();
        c->add_option("--price", o.price, "Ticket price (default 2/3 - eps)");
        c->add_option("--runs", o.runs, "Runs")->capture_default_str();
        c->add_option("--seed", o.seed, "Master seed")->capture_default_str();
        c->add_option("--trace", o.trace, "Write per-lab CSV rows (run,role,lab,outcome,copies,bought,profit)");
        c->callback([&] { action = [&] { return cmd_dup_simulate(o); }; });
    }
    {
        auto* c = dup->add_subcommand("cp-check", "Consistency of Freya's and Wigner's credences at N=1");
        common(c);
        c->add_option("--M", o.multiplier, "Copies made on Heads")->capture_default_str();
        c->add_option("--q", o.q, "Probability of Heads")->capture_default_str();
        c->add_option("--rule-f", o.rule_f, "Freya's rule")->capture_default_str();
        c->add_option("--rule-w", o.rule_w, "Wigner's rule")->capture_default_str();
        c->callback([&] { action = [&] { return cmd_dup_cp_check(o); }; });
    }

    auto* induct = app.add_subcommand("induct", "Toy algorithmic probability");
    induct->require_subcommand(1);
    auto induct_flags = [&](CLI::App* c) {
        common(c);
        c->add_option("--max-len", o.max_len, "Maximum program length L")->capture_default_str();
        c->add_option("--steps", o.steps, "Step budget T")->capture_default_str();
    };
    {
        auto* c = induct->add_subcommand("m", "Lower bound on M(x) for each bit string ('-' is empty)");
        induct_flags(c);
        c->add_option("strings", o.bits, "Bit strings");
        c->callback([&] { action = [&] { return cmd_induct_m(o); }; });
    }
    {
        auto* c = induct->add_subcommand("cond", "M(y|x) = M(xy)/M(x)");
        induct_flags(c);
        c->add_option("strings", o.bits, "X Y")->expected(2);
        c->callback([&] { action = [&] { return cmd_induct_cond(o); }; });
    }
    {
        auto* c = induct->add_subcommand("bb", "Ordinary vs thermal continuation credence");
        induct_flags(c);
        c->add_option("history", o.bits, "History X")->expected(1);
        c->add_option("--y-oo", o.y_oo, "Ordinary continuation");
        c->add_option("--y-bb", o.y_bb, "Thermal continuation (default: seeded random bits)");
        c->add_option("--seed", o.seed, "Seed for the random thermal continuation")->capture_default_str();
        c->add_option("--n-oo", o.n_oo, "Ordinary observer copies")->capture_default_str();
        c->add_option("--n-bb", o.n_bb, "Thermal observer copies")->capture_default_str();
        c->add_option("--rule", o.bb_rule, "indifference, induction or both")->capture_default_str();
        c->callback([&] { action = [&] { return cmd_induct_bb(o); }; });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    if (!action) {
        err << app.help();
        return kExitUsage;
    }
    try {
        const Report r = action();
        const std::string text = render(r, o.format);
        if (o.out.empty()) {
            out << text;
        } else {
            write_text_file(o.out, text);
        }
        return r.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace jointdesc::cli
