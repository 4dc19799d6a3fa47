#ifndef HOAIRY_CLI_HPP
#define HOAIRY_CLI_HPP

// Subcommand front-end: configuration (JSON file + flag overrides),
// deterministic CSV/JSON artifacts and exit-code mapping.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "airy.hpp"
#include "fredholm.hpp"
#include "hierarchy.hpp"
#include "painleve.hpp"

namespace hoairy::cli {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int schema_version = 1;

enum Exit : int { Pass = 0, CheckFailed = 1, BadConfig = 2, NumericalFailure = 3 };

struct RunConfig {
    std::string subcommand;
    int n = 1;
    int k = 0; ///< 0: take from x
    std::vector<double> x;
    std::vector<double> alpha;
    double t = 0.0;
    // ranges (airy: x, tabulate: swept parameter)
    double from = -5.0;
    double to = 5.0;
    double step = 0.5;
    int deriv = 0;
    bool imag = false;
    std::string sweep = "t";
    // fredholm
    int nodes = 40;
    int z_nodes = 160;
    std::string truncation = "exponential";
    std::vector<int> orders;
    double d_alpha = 0.05;
    // painleve
    double t_min = 0.0;
    double abs_tol = 1e-18;
    double rel_tol = 1e-12;
    int grid_density = 128;
    double tolerance = 1e-4; ///< verify-tw pass threshold
    // output
    std::string out;
    std::string format; ///< empty: subcommand default

    NystromOptions nystrom() const {
        NystromOptions o;
        o.nodes_per_interval = nodes;
        o.z_nodes = z_nodes;
        o.truncation = truncation == "hard" ? Truncation::Hard : Truncation::Exponential;
        return o;
    }
    IntegrateOptions integrator() const {
        IntegrateOptions o;
        o.tolerances.abs_tol = abs_tol;
        o.tolerances.rel_tol = rel_tol;
        o.tolerances.grid_density = grid_density;
        return o;
    }
    IntervalSystem system() const { return {x, alpha, t}; }
    PainleveProblem problem() const { return {n, x, alpha}; }
};

#define HOAIRY_CONFIG_FIELDS(F)                                                                                  \
    F(subcommand) F(n) F(k) F(x) F(alpha) F(t) F(from) F(to) F(step) F(deriv) F(imag) F(sweep) F(nodes) F(z_nodes)   \
        F(truncation) F(orders) F(d_alpha) F(t_min) F(abs_tol) F(rel_tol) F(grid_density) F(tolerance) F(out)     \
            F(format)

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json::object();
#define HOAIRY_PUT(f) j[#f] = c.f;
    HOAIRY_CONFIG_FIELDS(HOAIRY_PUT)
#undef HOAIRY_PUT
}

/// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, RunConfig& c) {
#define HOAIRY_GET(f)                                                                                                  \
    if (j.contains(#f)) j.at(#f).get_to(c.f);
    HOAIRY_CONFIG_FIELDS(HOAIRY_GET)
#undef HOAIRY_GET
}

/// 15 significant digits, the fixed output precision.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

/// Rounds every floating-point leaf to 15 significant digits.
inline nlohmann::json rounded(nlohmann::json j) {
    if (j.is_number_float()) return std::strtod(fmt(j.get<double>()).c_str(), nullptr) + 0.0;
    if (j.is_array() || j.is_object())
        for (auto& v : j) v = rounded(v);
    return j;
}

inline int exit_code(const Error& e) {
    if (e.is_numerical()) return NumericalFailure;
    switch (e.kind()) {
    case ErrorKind::IdentityViolation:
    case ErrorKind::NotExact:
    case ErrorKind::NotMonic: return CheckFailed;
    default: return BadConfig;
    }
}

inline void validate(const RunConfig& c) {
    auto bad = [](const std::string& m) { fail(ErrorKind::ConfigError, m); };
    if (c.n < 1) bad("n must be >= 1");
    if (c.k < 0) bad("k must be >= 0");
    const std::string& s = c.subcommand;
    const bool needs_x = s == "det" || s == "tabulate" || s == "solve" || s == "verify-tw" || s == "joint-prob";
    if (needs_x) {
        if (c.x.empty()) bad("--x is required");
        if (c.k > 0 && static_cast<std::size_t>(c.k) != c.x.size()) bad("--k disagrees with the length of --x");
        if (s != "joint-prob" && c.alpha.size() != c.x.size()) bad("--alpha must have one entry per threshold");
        if (s == "joint-prob" && c.orders.size() != c.x.size()) bad("--orders must have one entry per threshold");
        IntervalSystem sys = c.system();
        if (s == "joint-prob") sys.weights.assign(c.x.size(), 1.0);
        sys.validate();
    }
    if ((s == "hierarchy" || s == "laxcheck") && c.k < 1) bad("--k is required");
    if (c.nodes < 2 || c.z_nodes < 2) bad("node counts must be >= 2");
    if (c.truncation != "exponential" && c.truncation != "hard") bad("truncation must be exponential or hard");
    if ((s == "airy" || s == "tabulate") && !(c.step > 0.0 && c.from <= c.to)) bad("need from <= to and step > 0");
    if (s == "tabulate" && c.sweep != "t" && c.sweep != "x1") bad("sweep must be t or x1");
    if (!c.format.empty() && c.format != "csv" && c.format != "json" && c.format != "text" && c.format != "latex")
        bad("unknown format " + c.format);
}

inline std::vector<double> range(double from, double to, double step) {
    std::vector<double> v;
    const long count = static_cast<long>(std::floor((to - from) / step + 1e-9));
    for (long i = 0; i <= count; ++i) v.push_back(from + static_cast<double>(i) * step);
    return v;
}

struct Output {
    std::string text;
    int status = Pass;
};

inline nlohmann::json envelope(const RunConfig& c, nlohmann::json result) {
    return {{"schema_version", schema_version},
            {"tool", "hoairy"},
            {"version", tool_version},
            {"config", rounded(nlohmann::json(c))},
            {"result", rounded(std::move(result))}};
}

inline std::string csv_header(const RunConfig& c) {
    return std::string("# hoairy ") + tool_version + " schema " + std::to_string(schema_version) + "\n# config " +
           rounded(nlohmann::json(c)).dump() + "\n";
}

inline std::string as_json(const RunConfig& c, nlohmann::json result) { return envelope(c, std::move(result)).dump(2) + "\n"; }

inline Output cmd_airy(const RunConfig& c) {
    std::ostringstream csv;
    nlohmann::json rows = nlohmann::json::array();
    const ContourSpec contour = ContourSpec::standard(c.n);
    for (double x : range(c.from, c.to, c.step)) {
        const double v = ai_n_deriv(c.n, x, c.deriv, contour);
        const AiryValue full = ai_n_eval(c.n, x, c.deriv, contour);
        csv << fmt(x) << ',' << fmt(v);
        if (c.imag) csv << ',' << fmt(full.imag_residual);
        csv << '\n';
        rows.push_back({{"x", x}, {"value", v}, {"imag_residual", full.imag_residual}});
    }
    if (c.format == "json") return {as_json(c, {{"values", rows}})};
    return {csv_header(c) + (c.imag ? "x,value,imag_residual\n" : "x,value\n") + csv.str()};
}

inline Output cmd_det(const RunConfig& c) {
    GenFnReport r = gen_fn_report(c.system(), c.n, c.nystrom());
    nlohmann::json j = to_json(r);
    const bool ok = r.F > 0.0 && r.F <= 1.0 + 1e-12;
    j["checks"] = {{"F_in_unit_interval", ok}};
    return {as_json(c, j), ok ? Pass : CheckFailed};
}

inline Output cmd_tabulate(const RunConfig& c) {
    std::ostringstream csv;
    csv << csv_header(c) << c.sweep << ",F,log_F\n";
    for (double v : range(c.from, c.to, c.step)) {
        IntervalSystem s = c.system();
        if (c.sweep == "t")
            s.shift = v;
        else
            s.thresholds[0] = v;
        s.validate();
        const double F = gen_fn(s, c.n, c.nystrom());
        csv << fmt(v) << ',' << fmt(F) << ',' << fmt(std::log(F)) << '\n';
    }
    return {csv.str()};
}

inline Output cmd_hierarchy(const RunConfig& c) {
    HierarchyMember m = hierarchy_member(c.n, static_cast<std::size_t>(c.k));
    if (c.format == "json") return {as_json(c, to_json(m))};
    if (c.format == "latex") return {to_latex(m) + "\n"};
    std::string s;
    for (std::size_t j = 0; j < m.k; ++j) s += m.lhs[j].str() + " = " + m.rhs[j].str() + "\n";
    return {s};
}

inline Output cmd_laxcheck(const RunConfig& c) {
    const std::size_t k = static_cast<std::size_t>(c.k);
    LenardChain chain = lax_chain(c.n, k);
    HierarchyMember member = hierarchy_member(c.n, k);
    IdentityReport r = verify_compatibility(chain, member);
    r.append(verify_diagonal_blocks(chain));
    r.append(verify_chain_invariants(chain));
    r.append(verify_double_construction(chain, member));
    const int status = r.all_exact() ? Pass : CheckFailed;
    if (c.format == "json")
        return {as_json(c, {{"all_exact", r.all_exact()}, {"failures", r.failures()}, {"checks", r.to_json()}}), status};
    std::ostringstream os;
    os << "laxcheck n=" << c.n << " k=" << k << ": " << r.checks.size() << " identities, ";
    if (r.all_exact()) {
        os << "all identities exact\n";
    } else {
        os << r.failures() << " with nonzero residual\n";
        for (const auto& chk : r.checks)
            if (!chk.exact()) os << "  " << chk.name << "\n";
    }
    return {os.str(), status};
}

inline Output cmd_solve(const RunConfig& c) {
    PainleveProblem p = c.problem();
    SolutionGrid g = solve(p, c.t_min, c.integrator());
    std::ostringstream csv;
    csv << csv_header(c) << "# grid " << rounded(grid_metadata(g)).dump() << "\nt";
    for (std::size_t j = 1; j <= g.k; ++j) csv << ",re_u" << j << ",im_u" << j;
    csv << ",trusted\n";
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        csv << fmt(g.t[i]);
        for (std::size_t j = 0; j < g.k; ++j) csv << ',' << fmt(g.u(i, j).real()) << ',' << fmt(g.u(i, j).imag());
        csv << ',' << (g.trusted(g.t[i]) ? 1 : 0) << '\n';
    }
    return {csv.str()};
}

inline Output cmd_verify_tw(const RunConfig& c) {
    PainleveProblem p = c.problem();
    RunConfig cc = c;
    cc.t_min = std::min(0.0, c.t_min);
    SolutionGrid g = solve(p, cc.t_min, c.integrator());
    TwIntegral tw = tw_integral(g, p);
    IntervalSystem s = c.system();
    s.shift = 0.0;
    GenFnReport det = gen_fn_report(s, c.n, c.nystrom());
    const double diff = std::abs(det.log_F - tw.log_F);
    const bool covered = g.t_trust <= 1e-12;
    const bool ok = diff <= c.tolerance && covered;
    nlohmann::json j = {{"log_F_fredholm", det.log_F},
                        {"log_F_painleve", tw.log_F},
                        {"abs_diff", diff},
                        {"tolerance", c.tolerance},
                        {"fredholm_error_estimate", det.error_estimate},
                        {"painleve_imag_residual", tw.imag_residual},
                        {"painleve_tail", tw.tail},
                        {"trust_window", {g.t_trust, g.t_max}},
                        {"refinement_deviation", g.refinement_deviation},
                        {"pass", ok}};
    return {as_json(cc, j), ok ? Pass : CheckFailed};
}

inline Output cmd_joint_prob(const RunConfig& c) {
    JointProbOptions opt;
    opt.d_alpha = c.d_alpha;
    opt.nystrom = c.nystrom();
    IntervalSystem s = c.system();
    s.weights.assign(c.x.size(), 1.0);
    JointProbResult r = joint_prob(s, c.n, c.orders, opt);
    const bool ok = r.value >= -1e-3 && r.value <= 1.0 + 1e-3;
    nlohmann::json j = {{"probability", r.value},
                        {"error_estimate", r.error_estimate},
                        {"terms", r.terms},
                        {"checks", {{"in_unit_interval", ok}}}};
    return {as_json(c, j), ok ? Pass : CheckFailed};
}

inline Output dispatch(const RunConfig& c) {
    validate(c);
    const std::string& s = c.subcommand;
    if (s == "airy") return cmd_airy(c);
    if (s == "det") return cmd_det(c);
    if (s == "tabulate") return cmd_tabulate(c);
    if (s == "hierarchy") return cmd_hierarchy(c);
    if (s == "laxcheck") return cmd_laxcheck(c);
    if (s == "solve") return cmd_solve(c);
    if (s == "verify-tw") return cmd_verify_tw(c);
    if (s == "joint-prob") return cmd_joint_prob(c);
    fail(ErrorKind::ConfigError, "unknown subcommand '" + s + "'");
}

inline void write_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
    err << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
}

/// Parses argv, merges defaults < config file < flags, runs, writes the
/// artifact to --out or `out`. Returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Higher-order Airy processes: Fredholm determinants, Painleve II hierarchy, Lax pairs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);
    RunConfig flags;
    std::string config_path;
    // option name -> config key, for the overrides that were actually given
    std::vector<std::pair<CLI::Option*, std::string>> given;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its fields");
        given.emplace_back(sub->add_option("--out", flags.out, "output file (default stdout)"), "out");
        given.emplace_back(sub->add_option("--format", flags.format, "csv, json, text or latex"), "format");
        given.emplace_back(sub->add_option("--n", flags.n, "hierarchy order n"), "n");
    };
    auto thresholds = [&](CLI::App* sub, bool weights) {
        given.emplace_back(sub->add_option("--x", flags.x, "thresholds x_1 > ... > x_k")->delimiter(','), "x");
        if (weights)
            given.emplace_back(sub->add_option("--alpha", flags.alpha, "weights alpha_1..alpha_k")->delimiter(','),
                               "alpha");
        given.emplace_back(sub->add_option("--k", flags.k, "number of thresholds (checked against --x)"), "k");
    };
    auto fredholm_opts = [&](CLI::App* sub) {
        given.emplace_back(sub->add_option("--nodes", flags.nodes, "Gauss-Legendre nodes per interval"), "nodes");
        given.emplace_back(sub->add_option("--z-nodes", flags.z_nodes, "nodes of the kernel z-integral"), "z_nodes");
        given.emplace_back(sub->add_option("--truncation", flags.truncation, "exponential or hard"), "truncation");
    };
    auto ode_opts = [&](CLI::App* sub) {
        given.emplace_back(sub->add_option("--tmin", flags.t_min, "lower end of the integration"), "t_min");
        given.emplace_back(sub->add_option("--abs-tol", flags.abs_tol), "abs_tol");
        given.emplace_back(sub->add_option("--rel-tol", flags.rel_tol), "rel_tol");
        given.emplace_back(sub->add_option("--grid-density", flags.grid_density, "reporting nodes per unit t"),
                           "grid_density");
    };
    auto ranged = [&](CLI::App* sub) {
        given.emplace_back(sub->add_option("--from", flags.from), "from");
        given.emplace_back(sub->add_option("--to", flags.to), "to");
        given.emplace_back(sub->add_option("--step", flags.step), "step");
    };

    CLI::App* airy = app.add_subcommand("airy", "tabulate Ai_n or a derivative as CSV");
    common(airy);
    ranged(airy);
    given.emplace_back(airy->add_option("--deriv", flags.deriv, "derivative order"), "deriv");
    given.emplace_back(airy->add_flag("--imag", flags.imag, "add the imaginary residual column"), "imag");

    CLI::App* det = app.add_subcommand("det", "Fredholm determinant F_n(x + t, alpha)");
    common(det);
    thresholds(det, true);
    fredholm_opts(det);
    given.emplace_back(det->add_option("--t", flags.t, "shift t"), "t");

    CLI::App* tab = app.add_subcommand("tabulate", "sweep F over t or x_1 as CSV");
    common(tab);
    thresholds(tab, true);
    fredholm_opts(tab);
    ranged(tab);
    given.emplace_back(tab->add_option("--sweep", flags.sweep, "t or x1"), "sweep");
    given.emplace_back(tab->add_option("--t", flags.t, "shift t (when sweeping x1)"), "t");

    CLI::App* hier = app.add_subcommand("hierarchy", "print the hierarchy member");
    common(hier);
    given.emplace_back(hier->add_option("--k", flags.k, "vector dimension"), "k");

    CLI::App* lax = app.add_subcommand("laxcheck", "verify the Lax pair identities exactly");
    common(lax);
    given.emplace_back(lax->add_option("--k", flags.k, "vector dimension"), "k");

    CLI::App* sol = app.add_subcommand("solve", "integrate the hierarchy ODE, CSV of u(t)");
    common(sol);
    thresholds(sol, true);
    ode_opts(sol);

    CLI::App* vtw = app.add_subcommand("verify-tw", "compare log F from both routes");
    common(vtw);
    thresholds(vtw, true);
    fredholm_opts(vtw);
    ode_opts(vtw);
    given.emplace_back(vtw->add_option("--tolerance", flags.tolerance, "pass threshold on |difference|"), "tolerance");

    CLI::App* jp = app.add_subcommand("joint-prob", "joint law of given particles");
    common(jp);
    thresholds(jp, false);
    fredholm_opts(jp);
    given.emplace_back(jp->add_option("--orders", flags.orders, "particle orders m_1 < ... < m_k")->delimiter(','),
                       "orders");
    given.emplace_back(jp->add_option("--d-alpha", flags.d_alpha, "alpha finite-difference step"), "d_alpha");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Pass;
    } catch (const CLI::CallForVersion& e) {
        out << tool_version << "\n";
        return Pass;
    } catch (const CLI::ParseError& e) {
        write_error(err, "ConfigError", e.what(), BadConfig);
        return BadConfig;
    }

    RunConfig cfg;
    try {
        nlohmann::json merged = nlohmann::json(RunConfig{});
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) fail(ErrorKind::ConfigError, "cannot open config file " + config_path);
            nlohmann::json file;
            try {
                f >> file;
            } catch (const nlohmann::json::exception& e) {
                fail(ErrorKind::ConfigError, std::string("config file is not valid JSON: ") + e.what());
            }
            if (!file.is_object()) fail(ErrorKind::ConfigError, "config file must hold a JSON object");
            for (const auto& [key, value] : file.items()) {
                if (!merged.contains(key)) fail(ErrorKind::ConfigError, "unknown config key '" + key + "'");
                merged[key] = value;
            }
        }
        const nlohmann::json flag_json = flags;
        for (const auto& [opt, key] : given)
            if (opt->count() > 0) merged[key] = flag_json[key];
        try {
            cfg = merged.get<RunConfig>();
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::ConfigError, std::string("bad config value: ") + e.what());
        }
        cfg.subcommand = app.get_subcommands().front()->get_name();

        Output o = dispatch(cfg);
        if (cfg.out.empty()) {
            out << o.text;
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) fail(ErrorKind::ConfigError, "cannot write " + cfg.out);
            f << o.text;
        }
        return o.status;
    } catch (const Error& e) {
        const int code = exit_code(e);
        write_error(err, to_string(e.kind()), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        write_error(err, "InternalError", e.what(), NumericalFailure);
        return NumericalFailure;
    }
}

} // namespace hoairy::cli

#endif // HOAIRY_CLI_HPP
