#pragma once

/**
 * @file cli.hpp
 * @brief Command dispatch for the circbias tool.
 *
 * Every command writes {"manifest": ..., "result": ...}. The manifest holds
 * the command, input paths, effective parameters, tool version and output
 * paths, so identical manifests produce identical bytes.
 *
 * Exit codes: 0 success, 1 invalid input, 2 numerical failure.
 */

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "circbias/circbias.hpp"
#include "circbias/io.hpp"

namespace circbias::cli {

using io::Json;

/// Defaults that can be overridden through the environment.
struct Tolerances {
    double root_tol = 1e-10;
    std::size_t root_max_iters = 200;
    double cluster_tol = 1e-6;
    std::size_t event_cap = 1'000'000;
};

inline constexpr const char* env_help =
    "Environment overrides:\n"
    "  CIRCBIAS_ROOT_TOL        backward-error tolerance of the root finder (default 1e-10)\n"
    "  CIRCBIAS_ROOT_MAX_ITERS  Aberth iteration cap (default 200)\n"
    "  CIRCBIAS_CLUSTER_TOL     relative distance merging real roots (default 1e-6)\n"
    "  CIRCBIAS_EVENT_CAP       maximum crossing events in exact sweeps (default 1000000)\n";

inline double env_number(const char* name, double fallback) {
    const char* raw = std::getenv(name);
    if (!raw || !*raw) return fallback;
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !std::isfinite(v) || v <= 0)
        throw InvalidArgument(std::string(name) + " must be a positive number, got '" + raw + "'");
    return v;
}

inline Tolerances tolerances_from_env() {
    Tolerances t;
    t.root_tol = env_number("CIRCBIAS_ROOT_TOL", t.root_tol);
    t.root_max_iters = static_cast<std::size_t>(env_number("CIRCBIAS_ROOT_MAX_ITERS", static_cast<double>(t.root_max_iters)));
    t.cluster_tol = env_number("CIRCBIAS_CLUSTER_TOL", t.cluster_tol);
    t.event_cap = static_cast<std::size_t>(env_number("CIRCBIAS_EVENT_CAP", static_cast<double>(t.event_cap)));
    return t;
}

inline Json to_json(const Tolerances& t) {
    return Json{{"root_tol", t.root_tol},
                {"root_max_iters", t.root_max_iters},
                {"cluster_tol", t.cluster_tol},
                {"event_cap", t.event_cap}};
}

/// Output destinations and run-wide settings shared by all commands.
struct Context {
    std::string out_path;
    std::string csv_path;
    unsigned threads = 1;
    std::ostream* out = &std::cout;
};

struct Emission {
    explicit Emission(std::string cmd, std::vector<std::string> in = {}) : command(std::move(cmd)), inputs(std::move(in)) {}

    std::string command;
    std::vector<std::string> inputs;
    Json parameters = Json::object();
    Json result;
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> csv_rows;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + path);
    f << text;
}

inline void emit(const Context& ctx, Emission e) {
    Json outputs = Json::array();
    outputs.push_back(ctx.out_path.empty() ? "stdout" : ctx.out_path);
    if (!ctx.csv_path.empty()) {
        if (e.csv_header.empty()) throw InvalidArgument("--csv is not available for " + e.command);
        outputs.push_back(ctx.csv_path);
    }
    Json inputs = Json::array();
    for (const auto& p : e.inputs) inputs.push_back(p);
    e.parameters["threads"] = ctx.threads;
    const Json doc{{"manifest",
                    {{"command", e.command},
                     {"inputs", inputs},
                     {"parameters", e.parameters},
                     {"version", std::string(version)},
                     {"outputs", outputs}}},
                   {"result", e.result}};
    const std::string text = io::dump(doc);
    if (ctx.out_path.empty())
        *ctx.out << text;
    else
        write_text(ctx.out_path, text);
    if (!ctx.csv_path.empty()) write_text(ctx.csv_path, io::csv(e.csv_header, e.csv_rows));
}

inline RootOptions root_options(const Tolerances& t) {
    RootOptions r;
    r.tol = t.root_tol;
    r.max_iters = t.root_max_iters;
    return r;
}

// ---------------------------------------------------------------- commands

inline Emission cmd_bias(const std::string& path, std::optional<std::string> aperture) {
    Emission e{"bias", {path}};
    const auto cfg = io::points_from_json(io::read_json_file(path));
    if (aperture) {
        const Rational gamma = parse_rational(*aperture);
        e.parameters["aperture"] = io::rational_to_json(gamma);
        e.result = io::to_json(aperture_bias(cfg, gamma));
    } else {
        e.result = io::to_json(exact_bias(cfg));
    }
    return e;
}

inline Json witness_json(const runners::TimeWitness<Rational>& w) {
    return Json{{"t", io::rational_to_json(w.t)},
                {"t_float", to_double(w.t)},
                {"report", io::to_json(w.report)},
                {"evaluations", w.evaluations}};
}

inline Emission cmd_runners_optimize(const std::string& path, bool exact, std::optional<std::size_t> grid,
                                     std::optional<std::string> aperture, const Tolerances& tol, const Context& ctx) {
    Emission e{"runners optimize", {path}};
    if (exact && grid) throw InvalidArgument("--exact and --grid are mutually exclusive");
    const auto sys = io::runners_from_json(io::read_json_file(path));
    const double n = static_cast<double>(sys.size());
    const double k = static_cast<double>(sys.distinct_speeds());
    e.result["n"] = sys.size();
    e.result["distinct_speeds"] = sys.distinct_speeds();

    if (grid) {
        if (aperture) throw InvalidArgument("--aperture requires the exact sweep");
        runners::GridOptions g;
        g.steps = *grid;
        g.threads = ctx.threads;
        e.parameters["method"] = "grid";
        e.parameters["steps"] = g.steps;
        e.parameters["refine_iters"] = g.refine_iters;
        const auto w = runners::max_bias_grid(runners::to_double(sys), g);
        e.result["t"] = w.t;
        e.result["report"] = io::to_json(w.report);
        e.result["evaluations"] = w.evaluations;
        e.result["bound_sqrt_k_over_12"] = std::sqrt(k / 12.0);
        return e;
    }

    runners::SweepOptions s;
    s.event_cap = tol.event_cap;
    s.threads = ctx.threads;
    e.parameters["method"] = "exact";
    e.parameters["event_cap"] = s.event_cap;
    if (aperture) {
        const Rational gamma = parse_rational(*aperture);
        require(gamma >= 0 && gamma <= 1, "--aperture must lie in [0,1]");
        e.parameters["aperture"] = io::rational_to_json(gamma);
        const auto w = runners::aperture_max_bias_exact(sys, gamma, s);
        e.result["witness"] = witness_json(w);
        const double g = to_double(gamma);
        e.result["bound_sqrt_gamma_n"] = std::sqrt((g - g * g) * n);
    } else {
        const auto w = runners::max_bias_exact(sys, s);
        e.result["witness"] = witness_json(w);
        e.result["bound_sqrt_k_over_12"] = std::sqrt(k / 12.0);
        e.result["bound_sqrt_n_over_2"] = std::sqrt(n) / 2.0;
    }
    return e;
}

inline Emission cmd_runners_antipodal(std::size_t k, std::size_t samples, std::uint64_t seed, const Context& ctx) {
    Emission e{"runners antipodal"};
    e.parameters["k"] = k;
    e.parameters["samples"] = samples;
    e.parameters["seed"] = seed;
    const auto sys = runners::antipodal_pairs(k);
    e.result = io::to_json(sys);
    if (samples > 0) {
        const auto rep = runners::antipodal_check(k, samples, seed, ctx.threads);
        e.result["check"] = Json{{"rng", rep.rng},
                                 {"seed", rep.seed},
                                 {"samples", rep.samples},
                                 {"closed_min", rep.range.closed_min},
                                 {"closed_max", rep.range.closed_max},
                                 {"half_open_min", rep.range.half_open_min},
                                 {"half_open_max", rep.range.half_open_max},
                                 {"worst_time", io::rational_to_json(rep.worst_time)}};
    }
    return e;
}

inline Emission cmd_runners_chernoff(std::size_t n, std::size_t trials, std::uint64_t seed, const Context& ctx) {
    Emission e{"runners chernoff"};
    e.parameters["n"] = n;
    e.parameters["trials"] = trials;
    e.parameters["seed"] = seed;
    const auto rep = runners::chernoff_experiment(n, trials, seed, ctx.threads);
    Json per = Json::array();
    std::size_t passed = 0;
    for (const auto& t : rep.per_trial) {
        per.push_back(Json{{"trial", t.index}, {"all_pass", t.all_pass}, {"violations", t.violations}, {"max_ratio", t.max_ratio}});
        e.csv_rows.push_back({static_cast<double>(t.index), t.all_pass ? 1.0 : 0.0, static_cast<double>(t.violations), t.max_ratio});
        passed += t.all_pass ? 1 : 0;
    }
    e.csv_header = {"trial", "all_pass", "violations", "max_ratio"};
    e.result = Json{{"rng", rep.rng},
                    {"seed", rep.seed},
                    {"n", rep.n},
                    {"trials", rep.trials},
                    {"m", rep.m},
                    {"gamma0", rep.gamma0},
                    {"sectors", rep.sectors},
                    {"times", rep.times},
                    {"trials_passed", passed},
                    {"pass_fraction", rep.pass_fraction},
                    {"max_ratio", rep.max_ratio},
                    {"per_trial", per}};
    return e;
}

inline Json family_json(const shapiro::ShapiroFamily& fam) {
    Json polys = Json::array();
    for (std::size_t i = 0; i < static_cast<std::size_t>(fam.p); ++i) {
        Json phases = Json::array();
        for (long ph : fam.phases[i]) phases.push_back(ph);
        Json entry = io::to_json(fam.poly(i));
        entry["index"] = i;
        entry["phases"] = phases;
        polys.push_back(entry);
    }
    return Json{{"p", fam.p}, {"r", fam.r}, {"length", fam.length()}, {"polys", polys}};
}

inline Emission cmd_shapiro_gen(long p, int r) {
    Emission e{"shapiro gen"};
    e.parameters["p"] = p;
    e.parameters["r"] = r;
    e.result = family_json(shapiro::shapiro_family(p, r));
    return e;
}

inline Emission cmd_shapiro_verify(long p, int r, std::size_t oversample, std::size_t samples, bool include_excluded) {
    Emission e{"shapiro verify"};
    e.parameters["p"] = p;
    e.parameters["r"] = r;
    e.parameters["oversample"] = oversample;
    e.parameters["parseval_samples"] = samples;
    e.parameters["include_excluded"] = include_excluded;
    const auto fam = shapiro::shapiro_family(p, r);
    const auto rep = shapiro::flatness_check(fam, oversample, include_excluded);
    Json entries = Json::array();
    for (const auto& x : rep.entries) {
        entries.push_back(Json{{"i", x.i}, {"k", x.k}, {"sup_norm", x.sup_norm}, {"bound", x.bound},
                               {"excluded", x.excluded}, {"pass", x.pass}});
        e.csv_rows.push_back({static_cast<double>(x.i), static_cast<double>(x.k), x.sup_norm, x.bound, x.excluded ? 1.0 : 0.0});
    }
    e.csv_header = {"i", "k", "sup_norm", "bound", "excluded"};
    e.result = Json{{"p", p},
                    {"r", r},
                    {"parseval_error", shapiro::parseval_check(fam, samples)},
                    {"bound", rep.bound},
                    {"violations", rep.violations},
                    {"pass", rep.violations == 0},
                    {"entries", entries}};
    return e;
}

inline Emission cmd_shapiro_et(long p, int r, long K, double c, std::size_t index, std::size_t oversample) {
    Emission e{"shapiro et-bound"};
    e.parameters["p"] = p;
    e.parameters["r"] = r;
    e.parameters["K"] = K;
    e.parameters["c"] = c;
    e.parameters["index"] = index;
    e.parameters["oversample"] = oversample;
    const auto fam = shapiro::shapiro_family(p, r);
    require(index < static_cast<std::size_t>(p), "--index must be < p");
    const DensePoly f = fam.poly(index);
    Json terms = Json::array();
    for (long k = 1; k <= K; ++k) {
        const double norm = shapiro::sup_norm(shapiro::hadamard_power(f, k), oversample);
        terms.push_back(Json{{"k", k}, {"sup_norm", norm}});
        e.csv_rows.push_back({static_cast<double>(k), norm});
    }
    e.csv_header = {"k", "sup_norm"};
    const double n = static_cast<double>(fam.length());
    e.result = Json{{"n", fam.length()},
                    {"bound", shapiro::erdos_turan_bound(f, K, c, oversample)},
                    {"split_bound", shapiro::flat_split_bound(p, r, K, c)},
                    {"n_two_thirds_log2_n", std::pow(n, 2.0 / 3.0) * std::log2(std::max(n, 2.0))},
                    {"c_scaled", true},
                    {"terms", terms}};
    return e;
}

inline Emission cmd_newton_analyze(const std::string& path, const Tolerances& tol) {
    Emission e{"newton analyze", {path}};
    const auto f = io::bivariate_from_json(io::read_json_file(path));
    const auto P = newton::newton_polytope(f);
    e.result["polytope"] = io::to_json(P);
    e.result["x_power"] = f.min_i();
    const auto g = newton::x_normalized(f);
    e.result["deg_x_normalized"] = g.max_i();
    const auto setup = newton::edge_setup(f);
    e.result["substitution"] = setup.substitution;
    const auto star = newton::f_star(setup.poly);
    e.result["f_star"] = io::to_json(star);
    e.result["deg_x_f_star"] = star.max_i();
    if (g.max_i() >= 1) {
        const auto choice = newton::select_radius(f, root_options(tol));
        e.result["radius"] = Json{{"r", choice.r}, {"separated", choice.separated}};
    }
    return e;
}

inline Emission cmd_newton_bias_search(const std::string& path, std::size_t phi_steps, double radius, bool star,
                                       const Tolerances& tol, const Context& ctx) {
    Emission e{"newton bias-search", {path}};
    const auto f = io::bivariate_from_json(io::read_json_file(path));
    newton::BiasSearchOptions o;
    o.phi_steps = phi_steps;
    o.radius = radius;
    o.include_star = star;
    o.poly.root = root_options(tol);
    o.threads = ctx.threads;
    e.parameters["phi_steps"] = phi_steps;
    e.parameters["radius"] = radius > 0 ? Json(radius) : Json("auto");
    e.parameters["include_star"] = star;
    e.parameters["tolerances"] = to_json(tol);
    const auto res = newton::bias_search(f, o);
    Json sweep = Json::array();
    for (const auto& s : res.sweep) {
        sweep.push_back(Json{{"phi", s.phi}, {"bias", s.bias}, {"star_bias", s.star_bias}});
        e.csv_rows.push_back({s.phi, s.bias, s.star_bias});
    }
    e.csv_header = {"phi", "bias", "star_bias"};
    const double s = static_cast<double>(res.lower_edges);
    e.result = Json{{"a", io::to_json(res.a)},
                    {"phi", res.phi},
                    {"radius", res.radius},
                    {"flipped", res.flipped},
                    {"s", res.lower_edges},
                    {"vertices", res.vertices},
                    {"report", io::to_json(res.report)},
                    {"bound", std::sqrt(s / 12.0) - 1.0},
                    {"star_best", res.star_best},
                    {"star_best_phi", res.star_best_phi},
                    {"star_substitution", res.star_substitution},
                    {"sweep", sweep}};
    return e;
}

inline Emission cmd_newton_edge_check(const std::string& path, double phi, double r, double eps, const Tolerances& tol) {
    Emission e{"newton edge-check", {path}};
    const auto f = io::bivariate_from_json(io::read_json_file(path));
    PolyBiasOptions po;
    po.root = root_options(tol);
    if (r <= 0) r = newton::select_radius(f, po.root).r;
    e.parameters["phi"] = phi;
    e.parameters["r"] = r;
    e.parameters["eps"] = eps;
    e.parameters["tolerances"] = to_json(tol);
    const auto rep = newton::edge_approx_check(f, phi, r, eps, po);
    Json annuli = Json::array();
    for (const auto& a : rep.annuli)
        annuli.push_back(Json{{"gradient", a.gradient}, {"expected", a.expected}, {"occupancy", a.occupancy},
                              {"inner", a.inner}, {"outer", a.outer}, {"max_arg", a.max_arg}});
    e.result = Json{{"phi", rep.phi},
                    {"r", rep.r},
                    {"eps", rep.eps},
                    {"substitution", rep.substitution},
                    {"bias_f", rep.bias_f},
                    {"bias_star", rep.bias_star},
                    {"gap", rep.gap},
                    {"annuli", annuli},
                    {"unassigned", rep.unassigned},
                    {"occupancy_ok", rep.occupancy_ok},
                    {"max_arg_mismatch", rep.max_arg_mismatch},
                    {"matched", rep.matched}};
    return e;
}

inline Emission cmd_newton_from_runners(const std::string& path, bool real) {
    Emission e{"newton from-runners", {path}};
    e.parameters["real"] = real;
    const auto sys = io::runners_from_json(io::read_json_file(path));
    const auto f = real ? newton::runner_poly_real(sys) : newton::runner_poly(sys);
    e.result = io::to_json(f);
    e.result["distinct_speeds"] = sys.distinct_speeds();
    e.result["vertices"] = newton::newton_polytope(f).vertices.size();
    return e;
}

inline Emission cmd_realroots_drive(const std::string& path, std::size_t grid_steps, const std::vector<double>& schedule,
                                    const Tolerances& tol, const Context& ctx) {
    Emission e{"realroots drive", {path}};
    const auto f = io::bivariate_from_json(io::read_json_file(path));
    realroots::DriverOptions o;
    if (!schedule.empty()) o.r_schedule = schedule;
    o.grid_steps = grid_steps;
    o.cluster_tol = tol.cluster_tol;
    o.root = root_options(tol);
    o.threads = ctx.threads;
    e.parameters["grid_steps"] = grid_steps ? Json(grid_steps) : Json("auto");
    e.parameters["r_schedule"] = o.r_schedule;
    e.parameters["tolerances"] = to_json(tol);
    const auto rep = realroots::real_roots_driver(f, o);
    Json iv = Json::array();
    for (const auto& w : rep.intervals)
        iv.push_back(Json{{"edge", w.edge}, {"gradient", w.gradient}, {"lo", w.lo}, {"hi", w.hi}});
    const double steps = static_cast<double>(rep.phase_curve.size());
    for (std::size_t k = 0; k < rep.phase_curve.size(); ++k)
        e.csv_rows.push_back({2.0 * std::numbers::pi * static_cast<double>(k) / steps, static_cast<double>(rep.phase_curve[k])});
    e.csv_header = {"phi", "V"};
    e.result = Json{{"a", io::to_json(rep.a)},
                    {"phi", rep.phi},
                    {"r", rep.r},
                    {"chain", std::string(realroots::to_string(rep.chain))},
                    {"count", rep.count},
                    {"intervals", iv},
                    {"s", rep.s},
                    {"bound", rep.bound},
                    {"variations", rep.variations},
                    {"confirmed", rep.confirmed},
                    {"fallback", rep.fallback}};
    return e;
}

inline Emission cmd_poly_roots(const std::string& path, const Tolerances& tol) {
    Emission e{"poly roots", {path}};
    e.parameters["tolerances"] = to_json(tol);
    const DensePoly f = io::dense_from_json(io::read_json_file(path));
    PolyBiasOptions po;
    po.root = root_options(tol);
    const RootSet rs = roots(f, po.root);
    e.result = io::to_json(rs);
    if (f.degree() >= 1 && rs.roots.size() > 0) e.result["bias"] = io::to_json(bias_of_poly(f, po));
    if (f.is_real() && f.degree() >= 1) e.result["distinct_real_roots"] = distinct_real_roots(f, tol.cluster_tol, po.root).count;
    return e;
}

// ---------------------------------------------------------------- dispatch

/**
 * Parse argv and run one command, writing JSON to `out` unless --out is
 * given. Error messages go to `err`.
 */
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Bias of point sets on the circle: runners, flat polynomials and root angles."};
    app.footer(env_help);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    Context ctx;
    ctx.out = &out;
    std::function<Emission(const Tolerances&)> action;

    auto common = [&](CLI::App* sub, bool csv) {
        sub->add_option("--out", ctx.out_path, "Write JSON to this file instead of stdout");
        sub->add_option("--threads", ctx.threads, "Worker threads for sweeps (results do not depend on it)")
            ->check(CLI::Range(1u, 1024u));
        if (csv) sub->add_option("--csv", ctx.csv_path, "Also write sweep data as CSV to this file");
    };

    // bias
    std::string input;
    std::optional<std::string> aperture;
    {
        auto* sub = app.add_subcommand("bias", "Exact bias of a point configuration");
        sub->add_option("points", input, "JSON file with points")->required();
        sub->add_option("--aperture", aperture, "Restrict to sectors of this aperture (rational)");
        common(sub, false);
        sub->callback([&] { action = [&](const Tolerances&) { return cmd_bias(input, aperture); }; });
    }

    // runners
    bool exact = false;
    std::optional<std::size_t> grid;
    std::size_t k_pairs = 0, samples = 1000, n = 0, trials = 0;
    std::uint64_t seed = 0;
    {
        auto* runners = app.add_subcommand("runners", "Runner systems");
        runners->require_subcommand(1);

        auto* opt = runners->add_subcommand("optimize", "Maximum bias over time");
        opt->add_option("system", input, "JSON runner system")->required();
        opt->add_flag("--exact", exact, "Exact event sweep (default; integer speeds)");
        opt->add_option("--grid", grid, "Sampled search with N grid steps")->check(CLI::PositiveNumber);
        opt->add_option("--aperture", aperture, "Fix the sector aperture (exact sweep only)");
        common(opt, false);
        opt->callback([&] {
            action = [&](const Tolerances& t) { return cmd_runners_optimize(input, exact, grid, aperture, t, ctx); };
        });

        auto* anti = runners->add_subcommand("antipodal", "Antipodal pair system and half-sector counts");
        anti->add_option("K", k_pairs, "Number of pairs")->required()->check(CLI::PositiveNumber);
        anti->add_option("--samples", samples, "Random dyadic times to check (0 to skip)");
        anti->add_option("--seed", seed, "Seed for the sampled times");
        common(anti, false);
        anti->callback([&] { action = [&](const Tolerances&) { return cmd_runners_antipodal(k_pairs, samples, seed, ctx); }; });

        auto* ch = runners->add_subcommand("chernoff", "Grid-sector deviation experiment with random starts");
        ch->add_option("--n", n, "Runners (speeds 1..n)")->required();
        ch->add_option("--trials", trials, "Number of trials")->required();
        ch->add_option("--seed", seed, "Seed (mandatory)")->required();
        common(ch, true);
        ch->callback([&] { action = [&](const Tolerances&) { return cmd_runners_chernoff(n, trials, seed, ctx); }; });
    }

    // shapiro
    long p = 0, K = 0;
    int r = 0;
    std::size_t oversample = 16, parseval_samples = 1024, index = 0;
    double c = 1.0;
    bool include_excluded = false;
    {
        auto* sh = app.add_subcommand("shapiro", "Shapiro-type flat polynomial families");
        sh->require_subcommand(1);
        auto add_pr = [&](CLI::App* s) {
            s->add_option("--p", p, "Prime")->required();
            s->add_option("--r", r, "Level")->required()->check(CLI::NonNegativeNumber);
        };

        auto* gen = sh->add_subcommand("gen", "Generate the family");
        add_pr(gen);
        common(gen, false);
        gen->callback([&] { action = [&](const Tolerances&) { return cmd_shapiro_gen(p, r); }; });

        auto* ver = sh->add_subcommand("verify", "Parseval identity and Hadamard-power flatness");
        add_pr(ver);
        ver->add_option("--oversample", oversample, "Samples per coefficient (>= 4)");
        ver->add_option("--samples", parseval_samples, "Sample points for the Parseval check");
        ver->add_flag("--include-excluded", include_excluded, "Also list powers k divisible by p");
        common(ver, true);
        ver->callback([&] {
            action = [&](const Tolerances&) { return cmd_shapiro_verify(p, r, oversample, parseval_samples, include_excluded); };
        });

        auto* et = sh->add_subcommand("et-bound", "Erdos-Turan style bias bound from Hadamard-power norms");
        add_pr(et);
        et->add_option("--K", K, "Number of terms")->required();
        et->add_option("--c", c, "Constant factor (the bound is reported c-scaled)");
        et->add_option("--index", index, "Family member");
        et->add_option("--oversample", oversample, "Samples per coefficient (>= 4)");
        common(et, true);
        et->callback([&] { action = [&](const Tolerances&) { return cmd_shapiro_et(p, r, K, c, index, oversample); }; });
    }

    // newton
    std::size_t phi_steps = 64;
    double radius = 0.0, phi = 0.0, eps = 0.1;
    bool no_star = false, real = false;
    {
        auto* nw = app.add_subcommand("newton", "Bivariate polynomials and Newton polytopes");
        nw->require_subcommand(1);

        auto* an = nw->add_subcommand("analyze", "Polytope, edges, gradients and f*");
        an->add_option("poly", input, "JSON bivariate polynomial")->required();
        common(an, false);
        an->callback([&] { action = [&](const Tolerances& t) { return cmd_newton_analyze(input, t); }; });

        auto* bs = nw->add_subcommand("bias-search", "Search a with large root-angle bias of f(x, a)");
        bs->add_option("poly", input, "JSON bivariate polynomial")->required();
        bs->add_option("--phi-steps", phi_steps, "Grid points for phi")->check(CLI::PositiveNumber);
        bs->add_option("--radius", radius, "|a|; omit for the edge-approximation radius");
        bs->add_flag("--no-star", no_star, "Skip the f* sweep");
        common(bs, true);
        bs->callback([&] {
            action = [&](const Tolerances& t) { return cmd_newton_bias_search(input, phi_steps, radius, !no_star, t, ctx); };
        });

        auto* ec = nw->add_subcommand("edge-check", "Compare root angles of f(x, r e^{i phi}) with f*");
        ec->add_option("poly", input, "JSON bivariate polynomial")->required();
        ec->add_option("--phi", phi, "Argument of y");
        ec->add_option("--r", radius, "|y|; omit for the automatic radius");
        ec->add_option("--eps", eps, "Matching tolerance in (0,1)");
        common(ec, false);
        ec->callback([&] { action = [&](const Tolerances& t) { return cmd_newton_edge_check(input, phi, radius, eps, t); }; });

        auto* fr = nw->add_subcommand("from-runners", "Runner polynomial prod (x - e^{2 pi i s_j} y^{v_j})");
        fr->add_option("system", input, "JSON runner system")->required();
        fr->add_flag("--real", real, "Real sibling with conjugate factors");
        common(fr, false);
        fr->callback([&] { action = [&](const Tolerances&) { return cmd_newton_from_runners(input, real); }; });
    }

    // realroots
    std::size_t grid_steps = 0;
    std::vector<double> schedule;
    {
        auto* rr = app.add_subcommand("realroots", "Distinct real roots of Re(f(x, a))");
        rr->require_subcommand(1);
        auto* dr = rr->add_subcommand("drive", "Choose a by sign variations and bracket real roots");
        dr->add_option("poly", input, "JSON bivariate polynomial")->required();
        dr->add_option("--grid-steps", grid_steps, "Phase grid size (default 8 * max y-exponent, at least 64)");
        dr->add_option("--r-schedule", schedule, "Decreasing radii to try")->delimiter(',');
        common(dr, true);
        dr->callback([&] {
            action = [&](const Tolerances& t) { return cmd_realroots_drive(input, grid_steps, schedule, t, ctx); };
        });
    }

    // poly
    {
        auto* po = app.add_subcommand("poly", "Univariate polynomials");
        po->require_subcommand(1);
        auto* ro = po->add_subcommand("roots", "All roots with residuals and root-angle bias");
        ro->add_option("poly", input, "JSON coefficients, constant term first")->required();
        common(ro, false);
        ro->callback([&] { action = [&](const Tolerances& t) { return cmd_poly_roots(input, t); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        const Tolerances tol = tolerances_from_env();
        emit(ctx, action(tol));
        return 0;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n" << e.diagnostics() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace circbias::cli
