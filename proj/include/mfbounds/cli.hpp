#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mfbounds/bounds.hpp"
#include "mfbounds/error.hpp"
#include "mfbounds/experiment.hpp"
#include "mfbounds/grids.hpp"
#include "mfbounds/io.hpp"
#include "mfbounds/legendre.hpp"
#include "mfbounds/partition.hpp"
#include "mfbounds/reference_spectrum.hpp"
#include "mfbounds/registry.hpp"
#include "mfbounds/sample_path.hpp"
#include "mfbounds/scaling.hpp"
#include "mfbounds/scaling_function.hpp"
#include "mfbounds/sim.hpp"
#include "mfbounds/svg.hpp"

namespace mfbounds::cli {

// Counts are read as reals so that 1e4 is accepted, then checked.
inline std::size_t to_count(const char* field, double v, std::size_t min = 1) {
    if (!std::isfinite(v) || v != std::floor(v) || v < static_cast<double>(min) || v > 9.0e15)
        throw ValidationError(field, "must be an integer >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

struct ModelFlags {
    std::optional<double> hurst, alpha, sigma, beta, mu, kernel_cutoff, mesh, delta, lambda, refine, lambda2,
        corr_length;
    bool gaussian = false;

    // Parameters given on the command line, keyed by their JSON names.
    std::map<std::string, double> given() const {
        std::map<std::string, double> g;
        const std::pair<const char*, const std::optional<double>*> all[] = {
            {"hurst", &hurst}, {"alpha", &alpha},   {"sigma", &sigma},   {"beta", &beta},
            {"mu", &mu},       {"kernel_cutoff", &kernel_cutoff},        {"mesh", &mesh},
            {"delta", &delta}, {"lambda", &lambda}, {"refine", &refine}, {"lambda2", &lambda2},
            {"horizon", &corr_length}};
        for (const auto& [key, value] : all)
            if (*value) g[key] = **value;
        return g;
    }
};

inline std::string flag_name(const std::string& key) {
    if (key == "horizon") return "corr-length";
    if (key == "kernel_cutoff") return "kernel-cutoff";
    return key;
}

// Builds {"<kind>": name, params...}, rejecting parameters the chosen
// family does not take.
inline nlohmann::json model_json(const char* kind, const std::string& name, const ModelFlags& f,
                                 const std::vector<std::string>& allowed) {
    nlohmann::json j{{kind, name}};
    for (const auto& [key, value] : f.given()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError(flag_name(key), "is not a parameter of '" + name + "'");
        if (key == "kernel_cutoff" || key == "mesh" || key == "refine")
            j[key] = static_cast<int>(to_count(flag_name(key).c_str(), value));
        else j[key] = value;
    }
    return j;
}

inline std::vector<std::string> process_params(const std::string& family) {
    static const std::map<std::string, std::vector<std::string>> table{
        {"bm", {}},
        {"fbm", {"hurst"}},
        {"stable", {"alpha", "sigma", "beta", "mu"}},
        {"lfsm", {"hurst", "alpha", "kernel_cutoff", "mesh"}},
        {"ig", {"delta", "lambda"}},
        {"stable-subordinator", {"alpha", "sigma"}},
        {"inverse-stable-subordinator", {"alpha", "refine"}},
        {"cascade", {"lambda2", "horizon"}},
        {"mrw", {"lambda2", "horizon"}}};
    const auto it = table.find(family);
    if (it == table.end()) throw ValidationError("process", "unknown family '" + family + "'");
    return it->second;
}

inline std::vector<std::string> tau_model_params(const std::string& name) {
    if (name == "self-similar") return {"hurst"};
    if (name == "stable-asym" || name == "levy-asym") return {"alpha"};
    if (name == "lfsm-asym") return {"hurst", "alpha"};
    if (name == "cascade" || name == "cascade-linearized" || name == "mrw") return {"lambda2"};
    throw ValidationError("model", "unknown scaling-function model '" + name + "'");
}

inline std::vector<std::string> spectrum_model_params(const std::string& name) {
    if (name == "self-similar") return {"hurst"};
    if (name == "stable") return {"alpha"};
    if (name == "lfsm") return {"hurst", "alpha"};
    if (name == "levy") return {"beta"};
    if (name == "cascade" || name == "mrw") return {"lambda2"};
    throw ValidationError("model", "unknown spectrum model '" + name + "'");
}

inline void add_process_flags(CLI::App* app, ModelFlags& f) {
    app->add_option("--hurst", f.hurst, "Hurst index H (fbm, lfsm; dimensionless)");
    app->add_option("--alpha", f.alpha, "Stability index alpha (stable, lfsm, subordinators; dimensionless)");
    app->add_option("--sigma", f.sigma, "Stable scale sigma (units of x)");
    app->add_option("--beta", f.beta, "Stable skewness beta in [-1, 1]");
    app->add_option("--mu", f.mu, "Stable location mu (units of x per unit time)");
    app->add_option("--kernel-cutoff", f.kernel_cutoff, "LFSM kernel length (sampling steps; default 600)");
    app->add_option("--mesh", f.mesh, "LFSM kernel sub-steps per sampling step (default 256)");
    app->add_option("--delta", f.delta, "Inverse Gaussian delta (per unit time)");
    app->add_option("--lambda", f.lambda, "Inverse Gaussian tilt lambda (>= 0)");
    app->add_option("--refine", f.refine, "Inverse subordinator grid refinement factor (default 4)");
    app->add_option("--lambda2", f.lambda2, "Intermittency lambda^2 of cascade/mrw, in (0, 1/2)");
    app->add_option("--corr-length", f.corr_length,
                    "Cascade/mrw correlation length L (time units; default: the path horizon)");
}

inline void add_model_flags(CLI::App* app, ModelFlags& f) {
    app->add_option("--hurst", f.hurst, "H of self-similar / lfsm models (dimensionless)");
    app->add_option("--alpha", f.alpha, "Tail or stability index alpha (dimensionless)");
    app->add_option("--beta", f.beta, "Blumenthal-Getoor index beta of the levy spectrum");
    app->add_flag("--gaussian", f.gaussian, "The levy process has a Brownian component");
    app->add_option("--lambda2", f.lambda2, "Intermittency lambda^2 of cascade/mrw models, in (0, 1/2)");
}

struct GridFlags {
    std::optional<double> q_min, q_max, q_step;
    std::vector<double> qs;
    std::optional<double> scales;
    std::vector<double> deltas;
    std::string mode = "standard";
    std::optional<double> m;
};

inline void add_grid_flags(CLI::App* app, GridFlags& g) {
    app->add_option("--q-min", g.q_min, "Smallest moment order (default -3)");
    app->add_option("--q-max", g.q_max, "Largest moment order (default 4)");
    app->add_option("--q-step", g.q_step, "Moment grid spacing (default 0.25); |q| < 0.01 is skipped");
    app->add_option("--qs", g.qs, "Explicit moment orders, overriding the range")->delimiter(',');
    app->add_option("--scales", g.scales, "Number N of geometric scales n^{i/N} (default 20)");
    app->add_option("--deltas", g.deltas, "Explicit scales (time units, multiples of the step)")->delimiter(',');
    app->add_option("--mode", g.mode, "Partition function: standard or modified (default standard)")
        ->check(CLI::IsMember({"standard", "modified"}));
    app->add_option("--m", g.m, "Increments per block for the modified mode (default 20)");
}

struct Inputs {
    std::string config;
    std::optional<nlohmann::json> json() const {
        if (config.empty()) return std::nullopt;
        return io::read_json(config);
    }
};

// Grid flags resolved against defaults and an optional config file.
struct ResolvedGrid {
    MomentGrid qs;
    PartitionMode mode;
    std::size_t m;
    std::optional<std::size_t> scales;
    std::vector<double> deltas;
};

inline ResolvedGrid resolve_grid(const GridFlags& g, const std::optional<ExperimentConfig>& cfg) {
    ResolvedGrid r;
    r.mode = g.mode == "modified" ? PartitionMode::modified : PartitionMode::standard;
    r.m = g.m ? to_count("m", *g.m) : cfg ? cfg->m : kDefaultBlockSize;
    if (r.m == 0) throw ValidationError("m", "must be a positive integer");
    if (!g.qs.empty()) {
        r.qs = MomentGrid(g.qs);
    } else {
        const double qmin = g.q_min.value_or(cfg ? cfg->q_min : -3.0);
        const double qmax = g.q_max.value_or(cfg ? cfg->q_max : 4.0);
        const double qstep = g.q_step.value_or(cfg ? cfg->q_step : 0.25);
        r.qs = MomentGrid::range(qmin, qmax, qstep);
    }
    if (g.scales) r.scales = to_count("scales", *g.scales);
    else if (cfg) r.scales = cfg->scales;
    r.deltas = g.deltas;
    return r;
}

inline ScaleGrid resolve_scales(const ResolvedGrid& r, const SamplePath& path) {
    if (!r.deltas.empty()) return ScaleGrid::from_deltas(r.deltas, path.step());
    const std::size_t n = path.increments();
    const std::size_t max_lag = r.mode == PartitionMode::modified ? n / (2 * r.m) : n;
    if (max_lag == 0) throw BlockError("m = " + std::to_string(r.m) + " leaves no admissible scale");
    return ScaleGrid::geometric(path, r.scales.value_or(kDefaultScaleCount), max_lag);
}

inline PartitionTable compute_table(const ResolvedGrid& r, const SamplePath& path) {
    const auto deltas = resolve_scales(r, path);
    return r.mode == PartitionMode::standard ? partition_function(path, r.qs, deltas)
                                             : modified_partition_function(path, r.qs, deltas, r.m);
}

// A tau table written by `scaling` (q,tau_hat,r2) or a reference (q,tau).
inline ScalingFunction read_tau_table(const std::filesystem::path& csv, MomentRange range) {
    const std::string text = io::read_file(csv);
    const std::string header = text.substr(0, text.find('\n'));
    const bool estimate = header.rfind("q,tau_hat,r2", 0) == 0;
    const auto rows = estimate ? io::read_csv(csv, {"q", "tau_hat", "r2"}) : io::read_csv(csv, {"q", "tau"});
    std::vector<double> qs, tau;
    for (const auto& row : rows) {
        qs.push_back(row[0]);
        tau.push_back(row[1]);
    }
    return tabulated_tau(std::move(qs), std::move(tau), range);
}

inline std::string help_footer() {
    return "Exit codes: 0 success, 1 invalid input, 2 numerical or runtime failure.\n"
           "Runs are registered in $MFBOUNDS_RUNS_DIR/runs.jsonl (default: runs/runs.jsonl).";
}

inline int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation and multifractal estimation toolkit: partition functions, scaling functions, "
                 "Legendre spectra and support bounds.",
                 "mfbounds"};
    app.require_subcommand(1);
    app.footer(help_footer());
    Inputs inputs;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate one sample path and write it as CSV (t,x) with a JSON sidecar");
    std::string family;
    ModelFlags pf;
    std::optional<double> n_flag, horizon_flag;
    std::optional<std::uint64_t> seed_flag;
    std::string out_path;
    sim->add_option("--process", family,
                    "Family: bm, fbm, stable, lfsm, ig, stable-subordinator, inverse-stable-subordinator, cascade, mrw");
    sim->add_option("--n", n_flag, "Number of increments (path has n+1 points; default 10000)");
    sim->add_option("--horizon", horizon_flag, "Time horizon T (time units; default: n, i.e. unit step)");
    sim->add_option("--seed", seed_flag, "64-bit seed (default 1)");
    add_process_flags(sim, pf);
    sim->add_option("--out", out_path, "Output CSV path")->required();
    sim->add_option("--config", inputs.config, "Experiment config JSON supplying defaults for these flags");

    // partition / scaling share the grid flags
    GridFlags grid;
    std::string input_path;
    std::optional<double> r2_threshold;
    auto* part = app.add_subcommand("partition", "Compute a partition-function table (CSV q,delta_t,S)");
    part->add_option("--input", input_path, "Path CSV written by simulate")->required();
    add_grid_flags(part, grid);
    part->add_option("--out", out_path, "Output CSV path")->required();
    part->add_option("--config", inputs.config, "Experiment config JSON supplying grid defaults");

    auto* scal = app.add_subcommand("scaling", "Estimate the scaling function by log-log regression (CSV q,tau_hat,r2)");
    scal->add_option("--input", input_path, "Path CSV written by simulate")->required();
    add_grid_flags(scal, grid);
    scal->add_option("--r2-threshold", r2_threshold, "Linearity check threshold on r^2 (default 0.98)");
    scal->add_option("--out", out_path, "Output CSV path")->required();
    scal->add_option("--config", inputs.config, "Experiment config JSON supplying grid defaults");

    // spectrum
    auto* spec = app.add_subcommand("spectrum", "Legendre spectrum of a scaling function, or a closed-form spectrum (CSV h,d)");
    std::string tau_path, model_name_flag, plot_path;
    ModelFlags mf;
    bool closed_form = false;
    std::optional<double> h_min, h_max, h_step, lq_min, lq_max, lq_step;
    spec->add_option("--tau", tau_path, "Scaling-function CSV (q,tau_hat,r2 or q,tau)");
    spec->add_option("--model", model_name_flag,
                     "Model: self-similar, stable-asym, lfsm-asym, levy-asym, cascade, cascade-linearized, mrw; "
                     "with --closed-form: self-similar, stable, lfsm, levy, cascade, mrw");
    add_model_flags(spec, mf);
    spec->add_flag("--closed-form", closed_form, "Write the closed-form spectrum of --model instead of a Legendre transform");
    spec->add_option("--h-min", h_min, "Smallest Hoelder exponent h (default -0.25)");
    spec->add_option("--h-max", h_max, "Largest Hoelder exponent h (default 2)");
    spec->add_option("--h-step", h_step, "h grid spacing (default 0.005)");
    spec->add_option("--q-min", lq_min, "Legendre window lower end (default -20, or the table start)");
    spec->add_option("--q-max", lq_max, "Legendre window upper end (default 20, or the table end)");
    spec->add_option("--q-step", lq_step, "Legendre grid spacing in q (default 0.001)");
    spec->add_option("--out", out_path, "Output CSV path")->required();
    spec->add_option("--plot", plot_path, "Also render the curve as SVG to this path");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "Support bounds H-, H~+, H+ and H-sssi bounds (JSON)");
    std::optional<double> q_lower, q_upper, factor_q_lower, sssi_h, sssi_qbar;
    bool factor = false;
    bnd->add_option("--tau", tau_path, "Scaling-function CSV (q,tau_hat,r2 or q,tau)");
    bnd->add_option("--model", model_name_flag,
                    "Model: self-similar, stable-asym, lfsm-asym, levy-asym, cascade, cascade-linearized, mrw");
    add_model_flags(bnd, mf);
    bnd->add_option("--q-lower", q_lower, "Lower end of the finite-moment range (default: model's; may be -inf)");
    bnd->add_option("--q-upper", q_upper, "Upper end of the finite-moment range (default: model's; may be inf)");
    bnd->add_flag("--factor", factor, "Also compute H+ treating the model as the multiplicative factor's tau");
    bnd->add_option("--factor-q-lower", factor_q_lower, "Lower finite-moment end for the factor (default -inf)");
    bnd->add_option("--hsssi-hurst", sssi_h, "H of an H-sssi process for the [H - 1/q_upper, H] bounds");
    bnd->add_option("--q-bar", sssi_qbar, "Upper finite-moment order for the H-sssi bounds (may be inf)");
    bnd->add_option("--out", out_path, "Output JSON path (default: standard output)");

    // figure
    auto* fig = app.add_subcommand("figure", "Run a figure preset (1 BM, 2 stable, 3 LFSM, 4 MRW) or a config file");
    std::optional<int> which;
    std::string outdir;
    std::optional<double> seed_count;
    fig->add_option("which", which, "Preset number 1-4")->check(CLI::Range(1, 4));
    fig->add_option("--outdir", outdir, "Output directory (default: <runs dir>/<run id>)");
    fig->add_option("--seeds", seed_count, "Use seeds 1..k instead of the preset's 10");
    fig->add_option("--config", inputs.config, "Experiment config JSON; with a preset number its keys override the preset");

    // list-runs
    auto* lst = app.add_subcommand("list-runs", "List registered runs in insertion order");
    std::string run_id_flag;
    lst->add_option("--id", run_id_flag, "Print the full record of one run");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
        if (e.get_exit_code() == 0) {
            out << (sub ? sub->help() : app.help());
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (sim->parsed()) {
            std::optional<ExperimentConfig> cfg;
            if (auto j = inputs.json()) cfg = config_from_json(*j);
            ProcessSpec process;
            if (!family.empty()) process = process_from_json(model_json("family", family, pf, process_params(family)));
            else if (cfg) process = cfg->process;
            else throw ValidationError("process", "is required (or give --config)");
            const std::size_t n = n_flag ? to_count("n", *n_flag, 2) : cfg ? cfg->n : 10000;
            const double horizon = horizon_flag ? *horizon_flag : cfg ? cfg->horizon : static_cast<double>(n);
            if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon", "must be positive");
            if (!family.empty() && !pf.corr_length) {
                if (auto* p = std::get_if<process::LognormalCascade>(&process)) p->horizon = horizon;
                if (auto* p = std::get_if<process::MRW>(&process)) p->horizon = horizon;
            }
            const std::uint64_t seed = seed_flag ? *seed_flag : cfg ? cfg->seeds.front() : 1;
            const auto path = generate(process, n, horizon, Seed{seed});
            write_path(path, out_path);
            for (const auto& w : path.warnings) err << "warning: " << w << "\n";
            out << "wrote " << out_path << " (" << path.values.size() << " points, " << path.id() << ")\n";
            return 0;
        }
        if (part->parsed() || scal->parsed()) {
            std::optional<ExperimentConfig> cfg;
            if (auto j = inputs.json()) cfg = config_from_json(*j);
            const auto grid_spec = resolve_grid(grid, cfg);
            const double threshold = r2_threshold.value_or(kDefaultR2Threshold);
            if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("r2-threshold", "must lie in [0, 1]");
            const auto path = read_path(input_path);
            const auto table = compute_table(grid_spec, path);
            if (part->parsed()) {
                write_partition(table, out_path);
                out << "wrote " << out_path << " (" << table.qs.size() << " x " << table.deltas.size() << " cells)\n";
                return 0;
            }
            const auto est = scaling_function(table);
            for (const auto& rep : linearity_check(table, threshold))
                if (!rep.pass)
                    err << "warning: log-log linearity fails at q=" << io::format_double(rep.q)
                        << " (r2=" << io::format_double(rep.r2) << ")\n";
            write_scaling(est, table.deltas, out_path);
            out << "wrote " << out_path << " (" << est.qs.size() << " moments, " << table.deltas.size() << " scales)\n";
            return 0;
        }
        if (spec->parsed()) {
            const auto hs = h_grid(h_min.value_or(-0.25), h_max.value_or(2.0), h_step.value_or(0.005));
            SpectrumCurve curve;
            if (closed_form) {
                if (model_name_flag.empty()) throw ValidationError("model", "--closed-form needs --model");
                auto j = model_json("model", model_name_flag, mf, spectrum_model_params(model_name_flag));
                if (mf.gaussian) j["gaussian"] = true;
                curve = theoretical_spectrum(spectrum_model_from_json(j), hs);
            } else {
                if (tau_path.empty() == model_name_flag.empty())
                    throw ValidationError("tau", "give exactly one of --tau and --model");
                if (mf.gaussian) throw ValidationError("gaussian", "only applies with --closed-form");
                LegendreOptions opt;
                opt.q_step = lq_step.value_or(opt.q_step);
                if (!tau_path.empty()) {
                    const auto tau = read_tau_table(tau_path, {});
                    opt.q_min = lq_min.value_or(tau.table()->qs.front());
                    opt.q_max = lq_max.value_or(tau.table()->qs.back());
                    curve = legendre_spectrum(tau, hs, opt);
                } else {
                    const auto tau = theoretical_tau(
                        tau_model_from_json(model_json("model", model_name_flag, mf, tau_model_params(model_name_flag))));
                    opt.q_min = lq_min.value_or(opt.q_min);
                    opt.q_max = lq_max.value_or(opt.q_max);
                    curve = legendre_spectrum(tau, hs, opt);
                }
            }
            write_spectrum(curve, out_path);
            if (!plot_path.empty())
                render_plot({Series{curve.provenance, curve.hs, curve.d}}, "h", "d(h)", plot_path, "spectrum");
            for (const auto& w : curve.warnings) err << "warning: " << w << "\n";
            out << "wrote " << out_path << " (" << curve.hs.size() << " points)\n";
            return 0;
        }
        if (bnd->parsed()) {
            SpectrumBounds b;
            const bool have_tau = !tau_path.empty() || !model_name_flag.empty();
            if (!tau_path.empty() && !model_name_flag.empty())
                throw ValidationError("tau", "give at most one of --tau and --model");
            if (mf.gaussian || mf.beta) throw ValidationError("model", "--beta/--gaussian only apply to spectra");
            if (have_tau) {
                std::optional<ScalingFunction> tau;
                if (!tau_path.empty()) {
                    tau = read_tau_table(tau_path, {q_lower.value_or(-std::numeric_limits<double>::infinity()),
                                                    q_upper.value_or(std::numeric_limits<double>::infinity())});
                } else {
                    const auto model = tau_model_from_json(
                        model_json("model", model_name_flag, mf, tau_model_params(model_name_flag)));
                    MomentRange range = default_moment_range(model);
                    if (q_lower) range.lower = *q_lower;
                    if (q_upper) range.upper = *q_upper;
                    tau = theoretical_tau(model, range);
                    if (factor)
                        b.h_plus = h_plus_from_factor_tau(theoretical_tau(
                            model, {factor_q_lower.value_or(-std::numeric_limits<double>::infinity()),
                                    std::numeric_limits<double>::infinity()}));
                }
                const auto tb = support_bounds_from_tau(*tau);
                b.h_minus = tb.h_minus;
                b.h_tilde_plus = tb.h_tilde_plus;
                if (factor && !tau_path.empty()) b.h_plus = h_plus_from_factor_tau(*tau);
            } else if (factor) {
                throw ValidationError("factor", "needs --model or --tau");
            }
            if (sssi_h || sssi_qbar) {
                if (!sssi_h || !sssi_qbar) throw ValidationError("hsssi-hurst", "--hsssi-hurst and --q-bar go together");
                b.hsssi = hsssi_bounds(*sssi_h, *sssi_qbar);
            }
            if (!have_tau && !b.hsssi) throw ValidationError("model", "nothing to compute: give --model, --tau or --hsssi-hurst");
            const auto j = bounds_json(b);
            if (out_path.empty()) out << j.dump(2) << "\n";
            else {
                io::write_json(out_path, j);
                out << "wrote " << out_path << "\n";
            }
            return 0;
        }
        if (fig->parsed()) {
            ExperimentConfig cfg;
            const auto j = inputs.json();
            if (which) cfg = j ? config_from_json(*j, figure_preset(*which)) : figure_preset(*which);
            else if (j) cfg = config_from_json(*j);
            else throw ValidationError("which", "give a preset number or --config");
            if (seed_count) {
                cfg.seeds.clear();
                for (std::size_t s = 1; s <= to_count("seeds", *seed_count); ++s) cfg.seeds.push_back(s);
            }
            const auto rec = run_experiment(cfg, RunOptions{runs_root(), outdir});
            out << rec.id << " " << rec.status << " " << rec.directory << "\n";
            if (rec.status != "ok") {
                err << "error: run " << rec.id << " failed: " << rec.error << "\n";
                return 2;
            }
            return 0;
        }
        if (lst->parsed()) {
            const auto root = runs_root();
            if (!run_id_flag.empty()) {
                out << to_json_value(registry_get(root, run_id_flag)).dump(2) << "\n";
                return 0;
            }
            for (const auto& r : registry_list(root)) out << r.id << " " << r.status << " " << r.directory << "\n";
            return 0;
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        // A violated theorem hypothesis is a property of the inputs.
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

// Help text for the top level and every subcommand, as printed by --help.
inline std::string full_help() {
    std::ostringstream all, sink;
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"--help"}, {"simulate", "--help"}, {"partition", "--help"}, {"scaling", "--help"},
          {"spectrum", "--help"}, {"bounds", "--help"}, {"figure", "--help"}, {"list-runs", "--help"}}) {
        std::ostringstream out;
        parse_and_dispatch(args, out, sink);
        all << out.str() << "\n";
    }
    return all.str();
}

}  // namespace mfbounds::cli
