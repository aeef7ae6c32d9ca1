#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "mfbounds/bounds.hpp"
#include "mfbounds/error.hpp"
#include "mfbounds/grids.hpp"
#include "mfbounds/io.hpp"
#include "mfbounds/legendre.hpp"
#include "mfbounds/partition.hpp"
#include "mfbounds/process_spec.hpp"
#include "mfbounds/reference_spectrum.hpp"
#include "mfbounds/registry.hpp"
#include "mfbounds/scaling.hpp"
#include "mfbounds/scaling_function.hpp"
#include "mfbounds/sim.hpp"
#include "mfbounds/svg.hpp"

namespace mfbounds {

// Folded into every run id so that results from a changed estimator never
// share an id with older ones.
inline constexpr const char* kCodeVersion = "mfbounds-0.1.0";

// ---- reference models as JSON: {"model": "<name>", <parameters...>} ----

inline nlohmann::json to_json_value(const Parametric& p) {
    return std::visit(
        [](const auto& m) -> nlohmann::json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, tau_model::SelfSimilar>) return {{"model", "self-similar"}, {"hurst", m.hurst}};
            else if constexpr (std::is_same_v<T, tau_model::StableAsym>) return {{"model", "stable-asym"}, {"alpha", m.alpha}};
            else if constexpr (std::is_same_v<T, tau_model::LfsmAsym>)
                return {{"model", "lfsm-asym"}, {"hurst", m.hurst}, {"alpha", m.alpha}};
            else if constexpr (std::is_same_v<T, tau_model::LevyAsym>) return {{"model", "levy-asym"}, {"alpha", m.alpha}};
            else if constexpr (std::is_same_v<T, tau_model::Cascade>) return {{"model", "cascade"}, {"lambda2", m.lambda2}};
            else if constexpr (std::is_same_v<T, tau_model::CascadeLinearized>)
                return {{"model", "cascade-linearized"}, {"lambda2", m.lambda2}};
            else return {{"model", "mrw"}, {"lambda2", m.lambda2}};
        },
        p);
}

inline nlohmann::json to_json_value(const SpectrumModel& s) {
    return std::visit(
        [](const auto& m) -> nlohmann::json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, spectrum_model::SelfSimilar>) return {{"model", "self-similar"}, {"hurst", m.hurst}};
            else if constexpr (std::is_same_v<T, spectrum_model::Stable>) return {{"model", "stable"}, {"alpha", m.alpha}};
            else if constexpr (std::is_same_v<T, spectrum_model::Lfsm>)
                return {{"model", "lfsm"}, {"hurst", m.hurst}, {"alpha", m.alpha}};
            else if constexpr (std::is_same_v<T, spectrum_model::Levy>)
                return {{"model", "levy"}, {"beta", m.beta}, {"gaussian", m.has_gaussian_component}};
            else if constexpr (std::is_same_v<T, spectrum_model::Cascade>) return {{"model", "cascade"}, {"lambda2", m.lambda2}};
            else return {{"model", "mrw"}, {"lambda2", m.lambda2}};
        },
        s);
}

inline Parametric tau_model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
        throw ValidationError("model", "expected an object with a string \"model\"");
    const auto name = j["model"].get<std::string>();
    Parametric p;
    if (name == "self-similar") {
        tau_model::SelfSimilar m;
        detail::read_field(j, "hurst", m.hurst);
        p = m;
    } else if (name == "stable-asym") {
        tau_model::StableAsym m;
        detail::read_field(j, "alpha", m.alpha);
        p = m;
    } else if (name == "lfsm-asym") {
        tau_model::LfsmAsym m;
        detail::read_field(j, "hurst", m.hurst);
        detail::read_field(j, "alpha", m.alpha);
        p = m;
    } else if (name == "levy-asym") {
        tau_model::LevyAsym m;
        detail::read_field(j, "alpha", m.alpha);
        p = m;
    } else if (name == "cascade" || name == "cascade-linearized" || name == "mrw") {
        double lambda2 = 0.025;
        detail::read_field(j, "lambda2", lambda2);
        if (name == "cascade") p = tau_model::Cascade{lambda2};
        else if (name == "mrw") p = tau_model::Mrw{lambda2};
        else p = tau_model::CascadeLinearized{lambda2};
    } else {
        throw ValidationError("model", "unknown scaling-function model '" + name + "'");
    }
    std::visit([](const auto& m) { validate(m); }, p);
    return p;
}

inline SpectrumModel spectrum_model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
        throw ValidationError("model", "expected an object with a string \"model\"");
    const auto name = j["model"].get<std::string>();
    SpectrumModel s;
    if (name == "self-similar") {
        spectrum_model::SelfSimilar m;
        detail::read_field(j, "hurst", m.hurst);
        s = m;
    } else if (name == "stable") {
        spectrum_model::Stable m;
        detail::read_field(j, "alpha", m.alpha);
        s = m;
    } else if (name == "lfsm") {
        spectrum_model::Lfsm m;
        detail::read_field(j, "hurst", m.hurst);
        detail::read_field(j, "alpha", m.alpha);
        s = m;
    } else if (name == "levy") {
        spectrum_model::Levy m;
        detail::read_field(j, "beta", m.beta);
        detail::read_field(j, "gaussian", m.has_gaussian_component);
        s = m;
    } else if (name == "cascade" || name == "mrw") {
        double lambda2 = 0.025;
        detail::read_field(j, "lambda2", lambda2);
        if (name == "cascade") s = spectrum_model::Cascade{lambda2};
        else s = spectrum_model::Mrw{lambda2};
    } else {
        throw ValidationError("model", "unknown spectrum model '" + name + "'");
    }
    std::visit([](const auto& m) { detail::validate_model(m); }, s);
    return s;
}

// ---- experiment configuration ----

struct ExperimentConfig {
    std::string title;
    ProcessSpec process = process::BM{};
    std::size_t n = 10000;
    double horizon = 10000.0;
    std::vector<std::uint64_t> seeds{1};
    double q_min = -20.0;
    double q_max = 20.0;
    double q_step = 0.25;
    std::size_t scales = kDefaultScaleCount;  // N in the geometric grid n^{i/N}
    bool standard = true;
    bool modified = true;
    std::size_t m = kDefaultBlockSize;
    double h_min = -0.25;
    double h_max = 2.0;
    double h_step = 0.005;
    double legendre_q_step = 1e-3;
    std::optional<Parametric> reference_tau;
    std::optional<double> self_similar_line;  // slope H of the line H q
    std::optional<SpectrumModel> reference_spectrum;
    int figure = 0;  // when nonzero, a two-panel figure<k>.svg is rendered
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j{{"title", c.title},
                     {"process", to_json_value(c.process)},
                     {"n", c.n},
                     {"horizon", c.horizon},
                     {"seeds", c.seeds},
                     {"q_min", c.q_min},
                     {"q_max", c.q_max},
                     {"q_step", c.q_step},
                     {"scales", c.scales},
                     {"standard", c.standard},
                     {"modified", c.modified},
                     {"m", c.m},
                     {"h_min", c.h_min},
                     {"h_max", c.h_max},
                     {"h_step", c.h_step},
                     {"legendre_q_step", c.legendre_q_step},
                     {"reference_tau", nullptr},
                     {"self_similar_line", nullptr},
                     {"reference_spectrum", nullptr},
                     {"figure", c.figure}};
    if (c.reference_tau) j["reference_tau"] = to_json_value(*c.reference_tau);
    if (c.self_similar_line) j["self_similar_line"] = *c.self_similar_line;
    if (c.reference_spectrum) j["reference_spectrum"] = to_json_value(*c.reference_spectrum);
    return j;
}

inline void validate_config(const ExperimentConfig& c) {
    validate(c.process);
    if (c.n < 2) throw ValidationError("n", "must be at least 2");
    if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) throw ValidationError("horizon", "must be positive");
    if (c.seeds.empty()) throw ValidationError("seeds", "at least one seed is required");
    if (!c.standard && !c.modified) throw ValidationError("modes", "select standard, modified or both");
    if (c.modified && c.m == 0) throw ValidationError("m", "must be a positive integer");
    if (c.scales == 0) throw ValidationError("scales", "must be positive");
    if (!(c.legendre_q_step > 0.0)) throw ValidationError("legendre_q_step", "must be positive");
    if (c.figure < 0 || c.figure > 4) throw ValidationError("figure", "must be 0 or 1..4");
    MomentGrid::range(c.q_min, c.q_max, c.q_step);
    h_grid(c.h_min, c.h_max, c.h_step);
    if (c.self_similar_line && !(*c.self_similar_line > 0.0)) throw ValidationError("self_similar_line", "must be positive");
    if (c.reference_tau) std::visit([](const auto& m) { validate(m); }, *c.reference_tau);
    if (c.reference_spectrum) std::visit([](const auto& m) { detail::validate_model(m); }, *c.reference_spectrum);
}

// Missing keys keep their defaults; the result is validated.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c = {}) {
    if (!j.is_object()) throw ValidationError("config", "expected a JSON object");
    static const std::vector<std::string> known{"title", "process", "n", "horizon", "seeds", "q_min", "q_max",
                                                "q_step", "scales", "standard", "modified", "m", "h_min", "h_max",
                                                "h_step", "legendre_q_step", "reference_tau", "self_similar_line",
                                                "reference_spectrum", "figure"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ValidationError(key, "unknown configuration key");
    detail::read_field(j, "title", c.title);
    if (j.contains("process")) c.process = process_from_json(j["process"]);
    detail::read_field(j, "n", c.n);
    detail::read_field(j, "horizon", c.horizon);
    detail::read_field(j, "seeds", c.seeds);
    detail::read_field(j, "q_min", c.q_min);
    detail::read_field(j, "q_max", c.q_max);
    detail::read_field(j, "q_step", c.q_step);
    detail::read_field(j, "scales", c.scales);
    detail::read_field(j, "standard", c.standard);
    detail::read_field(j, "modified", c.modified);
    detail::read_field(j, "m", c.m);
    detail::read_field(j, "h_min", c.h_min);
    detail::read_field(j, "h_max", c.h_max);
    detail::read_field(j, "h_step", c.h_step);
    detail::read_field(j, "legendre_q_step", c.legendre_q_step);
    detail::read_field(j, "figure", c.figure);
    if (j.contains("reference_tau"))
        c.reference_tau = j["reference_tau"].is_null() ? std::nullopt : std::optional(tau_model_from_json(j["reference_tau"]));
    if (j.contains("self_similar_line"))
        c.self_similar_line = j["self_similar_line"].is_null() ? std::nullopt
                                                                : std::optional(j["self_similar_line"].get<double>());
    if (j.contains("reference_spectrum"))
        c.reference_spectrum = j["reference_spectrum"].is_null()
                                   ? std::nullopt
                                   : std::optional(spectrum_model_from_json(j["reference_spectrum"]));
    validate_config(c);
    return c;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

// Content hash of the canonical config JSON and the code version.
inline std::string run_id(const ExperimentConfig& c) {
    return sha256_hex(config_to_json(c).dump() + "\n" + kCodeVersion).substr(0, 16);
}

// ---- pipeline ----

inline double median(std::vector<double> v) {
    if (v.empty()) throw Error("median of an empty set");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

struct ModeResult {
    PartitionMode mode = PartitionMode::standard;
    std::vector<ScalingFunctionEstimate> per_seed;
    ScalingFunctionEstimate median;  // tau and r2 are per-q medians over seeds
    SpectrumCurve spectrum;          // Legendre transform of the median tau
    PartitionTable first_table;
};

struct ExperimentResult {
    MomentGrid qs;
    ScaleGrid deltas;
    std::vector<double> hs;
    SamplePath first_path;
    std::optional<ModeResult> standard;
    std::optional<ModeResult> modified;
    std::optional<std::vector<double>> reference_tau;
    std::optional<SpectrumCurve> reference_spectrum;
};

// Scales n^{i/N} in units of the sampling step. With the modified mode on,
// scales whose m-blocks would not fit twice into the path are dropped for
// both modes so the two estimates share one grid.
inline ScaleGrid experiment_scales(const ExperimentConfig& c, double step) {
    const std::size_t max_lag = c.modified ? c.n / (2 * c.m) : c.n;
    if (max_lag == 0) throw BlockError("m = " + std::to_string(c.m) + " leaves no admissible scale for n = " + std::to_string(c.n));
    return ScaleGrid::geometric(c.n, c.scales, step, max_lag);
}

inline ModeResult run_mode(const ExperimentConfig& c, PartitionMode mode, const std::vector<SamplePath>& paths,
                           const MomentGrid& qs, const ScaleGrid& deltas, const std::vector<double>& hs) {
    ModeResult r;
    r.mode = mode;
    for (std::size_t s = 0; s < paths.size(); ++s) {
        auto table = mode == PartitionMode::standard ? partition_function(paths[s], qs, deltas)
                                                     : modified_partition_function(paths[s], qs, deltas, c.m);
        r.per_seed.push_back(scaling_function(table));
        if (s == 0) r.first_table = std::move(table);
    }
    r.median = r.per_seed.front();
    r.median.source = "median over " + std::to_string(paths.size()) + " seed(s)";
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        std::vector<double> taus, r2s;
        for (const auto& e : r.per_seed) {
            taus.push_back(e.tau[qi]);
            r2s.push_back(e.r2[qi]);
        }
        r.median.tau[qi] = median(taus);
        r.median.r2[qi] = median(r2s);
        r.median.intercept[qi] = std::numeric_limits<double>::quiet_NaN();
    }
    LegendreOptions opt{qs.values().front(), qs.values().back(), c.legendre_q_step, 1e-9};
    r.spectrum = legendre_spectrum(tabulated_tau(qs.values(), r.median.tau), hs, opt);
    r.spectrum.provenance = "legendre:median-tau-" + to_string(mode);
    return r;
}

inline ExperimentResult compute_experiment(const ExperimentConfig& c) {
    validate_config(c);
    ExperimentResult res;
    res.qs = MomentGrid::range(c.q_min, c.q_max, c.q_step);
    res.hs = h_grid(c.h_min, c.h_max, c.h_step);
    std::vector<SamplePath> paths;
    for (std::uint64_t s : c.seeds) paths.push_back(generate(c.process, c.n, c.horizon, Seed{s}));
    res.first_path = paths.front();
    res.deltas = experiment_scales(c, res.first_path.step());
    if (c.standard) res.standard = run_mode(c, PartitionMode::standard, paths, res.qs, res.deltas, res.hs);
    if (c.modified) res.modified = run_mode(c, PartitionMode::modified, paths, res.qs, res.deltas, res.hs);
    if (c.reference_tau) {
        const auto tau = theoretical_tau(*c.reference_tau);
        std::vector<double> v;
        for (double q : res.qs.values()) v.push_back(tau(q));
        res.reference_tau = v;
    }
    if (c.reference_spectrum) res.reference_spectrum = theoretical_spectrum(*c.reference_spectrum, res.hs);
    return res;
}

inline Panel tau_panel(const ExperimentConfig& c, const ExperimentResult& r) {
    Panel p{{}, "q", "tau(q)", c.title.empty() ? "scaling functions" : c.title + ": scaling functions"};
    const auto& q = r.qs.values();
    if (r.standard) p.series.push_back({"standard tau_hat", q, r.standard->median.tau});
    if (r.modified) p.series.push_back({"modified tau_tilde (m=" + std::to_string(c.m) + ")", q, r.modified->median.tau});
    if (r.reference_tau) p.series.push_back({"reference " + model_name(*c.reference_tau), q, *r.reference_tau});
    if (c.self_similar_line) {
        std::vector<double> line;
        for (double x : q) line.push_back(*c.self_similar_line * x);
        p.series.push_back({"self-similar line " + io::format_double(*c.self_similar_line) + " q", q, line});
    }
    return p;
}

inline Panel spectrum_panel(const ExperimentConfig& c, const ExperimentResult& r) {
    Panel p{{}, "h", "d(h)", c.title.empty() ? "spectra" : c.title + ": spectra"};
    if (r.standard) p.series.push_back({"Legendre of tau_hat", r.hs, r.standard->spectrum.d});
    if (r.modified) p.series.push_back({"Legendre of tau_tilde", r.hs, r.modified->spectrum.d});
    if (r.reference_spectrum)
        p.series.push_back({"true " + model_name(*c.reference_spectrum), r.hs, r.reference_spectrum->d});
    return p;
}

// Writes every artefact of a finished computation into `dir` and returns
// the file names in writing order.
inline std::vector<std::string> write_outputs(const ExperimentConfig& c, const ExperimentResult& r,
                                              const std::filesystem::path& dir) {
    std::vector<std::string> files;
    auto add = [&](const std::string& name) { files.push_back(name); };
    write_path(r.first_path, dir / "path.csv");
    add("path.csv");
    add("path.json");
    for (const auto* mode : {&r.standard, &r.modified}) {
        if (!*mode) continue;
        const std::string tag = to_string((*mode)->mode);
        write_partition((*mode)->first_table, dir / ("partition_" + tag + ".csv"));
        add("partition_" + tag + ".csv");
        add("partition_" + tag + ".json");
        write_scaling((*mode)->median, r.deltas, dir / ("tau_" + tag + ".csv"));
        add("tau_" + tag + ".csv");
        add("tau_" + tag + ".json");
        write_spectrum((*mode)->spectrum, dir / ("spectrum_" + tag + ".csv"));
        add("spectrum_" + tag + ".csv");
        add("spectrum_" + tag + ".json");
    }
    if (r.reference_tau) {
        std::string csv = "q,tau\n";
        for (std::size_t i = 0; i < r.qs.size(); ++i)
            csv += io::format_double(r.qs[i]) + ',' + io::format_double((*r.reference_tau)[i]) + '\n';
        io::atomic_write(dir / "tau_reference.csv", csv);
        io::write_json(dir / "tau_reference.json", {{"model", to_json_value(*c.reference_tau)}});
        add("tau_reference.csv");
        add("tau_reference.json");
    }
    if (r.reference_spectrum) {
        write_spectrum(*r.reference_spectrum, dir / "spectrum_reference.csv");
        add("spectrum_reference.csv");
        add("spectrum_reference.json");
    }
    if (c.figure > 0) {
        const std::string name = "figure" + std::to_string(c.figure) + ".svg";
        io::atomic_write(dir / name, render_svg({tau_panel(c, r), spectrum_panel(c, r)}));
        add(name);
    }
    return files;
}

struct RunOptions {
    std::filesystem::path root = runs_root();  // registry location
    std::filesystem::path outdir;              // defaults to <root>/<id>
};

// Validation problems are thrown before anything is written. Failures of
// the pipeline itself are caught and recorded with status "failed".
inline RunRecord run_experiment(const ExperimentConfig& c, const RunOptions& opt = {}) {
    validate_config(c);
    RunRecord rec;
    rec.id = run_id(c);
    rec.config = config_to_json(c);
    const auto dir = std::filesystem::absolute(opt.outdir.empty() ? opt.root / rec.id : opt.outdir).lexically_normal();
    rec.directory = dir.string();
    const auto start = std::chrono::steady_clock::now();
    try {
        std::filesystem::create_directories(dir);
        io::write_json(dir / "config.json", rec.config);
        const auto result = compute_experiment(c);
        rec.manifest = write_outputs(c, result, dir);
        rec.manifest.insert(rec.manifest.begin(), "config.json");
        rec.manifest.push_back("manifest.json");
        io::write_json(dir / "manifest.json", {{"id", rec.id}, {"files", rec.manifest}});
        rec.status = "ok";
    } catch (const std::exception& e) {
        rec.status = "failed";
        rec.error = e.what();
        rec.manifest.clear();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    registry_append(opt.root, rec);
    return rec;
}

// ---- figure presets ----

inline constexpr std::size_t kFigureSeedCount = 10;

// Presets for the four robustness figures: BM, Cauchy (stable alpha = 1),
// LFSM (H = 0.9, alpha = 1.2) and MRW (lambda^2 = 0.025), each with m = 20,
// unit sampling step and 10 seeds.
inline ExperimentConfig figure_preset(int which) {
    ExperimentConfig c;
    c.seeds.clear();
    for (std::uint64_t s = 1; s <= kFigureSeedCount; ++s) c.seeds.push_back(s);
    c.figure = which;
    switch (which) {
        case 1:
            c.title = "Brownian motion";
            c.process = process::BM{};
            c.reference_tau = tau_model::SelfSimilar{0.5};
            c.reference_spectrum = spectrum_model::SelfSimilar{0.5};
            break;
        case 2:
            c.title = "Stable Levy process alpha=1";
            c.process = process::StableLevy{1.0, 1.0, 0.0, 0.0};
            c.reference_tau = tau_model::StableAsym{1.0};
            c.self_similar_line = 1.0;
            c.reference_spectrum = spectrum_model::Stable{1.0};
            break;
        case 3:
            c.title = "LFSM H=0.9 alpha=1.2";
            c.n = 15784;
            c.process = process::LFSM{0.9, 1.2, 600, 256};
            c.reference_tau = tau_model::LfsmAsym{0.9, 1.2};
            c.self_similar_line = 0.9;
            c.reference_spectrum = spectrum_model::Lfsm{0.9, 1.2};
            break;
        case 4:
            c.title = "MRW lambda^2=0.025";
            c.process = process::MRW{0.025, 10000.0};
            c.reference_tau = tau_model::Mrw{0.025};
            c.reference_spectrum = spectrum_model::Mrw{0.025};
            break;
        default:
            throw ValidationError("figure", "must be 1, 2, 3 or 4");
    }
    c.horizon = static_cast<double>(c.n);
    return c;
}

inline RunRecord reproduce_figure(int which, const std::filesystem::path& outdir,
                                  const std::filesystem::path& root = runs_root()) {
    return run_experiment(figure_preset(which), RunOptions{root, outdir});
}

}  // namespace mfbounds
