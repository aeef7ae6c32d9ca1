#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfbounds/error.hpp"
#include "mfbounds/io.hpp"
#include "mfbounds/process_spec.hpp"
#include "mfbounds/rng.hpp"

namespace mfbounds {

// One realization on a uniform grid t_k = k * horizon / n, k = 0..n.
struct SamplePath {
    std::vector<double> times;
    std::vector<double> values;
    std::optional<ProcessSpec> spec;  // empty when loaded from a bare CSV
    Seed seed{};
    // Accuracy notes from the generator (clipped eigenvalues, coarse kernels).
    std::vector<std::string> warnings;

    std::size_t increments() const noexcept { return values.empty() ? 0 : values.size() - 1; }
    double horizon() const noexcept { return times.empty() ? 0.0 : times.back(); }
    double step() const noexcept { return increments() == 0 ? 0.0 : horizon() / static_cast<double>(increments()); }

    std::string id() const {
        return (spec ? family_name(*spec) : std::string("data")) + "-n" + std::to_string(increments()) +
               "-s" + std::to_string(seed.value);
    }
};

inline std::vector<double> uniform_times(std::size_t n, double horizon) {
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t[k] = horizon * static_cast<double>(k) / static_cast<double>(n);
    return t;
}

// Checks the structural invariants every estimator relies on.
inline void check_path(const SamplePath& p) {
    if (p.values.size() < 2) throw SizeError("path needs at least 2 points");
    if (p.times.size() != p.values.size()) throw ValidationError("path", "times and values differ in length");
    if (p.times.front() != 0.0) throw ValidationError("path", "times must start at 0");
    const double h = p.step();
    if (!(h > 0.0)) throw ValidationError("path", "times must be increasing");
    for (std::size_t k = 1; k < p.times.size(); ++k) {
        const double expect = h * static_cast<double>(k);
        if (!(p.times[k] > p.times[k - 1]) || std::abs(p.times[k] - expect) > 1e-9 * std::max(1.0, expect))
            throw ValidationError("path", "times must be uniformly spaced (row " + std::to_string(k) + ")");
    }
}

inline nlohmann::json path_provenance(const SamplePath& p) {
    nlohmann::json j;
    j["spec"] = p.spec ? to_json_value(*p.spec) : nlohmann::json(nullptr);
    j["seed"] = p.seed.value;
    j["n"] = p.increments();
    j["horizon"] = p.horizon();
    if (!p.warnings.empty()) j["warnings"] = p.warnings;
    return j;
}

inline std::string path_csv(const SamplePath& p) {
    std::string out = "t,x\n";
    out.reserve(p.values.size() * 40);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        out += io::format_double(p.times[k]);
        out += ',';
        out += io::format_double(p.values[k]);
        out += '\n';
    }
    return out;
}

// Writes `<file>.csv` and its provenance sidecar `<file>.json`.
inline void write_path(const SamplePath& p, const std::filesystem::path& csv) {
    io::atomic_write(csv, path_csv(p));
    io::write_json(io::sidecar_path(csv), path_provenance(p));
}

inline SamplePath read_path(const std::filesystem::path& csv) {
    SamplePath p;
    for (auto& row : io::read_csv(csv, {"t", "x"})) {
        p.times.push_back(row[0]);
        p.values.push_back(row[1]);
    }
    const auto side = io::sidecar_path(csv);
    if (std::filesystem::exists(side)) {
        const auto j = io::read_json(side);
        if (j.contains("spec") && !j["spec"].is_null()) p.spec = process_from_json(j["spec"]);
        if (j.contains("seed")) p.seed = Seed{j["seed"].get<std::uint64_t>()};
    }
    check_path(p);
    return p;
}

}  // namespace mfbounds
