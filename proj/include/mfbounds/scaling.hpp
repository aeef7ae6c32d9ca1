#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfbounds/error.hpp"
#include "mfbounds/grids.hpp"
#include "mfbounds/io.hpp"
#include "mfbounds/partition.hpp"
#include "mfbounds/regression.hpp"
#include "mfbounds/sample_path.hpp"

namespace mfbounds {

inline constexpr double kDefaultR2Threshold = 0.98;
inline constexpr std::size_t kDefaultScaleCount = 20;
inline constexpr std::size_t kDefaultBlockSize = 20;

struct ScalingFunctionEstimate {
    MomentGrid qs;
    std::vector<double> tau;
    std::vector<double> r2;
    std::vector<double> intercept;  // ln c(q)
    PartitionMode mode = PartitionMode::standard;
    std::size_t m = 1;
    std::string source;
};

inline RegressionFit fit_row(const PartitionTable& table, std::size_t qi) {
    const std::size_t ns = table.deltas.size();
    std::vector<double> x(ns), y(ns);
    for (std::size_t si = 0; si < ns; ++si) {
        x[si] = std::log(table.deltas.delta(si));
        y[si] = std::log(table.values[qi][si]);
    }
    return least_squares(x, y);
}

// tau_hat(q): slope of ln S_q(T, dt) against ln dt. Applied to a modified
// table this gives the modified scaling function.
inline ScalingFunctionEstimate scaling_function(const PartitionTable& table) {
    ScalingFunctionEstimate est{table.qs, {}, {}, {}, table.mode, table.m, table.source};
    for (std::size_t qi = 0; qi < table.qs.size(); ++qi) {
        const RegressionFit fit = fit_row(table, qi);
        est.tau.push_back(fit.slope);
        est.r2.push_back(fit.r2);
        est.intercept.push_back(fit.intercept);
    }
    return est;
}

// Single-scale estimate log2 S_q(T, 2^-j T) / (-j).
inline double dyadic_scaling_estimate(const SamplePath& path, double q, unsigned j) {
    check_path(path);
    if (j == 0) throw ValidationError("j", "must be a positive integer");
    const std::size_t n = path.increments();
    if (j >= 64 || n % (std::size_t{1} << j) != 0)
        throw GridError("2^" + std::to_string(j) + " does not divide the " + std::to_string(n) + " increments");
    const std::size_t lag = n >> j;
    const auto table = partition_function(path, MomentGrid({q}), ScaleGrid({lag}, path.step()));
    return std::log2(table.values[0][0]) / -static_cast<double>(j);
}

struct LinearityReport {
    double q;
    double r2;
    bool pass;
};

inline std::vector<LinearityReport> linearity_check(const PartitionTable& table,
                                                    double r2_threshold = kDefaultR2Threshold) {
    std::vector<LinearityReport> out;
    for (std::size_t qi = 0; qi < table.qs.size(); ++qi) {
        const double r2 = fit_row(table, qi).r2;
        out.push_back({table.qs[qi], r2, r2 >= r2_threshold});
    }
    return out;
}

inline nlohmann::json estimate_provenance(const ScalingFunctionEstimate& e, const ScaleGrid& deltas) {
    return {{"source", e.source},
            {"mode", to_string(e.mode)},
            {"m", e.m},
            {"qs", e.qs.values()},
            {"deltas", deltas.deltas()}};
}

// CSV `q,tau_hat,r2`.
inline std::string scaling_csv(const ScalingFunctionEstimate& e) {
    std::string out = "q,tau_hat,r2\n";
    for (std::size_t i = 0; i < e.qs.size(); ++i)
        out += io::format_double(e.qs[i]) + ',' + io::format_double(e.tau[i]) + ',' + io::format_double(e.r2[i]) + '\n';
    return out;
}

inline void write_scaling(const ScalingFunctionEstimate& e, const ScaleGrid& deltas,
                          const std::filesystem::path& csv) {
    io::atomic_write(csv, scaling_csv(e));
    io::write_json(io::sidecar_path(csv), estimate_provenance(e, deltas));
}

}  // namespace mfbounds
