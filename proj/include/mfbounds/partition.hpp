#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfbounds/error.hpp"
#include "mfbounds/grids.hpp"
#include "mfbounds/io.hpp"
#include "mfbounds/sample_path.hpp"

namespace mfbounds {

// Increments (or block maxima) below this magnitude make a negative moment
// blow up; they are rejected whenever the moment grid holds a q < 0.
inline constexpr double kTinyGuard = 1e-300;

enum class PartitionMode { standard, modified };

inline std::string to_string(PartitionMode mode) { return mode == PartitionMode::standard ? "standard" : "modified"; }

struct PartitionTable {
    MomentGrid qs;
    ScaleGrid deltas;
    std::vector<std::vector<double>> values;  // values[q index][scale index]
    PartitionMode mode = PartitionMode::standard;
    std::size_t m = 1;
    std::string source;

    double at(std::size_t qi, std::size_t si) const { return values[qi][si]; }
};

namespace detail {

inline void check_cell(double s, double q, double delta) {
    if (s == 0.0)
        throw DegenerateIncrement("partition value is zero at q=" + io::format_double(q) +
                                      ", delta_t=" + io::format_double(delta),
                                  0);
    if (!std::isfinite(s))
        throw NumericError("partition value is not finite at q=" + io::format_double(q) +
                           ", delta_t=" + io::format_double(delta));
}

inline void guard_tiny(const std::vector<double>& mags, bool negative_q, double delta, const char* what) {
    if (!negative_q) return;
    for (std::size_t i = 0; i < mags.size(); ++i)
        if (mags[i] < kTinyGuard)
            throw DegenerateIncrement(std::string(what) + " " + std::to_string(i) + " at delta_t=" +
                                          io::format_double(delta) + " is below tiny_guard with negative q",
                                      i);
}

// Sum of a^q in index order divided by the count; shared by both modes so
// they agree bit-for-bit when m = 1.
inline double power_mean(const std::vector<double>& mags, double q) {
    double sum = 0.0;
    for (double a : mags) sum += std::pow(a, q);
    return sum / static_cast<double>(mags.size());
}

}  // namespace detail

// S_q(T, dt) = (1 / K) sum_{i=1}^{K} |X(i dt) - X((i-1) dt)|^q, K = floor(T / dt).
inline PartitionTable partition_function(const SamplePath& path, const MomentGrid& qs, const ScaleGrid& deltas) {
    check_path(path);
    if (std::abs(deltas.step() - path.step()) > 1e-9 * path.step())
        throw GridError("scale grid step does not match the path step");
    const std::size_t n = path.increments();
    const auto& x = path.values;

    PartitionTable table{qs, deltas, std::vector<std::vector<double>>(qs.size(), std::vector<double>(deltas.size())),
                         PartitionMode::standard, 1, path.id()};
    std::vector<double> mags;
    for (std::size_t si = 0; si < deltas.size(); ++si) {
        const std::size_t lag = deltas.lags()[si];
        if (lag > n) throw GridError("delta_t=" + io::format_double(deltas.delta(si)) + " exceeds the path horizon");
        const std::size_t blocks = n / lag;
        mags.resize(blocks);
        for (std::size_t i = 1; i <= blocks; ++i) mags[i - 1] = std::abs(x[i * lag] - x[(i - 1) * lag]);
        detail::guard_tiny(mags, qs.has_negative(), deltas.delta(si), "increment");
        for (std::size_t qi = 0; qi < qs.size(); ++qi) {
            table.values[qi][si] = detail::power_mean(mags, qs[qi]);
            detail::check_cell(table.values[qi][si], qs[qi], deltas.delta(si));
        }
    }
    return table;
}

// Max-of-increments partition function:
//   S~_q(T, dt) = (1 / K) sum_{i=0}^{K-1} (max_{l=1..m} |X(i m dt + l dt) - X(i m dt + (l-1) dt)|)^q,
// K = floor(T / (m dt)). Block i covers [i m dt, (i+1) m dt].
inline PartitionTable modified_partition_function(const SamplePath& path, const MomentGrid& qs,
                                                  const ScaleGrid& deltas, std::size_t m) {
    check_path(path);
    if (m == 0) throw ValidationError("m", "must be a positive integer");
    if (std::abs(deltas.step() - path.step()) > 1e-9 * path.step())
        throw GridError("scale grid step does not match the path step");
    const std::size_t n = path.increments();
    const auto& x = path.values;

    PartitionTable table{qs, deltas, std::vector<std::vector<double>>(qs.size(), std::vector<double>(deltas.size())),
                         PartitionMode::modified, m, path.id()};
    std::vector<double> mags;
    for (std::size_t si = 0; si < deltas.size(); ++si) {
        const std::size_t lag = deltas.lags()[si];
        if (2 * m * lag > n)
            throw BlockError("m * delta_t = " + std::to_string(m) + " * " + io::format_double(deltas.delta(si)) +
                             " exceeds T/2");
        const std::size_t blocks = n / (m * lag);
        mags.resize(blocks);
        for (std::size_t i = 0; i < blocks; ++i) {
            double best = 0.0;
            for (std::size_t l = 1; l <= m; ++l) {
                const std::size_t hi = (i * m + l) * lag;
                best = std::max(best, std::abs(x[hi] - x[hi - lag]));
            }
            mags[i] = best;
        }
        detail::guard_tiny(mags, qs.has_negative(), deltas.delta(si), "block maximum");
        for (std::size_t qi = 0; qi < qs.size(); ++qi) {
            table.values[qi][si] = detail::power_mean(mags, qs[qi]);
            detail::check_cell(table.values[qi][si], qs[qi], deltas.delta(si));
        }
    }
    return table;
}

inline nlohmann::json table_provenance(const PartitionTable& t) {
    return {{"source", t.source},
            {"mode", to_string(t.mode)},
            {"m", t.m},
            {"qs", t.qs.values()},
            {"deltas", t.deltas.deltas()}};
}

// CSV `q,delta_t,S`, one row per cell, q-major.
inline std::string partition_csv(const PartitionTable& t) {
    std::string out = "q,delta_t,S\n";
    for (std::size_t qi = 0; qi < t.qs.size(); ++qi)
        for (std::size_t si = 0; si < t.deltas.size(); ++si)
            out += io::format_double(t.qs[qi]) + ',' + io::format_double(t.deltas.delta(si)) + ',' +
                   io::format_double(t.values[qi][si]) + '\n';
    return out;
}

inline void write_partition(const PartitionTable& t, const std::filesystem::path& csv) {
    io::atomic_write(csv, partition_csv(t));
    io::write_json(io::sidecar_path(csv), table_provenance(t));
}

}  // namespace mfbounds
