#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfbounds/error.hpp"
#include "mfbounds/io.hpp"
#include "mfbounds/scaling_function.hpp"

namespace mfbounds {

// Encoding of an empty level set: dimension -inf.
inline constexpr double kNotAttained = -std::numeric_limits<double>::infinity();

struct LegendreOptions {
    double q_min = -20.0;
    double q_max = 20.0;
    double q_step = 1e-3;
    double clip_tol = 1e-9;
};

struct SpectrumCurve {
    std::vector<double> hs;
    std::vector<double> d;    // in [0, 1] or kNotAttained
    std::vector<double> raw;  // unclipped values; equal to d for closed forms
    std::string provenance;
    std::vector<std::string> warnings;

    bool attained(std::size_t i) const { return d[i] != kNotAttained; }
};

inline std::vector<double> h_grid(double h_min, double h_max, double step) {
    if (!(step > 0.0)) throw ValidationError("h_step", "must be positive");
    if (!(h_max > h_min)) throw ValidationError("h_max", "must exceed h_min");
    const auto count = static_cast<std::size_t>(std::floor((h_max - h_min) / step + 1e-6));
    std::vector<double> hs(count + 1);
    for (std::size_t i = 0; i <= count; ++i) hs[i] = h_min + static_cast<double>(i) * step;
    return hs;
}

// d(h) = inf_q (h q - tau(q) + 1), the infimum taken over the window on a
// grid of spacing q_step (the upper window end is always included).
inline SpectrumCurve legendre_spectrum(const ScalingFunction& tau, const std::vector<double>& hs,
                                       const LegendreOptions& opt = {}) {
    if (!(opt.q_max > opt.q_min) || !std::isfinite(opt.q_min) || !std::isfinite(opt.q_max))
        throw ValidationError("q_window", "empty or unbounded window");
    if (!(opt.q_step > 0.0)) throw ValidationError("q_step", "must be positive");
    if (hs.empty()) throw ValidationError("hs", "h grid is empty");
    if (const Tabulated* t = tau.table()) {
        const double slack = 1e-9 * std::max(1.0, std::abs(opt.q_max) + std::abs(opt.q_min));
        if (opt.q_min < t->qs.front() - slack || opt.q_max > t->qs.back() + slack)
            throw ValidationError("q_window", "window [" + io::format_double(opt.q_min) + ", " +
                                                  io::format_double(opt.q_max) + "] exceeds the tabulated range");
    }

    std::vector<double> qs;
    const auto count = static_cast<std::size_t>(std::floor((opt.q_max - opt.q_min) / opt.q_step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) qs.push_back(opt.q_min + static_cast<double>(k) * opt.q_step);
    if (opt.q_max - qs.back() > 1e-12 * opt.q_step) qs.push_back(opt.q_max);
    // A tabulated tau is piecewise linear: its own nodes carry the infimum.
    if (const Tabulated* t = tau.table())
        for (double q : t->qs)
            if (q >= opt.q_min && q <= opt.q_max) qs.push_back(q);
    std::sort(qs.begin(), qs.end());

    std::vector<double> offset(qs.size());
    for (std::size_t k = 0; k < qs.size(); ++k) offset[k] = 1.0 - tau(qs[k]);

    SpectrumCurve curve{hs, std::vector<double>(hs.size()), std::vector<double>(hs.size()),
                        "legendre:" + tau.describe(), {}};
    bool over = false;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < qs.size(); ++k) best = std::min(best, hs[i] * qs[k] + offset[k]);
        curve.raw[i] = best;
        if (best < 0.0) curve.d[i] = kNotAttained;
        else {
            if (best > 1.0 + opt.clip_tol) over = true;
            curve.d[i] = std::min(best, 1.0);
        }
    }
    if (over) curve.warnings.push_back("Legendre values above 1 + clip_tol were clipped to 1");
    return curve;
}

// Highest attained point (the first one on ties).
inline std::optional<std::pair<double, double>> spectrum_peak(const SpectrumCurve& c) {
    std::optional<std::pair<double, double>> best;
    for (std::size_t i = 0; i < c.hs.size(); ++i)
        if (c.attained(i) && (!best || c.d[i] > best->second)) best = std::pair{c.hs[i], c.d[i]};
    return best;
}

// First and last attained grid points.
inline std::optional<std::pair<double, double>> attained_support(const SpectrumCurve& c) {
    std::optional<std::pair<double, double>> s;
    for (std::size_t i = 0; i < c.hs.size(); ++i)
        if (c.attained(i)) s = s ? std::pair{s->first, c.hs[i]} : std::pair{c.hs[i], c.hs[i]};
    return s;
}

// Where d crosses zero at either side of the attained set, interpolating the
// raw Legendre values between the last attained and first unattained node.
// Sides where the attained set touches the grid edge report the edge.
inline std::optional<std::pair<double, double>> support_endpoints(const SpectrumCurve& c) {
    const auto s = attained_support(c);
    if (!s) return std::nullopt;
    std::size_t lo = 0, hi = c.hs.size() - 1;
    while (!c.attained(lo)) ++lo;
    while (!c.attained(hi)) --hi;
    auto cross = [&](std::size_t in, std::size_t out) {
        const double a = c.raw[in], b = c.raw[out];
        if (!std::isfinite(b) || !(a > b)) return c.hs[in];
        return c.hs[in] + (c.hs[out] - c.hs[in]) * a / (a - b);
    };
    const double left = lo > 0 ? cross(lo, lo - 1) : c.hs[lo];
    const double right = hi + 1 < c.hs.size() ? cross(hi, hi + 1) : c.hs[hi];
    return std::pair{left, right};
}

// CSV `h,d`; unattained points are written as the token -inf.
inline std::string spectrum_csv(const SpectrumCurve& c) {
    std::string out = "h,d\n";
    for (std::size_t i = 0; i < c.hs.size(); ++i) out += io::format_double(c.hs[i]) + ',' + io::format_double(c.d[i]) + '\n';
    return out;
}

inline nlohmann::json spectrum_provenance(const SpectrumCurve& c) {
    nlohmann::json j{{"provenance", c.provenance}, {"points", c.hs.size()}};
    if (!c.warnings.empty()) j["warnings"] = c.warnings;
    return j;
}

inline void write_spectrum(const SpectrumCurve& c, const std::filesystem::path& csv) {
    io::atomic_write(csv, spectrum_csv(c));
    io::write_json(io::sidecar_path(csv), spectrum_provenance(c));
}

inline SpectrumCurve read_spectrum(const std::filesystem::path& csv) {
    SpectrumCurve c;
    for (const auto& row : io::read_csv(csv, {"h", "d"})) {
        if (row.size() != 2) throw LoadError(csv.string() + ": expected 2 columns");
        c.hs.push_back(row[0]);
        c.d.push_back(row[1]);
        c.raw.push_back(row[1]);
    }
    c.provenance = "file:" + csv.filename().string();
    return c;
}

}  // namespace mfbounds
