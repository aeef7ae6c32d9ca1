#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfbounds/error.hpp"
#include "mfbounds/io.hpp"
#include "mfbounds/scaling_function.hpp"

namespace mfbounds {

// An optimal value of (tau(q) - 1) / q and the order where it is reached.
// When the optimum is only approached at an open end of the feasible set,
// `q` is that end (possibly infinite).
struct Extremum {
    double value;
    double q;
};

struct HsssiBounds {
    double low;
    double high;
    bool trivial;
};

struct SpectrumBounds {
    std::optional<Extremum> h_minus;
    std::optional<Extremum> h_tilde_plus;
    std::optional<Extremum> h_plus;
    std::optional<HsssiBounds> hsssi;
};

inline constexpr double kFeasibilityTol = 1e-12;
inline constexpr double kSearchCap = 100.0;
inline constexpr std::size_t kSearchPoints = 20001;

namespace detail {

inline double bound_ratio(const ScalingFunction& tau, double q) { return (tau(q) - 1.0) / q; }

// Grid search of (tau(q) - 1) / q over the open interval (lo, hi), q != 0,
// restricted to points passing `feasible`, with a parabolic step around the
// best interior node. Finite ends are scored by their limit value.
template <class Feasible>
std::optional<Extremum> search_ratio(const ScalingFunction& tau, double lo, double hi, bool maximize,
                                     Feasible feasible) {
    if (const Tabulated* t = tau.table()) {
        lo = std::max(lo, t->qs.front());
        hi = std::min(hi, t->qs.back());
    }
    lo = std::max(lo, -kSearchCap);
    hi = std::min(hi, kSearchCap);
    if (!(hi > lo)) return std::nullopt;

    std::vector<double> qs(kSearchPoints);
    for (std::size_t k = 0; k < kSearchPoints; ++k)
        qs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kSearchPoints - 1);
    qs.back() = hi;
    if (const Tabulated* t = tau.table())
        for (double q : t->qs)
            if (q > lo && q < hi) qs.push_back(q);
    std::sort(qs.begin(), qs.end());

    auto better = [maximize](double a, double b) { return maximize ? a > b : a < b; };
    auto inside_ok = [&](double q) {
        if (q == 0.0 || !feasible(q)) return false;
        return true;
    };
    std::optional<Extremum> best;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < qs.size(); ++k) {
        const double q = qs[k];
        if (q == 0.0) continue;
        const bool edge = (k == 0 || k + 1 == qs.size());
        if (edge) {
            const double nudge = 1e-9 * std::max(1.0, std::abs(q));
            if (!inside_ok(k == 0 ? q + nudge : q - nudge)) continue;
        } else if (!inside_ok(q)) {
            continue;
        }
        const double v = bound_ratio(tau, q);
        if (!std::isfinite(v)) continue;
        if (!best || better(v, best->value)) {
            best = Extremum{v, q};
            best_k = k;
        }
    }
    if (!best || best_k == 0 || best_k + 1 >= qs.size()) return best;

    const double x0 = qs[best_k - 1], x1 = qs[best_k], x2 = qs[best_k + 1];
    if (!inside_ok(x0) || !inside_ok(x2)) return best;
    const double y0 = bound_ratio(tau, x0), y1 = best->value, y2 = bound_ratio(tau, x2);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if (den == 0.0) return best;
    const double xv = x1 - 0.5 * ((x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0)) / den;
    if (xv > x0 && xv < x2 && inside_ok(xv)) {
        const double v = bound_ratio(tau, xv);
        if (std::isfinite(v) && better(v, best->value)) best = Extremum{v, xv};
    }
    return best;
}

// tau = a q - b q^2 with a, b > 0. The ratio a - b q - 1/q is concave on
// q > 0 and convex on q < 0 with stationary points -+1/sqrt(b), so each
// optimum is the stationary point clipped to the feasible interval.
inline std::optional<Extremum> quadratic_h_minus(double a, double b, double q_upper) {
    const double disc = a * a - 4.0 * b;
    if (!(disc > 0.0)) return std::nullopt;
    const double r_lo = (a - std::sqrt(disc)) / (2.0 * b);
    const double r_hi = std::min((a + std::sqrt(disc)) / (2.0 * b), q_upper);
    if (!(r_hi > r_lo)) return std::nullopt;
    const double q = std::clamp(1.0 / std::sqrt(b), r_lo, r_hi);
    return Extremum{a - b * q - 1.0 / q, q};
}

inline std::optional<Extremum> quadratic_negative_min(double a, double b, double q_lower) {
    const double q = std::max(-1.0 / std::sqrt(b), q_lower);
    return Extremum{a - b * q - 1.0 / q, q};
}

// tau = H q: the ratio H - 1/q increases in q on both half-lines.
inline std::optional<Extremum> linear_h_minus(double hurst, double q_upper) {
    if (!(hurst * q_upper > 1.0)) return std::nullopt;
    return Extremum{std::isfinite(q_upper) ? hurst - 1.0 / q_upper : hurst, q_upper};
}

inline std::optional<Extremum> linear_negative_min(double hurst, double q_lower) {
    return Extremum{std::isfinite(q_lower) ? hurst - 1.0 / q_lower : hurst, q_lower};
}

}  // namespace detail

// Numeric versions of the two tau-based bounds; the closed forms below are
// checked against these.
inline std::optional<Extremum> h_minus_numeric(const ScalingFunction& tau) {
    return detail::search_ratio(tau, 0.0, tau.moment_range().upper, true,
                                [&](double q) { return tau(q) > 1.0 + kFeasibilityTol; });
}

inline std::optional<Extremum> h_tilde_plus_numeric(const ScalingFunction& tau) {
    return detail::search_ratio(tau, tau.moment_range().lower, 0.0, false,
                                [&](double q) { return tau(q) < 1.0 - kFeasibilityTol; });
}

inline std::optional<Extremum> h_plus_numeric(const ScalingFunction& tau_of_m) {
    return detail::search_ratio(tau_of_m, tau_of_m.moment_range().lower, 0.0, false, [](double) { return true; });
}

// H- = sup{(tau(q) - 1)/q : 0 < q < q_upper, tau(q) > 1}.
inline std::optional<Extremum> h_minus_from_tau(const ScalingFunction& tau) {
    const double qu = tau.moment_range().upper;
    if (const Parametric* p = tau.model()) {
        if (const auto* m = std::get_if<tau_model::SelfSimilar>(p)) return detail::linear_h_minus(m->hurst, qu);
        if (const auto* m = std::get_if<tau_model::Cascade>(p)) {
            const auto [a, b] = quadratic_coefficients(*m);
            return detail::quadratic_h_minus(a, b, qu);
        }
        if (const auto* m = std::get_if<tau_model::Mrw>(p)) {
            const auto [a, b] = quadratic_coefficients(*m);
            return detail::quadratic_h_minus(a, b, qu);
        }
        if (const auto* m = std::get_if<tau_model::CascadeLinearized>(p)) {
            // Beyond q0+ the ratio is constant at h0+; q0+ is the smallest maximizer.
            const auto [a, b] = quadratic_coefficients(*m);
            const double q0 = linearization_point(m->lambda2);
            if (qu > q0 && tau(q0) > 1.0 + kFeasibilityTol) return Extremum{a - 2.0 * b * q0, q0};
            return detail::quadratic_h_minus(a, b, qu);
        }
    }
    return h_minus_numeric(tau);
}

// H~+ = inf{(tau(q) - 1)/q : q_lower < q < 0, tau(q) < 1}.
inline std::optional<Extremum> h_tilde_plus_from_tau(const ScalingFunction& tau) {
    const double ql = tau.moment_range().lower;
    if (const Parametric* p = tau.model()) {
        if (const auto* m = std::get_if<tau_model::SelfSimilar>(p)) return detail::linear_negative_min(m->hurst, ql);
        if (const auto* m = std::get_if<tau_model::Cascade>(p)) {
            const auto [a, b] = quadratic_coefficients(*m);
            return detail::quadratic_negative_min(a, b, ql);
        }
        if (const auto* m = std::get_if<tau_model::Mrw>(p)) {
            const auto [a, b] = quadratic_coefficients(*m);
            return detail::quadratic_negative_min(a, b, ql);
        }
        if (const auto* m = std::get_if<tau_model::CascadeLinearized>(p)) {
            const auto [a, b] = quadratic_coefficients(*m);
            const double q0 = linearization_point(m->lambda2);
            if (ql < -q0) return Extremum{a + 2.0 * b * q0, -q0};
            return detail::quadratic_negative_min(a, b, ql);
        }
    }
    return h_tilde_plus_numeric(tau);
}

inline SpectrumBounds support_bounds_from_tau(const ScalingFunction& tau) {
    return {h_minus_from_tau(tau), h_tilde_plus_from_tau(tau), std::nullopt, std::nullopt};
}

// H+ = min{(tau_M(q) - 1)/q : q < 0, E|M|^q finite}, where tau_M is the
// scaling function of the multiplicative factor.
inline std::optional<Extremum> h_plus_from_factor_tau(const ScalingFunction& tau_of_m) {
    const double ql = tau_of_m.moment_range().lower;
    if (const Parametric* p = tau_of_m.model()) {
        if (const auto* m = std::get_if<tau_model::SelfSimilar>(p)) return detail::linear_negative_min(m->hurst, ql);
        if (const auto* m = std::get_if<tau_model::Cascade>(p)) {
            const auto [a, b] = quadratic_coefficients(*m);
            return detail::quadratic_negative_min(a, b, ql);
        }
        if (const auto* m = std::get_if<tau_model::Mrw>(p)) {
            const auto [a, b] = quadratic_coefficients(*m);
            return detail::quadratic_negative_min(a, b, ql);
        }
    }
    return h_plus_numeric(tau_of_m);
}

// Support of the spectrum of an H-sssi process with finite moments up to
// q_upper: [H - 1/q_upper, H]. An infinite q_upper collapses it to {H}.
inline HsssiBounds hsssi_bounds(double hurst, double q_upper) {
    if (!(hurst > 0.0) || !std::isfinite(hurst)) throw DomainError("H > 0 is required");
    if (!(q_upper > 0.0)) throw DomainError("q_upper > 0 is required");
    if (std::isinf(q_upper)) return {hurst, hurst, true};
    const double low = hurst - 1.0 / q_upper;
    if (low < 0.0)
        throw DomainError("H - 1/q_upper >= 0 is required, got " + io::format_double(hurst) + " - 1/" +
                          io::format_double(q_upper) + " = " + io::format_double(low));
    return {low, hurst, false};
}

inline nlohmann::json bounds_json(const SpectrumBounds& b) {
    auto value = [](const std::optional<Extremum>& e) -> nlohmann::json {
        return e ? nlohmann::json(e->value) : nlohmann::json(nullptr);
    };
    nlohmann::json j{{"h_minus", value(b.h_minus)},
                     {"h_tilde_plus", value(b.h_tilde_plus)},
                     {"h_plus", value(b.h_plus)},
                     {"hsssi_low", nullptr},
                     {"hsssi_high", nullptr},
                     {"trivial", false}};
    if (b.hsssi) {
        j["hsssi_low"] = b.hsssi->low;
        j["hsssi_high"] = b.hsssi->high;
        j["trivial"] = b.hsssi->trivial;
    }
    return j;
}

}  // namespace mfbounds
