#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "mfbounds/error.hpp"
#include "mfbounds/io.hpp"
#include "mfbounds/legendre.hpp"

namespace mfbounds {

namespace spectrum_model {

struct SelfSimilar {
    double hurst = 0.5;
};
struct Stable {
    double alpha = 1.0;
};
struct Lfsm {
    double hurst = 0.9;
    double alpha = 1.2;
};
// Levy process with Blumenthal-Getoor index beta; a Brownian component
// moves the top of the spectrum to h = 1/2.
struct Levy {
    double beta = 0.5;
    bool has_gaussian_component = false;
};
struct Cascade {
    double lambda2 = 0.025;
};
struct Mrw {
    double lambda2 = 0.025;
};

}  // namespace spectrum_model

using SpectrumModel = std::variant<spectrum_model::SelfSimilar, spectrum_model::Stable, spectrum_model::Lfsm,
                                   spectrum_model::Levy, spectrum_model::Cascade, spectrum_model::Mrw>;

namespace detail {

inline constexpr double kPointTol = 1e-9;

inline void validate_model(const spectrum_model::SelfSimilar& m) {
    if (!(m.hurst > 0.0 && std::isfinite(m.hurst))) throw ValidationError("hurst", "must be positive");
}
inline void validate_model(const spectrum_model::Stable& m) {
    if (!(m.alpha > 0.0 && m.alpha <= 2.0)) throw ValidationError("alpha", "must lie in (0, 2]");
}
inline void validate_model(const spectrum_model::Lfsm& m) {
    if (!(m.hurst > 0.0 && m.hurst < 1.0)) throw ValidationError("hurst", "must lie in (0, 1)");
    if (!(m.alpha > 0.0 && m.alpha < 2.0)) throw ValidationError("alpha", "must lie in (0, 2)");
    if (m.hurst < 1.0 / m.alpha) throw ValidationError("hurst", "the closed-form spectrum needs H >= 1/alpha");
}
inline void validate_model(const spectrum_model::Levy& m) {
    if (!(m.beta >= 0.0 && m.beta <= 2.0)) throw ValidationError("beta", "must lie in [0, 2]");
}
inline void validate_model(const spectrum_model::Cascade& m) { check_lambda2(m.lambda2); }
inline void validate_model(const spectrum_model::Mrw& m) { check_lambda2(m.lambda2); }

inline double parabola(double h, double centre, double width2) {
    const double d = 1.0 - (h - centre) * (h - centre) / width2;
    if (d < -1e-12) return kNotAttained;
    return std::max(d, 0.0);
}

inline double model_value(const spectrum_model::SelfSimilar& m, double h) {
    return std::abs(h - m.hurst) <= kPointTol * std::max(1.0, m.hurst) ? 1.0 : kNotAttained;
}
inline double model_value(const spectrum_model::Stable& m, double h) {
    return h >= 0.0 && h <= 1.0 / m.alpha ? std::min(m.alpha * h, 1.0) : kNotAttained;
}
inline double model_value(const spectrum_model::Lfsm& m, double h) {
    const double lo = m.hurst - 1.0 / m.alpha;
    return h >= lo && h <= m.hurst ? std::clamp(m.alpha * (h - m.hurst) + 1.0, 0.0, 1.0) : kNotAttained;
}
inline double model_value(const spectrum_model::Levy& m, double h) {
    const double top = m.has_gaussian_component ? 0.5 : 1.0 / m.beta;
    if (std::abs(h - top) <= kPointTol * std::max(1.0, top)) return 1.0;
    return h >= 0.0 && h < top ? m.beta * h : kNotAttained;
}
inline double model_value(const spectrum_model::Cascade& m, double h) {
    return parabola(h, 1.0 + 2.0 * m.lambda2, 8.0 * m.lambda2);
}
inline double model_value(const spectrum_model::Mrw& m, double h) {
    return parabola(h, 0.5 + m.lambda2, 2.0 * m.lambda2);
}

}  // namespace detail

inline std::string model_name(const SpectrumModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, spectrum_model::SelfSimilar>) return "self-similar(H=" + io::format_double(m.hurst) + ")";
            else if constexpr (std::is_same_v<T, spectrum_model::Stable>) return "stable(alpha=" + io::format_double(m.alpha) + ")";
            else if constexpr (std::is_same_v<T, spectrum_model::Lfsm>)
                return "lfsm(H=" + io::format_double(m.hurst) + ",alpha=" + io::format_double(m.alpha) + ")";
            else if constexpr (std::is_same_v<T, spectrum_model::Levy>)
                return "levy(beta=" + io::format_double(m.beta) + (m.has_gaussian_component ? ",gaussian)" : ")");
            else if constexpr (std::is_same_v<T, spectrum_model::Cascade>) return "cascade(lambda2=" + io::format_double(m.lambda2) + ")";
            else return "mrw(lambda2=" + io::format_double(m.lambda2) + ")";
        },
        model);
}

inline SpectrumCurve theoretical_spectrum(const SpectrumModel& model, const std::vector<double>& hs) {
    std::visit([](const auto& m) { detail::validate_model(m); }, model);
    if (hs.empty()) throw ValidationError("hs", "h grid is empty");
    SpectrumCurve c{hs, std::vector<double>(hs.size()), {}, "closed-form:" + model_name(model), {}};
    for (std::size_t i = 0; i < hs.size(); ++i)
        c.d[i] = std::visit([h = hs[i]](const auto& m) { return detail::model_value(m, h); }, model);
    c.raw = c.d;
    return c;
}

// Closed-form support [h_low, h_high] of each reference spectrum.
inline std::pair<double, double> theoretical_support(const SpectrumModel& model) {
    std::visit([](const auto& m) { detail::validate_model(m); }, model);
    return std::visit(
        [](const auto& m) -> std::pair<double, double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, spectrum_model::SelfSimilar>) return {m.hurst, m.hurst};
            else if constexpr (std::is_same_v<T, spectrum_model::Stable>) return {0.0, 1.0 / m.alpha};
            else if constexpr (std::is_same_v<T, spectrum_model::Lfsm>) return {m.hurst - 1.0 / m.alpha, m.hurst};
            else if constexpr (std::is_same_v<T, spectrum_model::Levy>)
                return {0.0, m.has_gaussian_component ? 0.5 : 1.0 / m.beta};
            else if constexpr (std::is_same_v<T, spectrum_model::Cascade>) {
                const double r = 2.0 * std::sqrt(2.0 * m.lambda2);
                return {1.0 + 2.0 * m.lambda2 - r, 1.0 + 2.0 * m.lambda2 + r};
            } else {
                const double r = std::sqrt(2.0 * m.lambda2);
                return {0.5 + m.lambda2 - r, 0.5 + m.lambda2 + r};
            }
        },
        model);
}

struct QuadratureOptions {
    double tolerance = 1e-12;
    std::size_t max_refinements = 9;
    double accept = 1e-8;  // largest relative error estimate accepted
};

// E|X(1)|^q for X(1) ~ IG(delta, lambda), by quadrature of x^q f(x) over
// (0, inf) with f the inverse Gaussian density.
inline double ig_abs_moment(double q, double delta, double lambda, const QuadratureOptions& opt = {}) {
    if (!(delta > 0.0)) throw ValidationError("delta", "must be positive");
    if (!(lambda > 0.0)) throw ValidationError("lambda", "must be positive");
    if (!std::isfinite(q)) throw ValidationError("q", "must be finite");
    const double log_c = std::log(delta) - 0.5 * std::log(2.0 * std::numbers::pi) + delta * lambda;
    auto integrand = [&](double x) {
        if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
        return std::exp(log_c + (q - 1.5) * std::log(x) - 0.5 * (delta * delta / x + lambda * lambda * x));
    };
    boost::math::quadrature::exp_sinh<double> integrator(opt.max_refinements);
    double error = 0.0, l1 = 0.0;
    const double value = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                              opt.tolerance, &error, &l1);
    if (!std::isfinite(value) || !(error <= opt.accept * std::max(l1, std::abs(value))))
        throw NumericError("IG moment quadrature did not converge: achieved relative error " +
                           io::format_double(l1 > 0.0 ? error / l1 : error));
    return value;
}

// Cumulant log E exp(-theta X(1)) of the positive tempered stable law.
inline double tempered_stable_cumulant(double theta, double alpha, double delta, double lambda) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha", "must lie in (0, 1)");
    if (!(delta > 0.0)) throw ValidationError("delta", "must be positive");
    if (!(lambda > 0.0)) throw ValidationError("lambda", "must be positive");
    if (!(theta >= 0.0)) throw ValidationError("theta", "must be non-negative");
    return delta * lambda - delta * std::pow(std::pow(lambda, 1.0 / alpha) + 2.0 * theta, alpha);
}

}  // namespace mfbounds
