#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "mfbounds/error.hpp"
#include "mfbounds/io.hpp"

namespace mfbounds {

// Closed-form scaling functions of the reference families.
namespace tau_model {

struct SelfSimilar {
    double hurst = 0.5;
};
// Asymptotic tau of the partition-function estimator for a stable Levy process.
struct StableAsym {
    double alpha = 1.0;
};
struct LfsmAsym {
    double hurst = 0.9;
    double alpha = 1.2;
};
// Heavy-tailed Levy process with tail index alpha.
struct LevyAsym {
    double alpha = 1.0;
};
struct Cascade {
    double lambda2 = 0.025;
};
// Almost-sure limit of the dyadic estimator for the cascade: the parabola
// between q0- and q0+, tangent lines outside.
struct CascadeLinearized {
    double lambda2 = 0.025;
};
struct Mrw {
    double lambda2 = 0.025;
};

}  // namespace tau_model

using Parametric = std::variant<tau_model::SelfSimilar, tau_model::StableAsym, tau_model::LfsmAsym,
                                tau_model::LevyAsym, tau_model::Cascade, tau_model::CascadeLinearized,
                                tau_model::Mrw>;

struct Tabulated {
    std::vector<double> qs;
    std::vector<double> tau;
};

// Open interval (q_lower, q_upper) of orders with finite moments.
struct MomentRange {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double q) const { return q > lower && q < upper; }
};

namespace detail {

inline void check_lambda2(double lambda2) {
    if (!(lambda2 > 0.0 && lambda2 < 0.5)) throw ValidationError("lambda2", "must lie in (0, 1/2)");
}

inline double quadratic_tau(double a, double b, double q) { return a * q - b * q * q; }

}  // namespace detail

// Cascade and MRW taus are a q - b q^2; these return (a, b).
inline std::pair<double, double> quadratic_coefficients(const tau_model::Cascade& c) {
    return {1.0 + 2.0 * c.lambda2, 2.0 * c.lambda2};
}
inline std::pair<double, double> quadratic_coefficients(const tau_model::CascadeLinearized& c) {
    return quadratic_coefficients(tau_model::Cascade{c.lambda2});
}
inline std::pair<double, double> quadratic_coefficients(const tau_model::Mrw& m) {
    return {0.5 + m.lambda2, 0.5 * m.lambda2};
}

// Breakpoints q0-/q0+ = -+1/sqrt(2 lambda^2) of the linearized cascade tau.
inline double linearization_point(double lambda2) { return 1.0 / std::sqrt(2.0 * lambda2); }

inline double evaluate(const tau_model::SelfSimilar& m, double q) { return m.hurst * q; }

inline double evaluate(const tau_model::StableAsym& m, double q) { return q <= m.alpha ? q / m.alpha : 1.0; }

inline double evaluate(const tau_model::LfsmAsym& m, double q) {
    return q <= m.alpha ? m.hurst * q : 1.0 + q * (m.hurst - 1.0 / m.alpha);
}

// Positive orders follow the four-branch asymptotic form; q <= 0 continues
// the small-q branch.
inline double evaluate(const tau_model::LevyAsym& m, double q) {
    const double a = m.alpha;
    if (a <= 2.0) return q <= a ? q / a : 1.0;
    if (q <= a) return q / 2.0;
    return q / 2.0 + 2.0 * (a - q) * (a - q) * (2.0 * a + 4.0 * q - 3.0 * a * q) / (a * a * a * (2.0 - q) * (2.0 - q));
}

inline double evaluate(const tau_model::Cascade& m, double q) {
    const auto [a, b] = quadratic_coefficients(m);
    return detail::quadratic_tau(a, b, q);
}

inline double evaluate(const tau_model::Mrw& m, double q) {
    const auto [a, b] = quadratic_coefficients(m);
    return detail::quadratic_tau(a, b, q);
}

// Outside (q0-, q0+) the parabola is replaced by its tangent at q0+-, which
// is h0+- q + 1 with h0+- = tau'(q0+-).
inline double evaluate(const tau_model::CascadeLinearized& m, double q) {
    const auto [a, b] = quadratic_coefficients(m);
    const double q0 = linearization_point(m.lambda2);
    if (q >= q0) return (a - 2.0 * b * q0) * q + 1.0;
    if (q <= -q0) return (a + 2.0 * b * q0) * q + 1.0;
    return detail::quadratic_tau(a, b, q);
}

inline double evaluate(const Tabulated& t, double q) {
    const auto& x = t.qs;
    if (q <= x.front()) return t.tau.front();
    if (q >= x.back()) return t.tau.back();
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (q - x[i - 1]) / (x[i] - x[i - 1]);
    return t.tau[i - 1] + w * (t.tau[i] - t.tau[i - 1]);
}

inline void validate(const tau_model::SelfSimilar& m) {
    if (!(m.hurst > 0.0 && std::isfinite(m.hurst))) throw ValidationError("hurst", "must be positive");
}
inline void validate(const tau_model::StableAsym& m) {
    if (!(m.alpha > 0.0 && m.alpha <= 2.0)) throw ValidationError("alpha", "must lie in (0, 2]");
}
inline void validate(const tau_model::LfsmAsym& m) {
    if (!(m.hurst > 0.0 && m.hurst < 1.0)) throw ValidationError("hurst", "must lie in (0, 1)");
    if (!(m.alpha > 0.0 && m.alpha < 2.0)) throw ValidationError("alpha", "must lie in (0, 2)");
}
inline void validate(const tau_model::LevyAsym& m) {
    if (!(m.alpha > 0.0 && std::isfinite(m.alpha))) throw ValidationError("alpha", "must be positive");
}
inline void validate(const tau_model::Cascade& m) { detail::check_lambda2(m.lambda2); }
inline void validate(const tau_model::CascadeLinearized& m) { detail::check_lambda2(m.lambda2); }
inline void validate(const tau_model::Mrw& m) { detail::check_lambda2(m.lambda2); }

inline void validate(const Tabulated& t) {
    if (t.qs.size() < 2 || t.qs.size() != t.tau.size())
        throw ValidationError("tau", "tabulated scaling function needs at least two aligned (q, tau) pairs");
    for (std::size_t i = 0; i < t.qs.size(); ++i) {
        if (!std::isfinite(t.qs[i]) || !std::isfinite(t.tau[i])) throw ValidationError("tau", "values must be finite");
        if (i > 0 && !(t.qs[i] > t.qs[i - 1])) throw ValidationError("qs", "must be strictly ascending");
    }
}

// Default finite-moment range of each family.
inline MomentRange default_moment_range(const Parametric& p) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [&](const auto& m) -> MomentRange {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, tau_model::SelfSimilar>) return {-1.0, inf};
            else if constexpr (std::is_same_v<T, tau_model::StableAsym> || std::is_same_v<T, tau_model::LfsmAsym> ||
                               std::is_same_v<T, tau_model::LevyAsym>)
                return {-1.0, m.alpha};
            else if constexpr (std::is_same_v<T, tau_model::Mrw>) return {-1.0, 1.0 / m.lambda2};
            else return {-inf, 2.0 / m.lambda2};  // cascade: tail index 2 / lambda^2
        },
        p);
}

inline std::string model_name(const Parametric& p) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, tau_model::SelfSimilar>) return "self-similar(H=" + io::format_double(m.hurst) + ")";
            else if constexpr (std::is_same_v<T, tau_model::StableAsym>) return "stable-asym(alpha=" + io::format_double(m.alpha) + ")";
            else if constexpr (std::is_same_v<T, tau_model::LfsmAsym>)
                return "lfsm-asym(H=" + io::format_double(m.hurst) + ",alpha=" + io::format_double(m.alpha) + ")";
            else if constexpr (std::is_same_v<T, tau_model::LevyAsym>) return "levy-asym(alpha=" + io::format_double(m.alpha) + ")";
            else if constexpr (std::is_same_v<T, tau_model::Cascade>) return "cascade(lambda2=" + io::format_double(m.lambda2) + ")";
            else if constexpr (std::is_same_v<T, tau_model::CascadeLinearized>)
                return "cascade-linearized(lambda2=" + io::format_double(m.lambda2) + ")";
            else return "mrw(lambda2=" + io::format_double(m.lambda2) + ")";
        },
        p);
}

class ScalingFunction {
public:
    using Form = std::variant<Tabulated, Parametric>;

    ScalingFunction(Form form, MomentRange range) : form_(std::move(form)), range_(range) {
        std::visit([](const auto& f) {
            if constexpr (std::is_same_v<std::decay_t<decltype(f)>, Parametric>)
                std::visit([](const auto& m) { validate(m); }, f);
            else validate(f);
        }, form_);
        if (!(range_.lower < 0.0 && range_.upper > 0.0))
            throw ValidationError("moment_range", "must contain a neighbourhood of 0");
    }

    double operator()(double q) const {
        return std::visit(
            [q](const auto& f) -> double {
                if constexpr (std::is_same_v<std::decay_t<decltype(f)>, Parametric>)
                    return std::visit([q](const auto& m) { return evaluate(m, q); }, f);
                else return evaluate(f, q);
            },
            form_);
    }

    const Form& form() const noexcept { return form_; }
    const MomentRange& moment_range() const noexcept { return range_; }
    bool is_tabulated() const noexcept { return std::holds_alternative<Tabulated>(form_); }
    const Tabulated* table() const noexcept { return std::get_if<Tabulated>(&form_); }
    const Parametric* model() const noexcept { return std::get_if<Parametric>(&form_); }

    std::string describe() const { return model() ? model_name(*model()) : std::string("tabulated"); }

private:
    Form form_;
    MomentRange range_;
};

inline ScalingFunction theoretical_tau(const Parametric& model) { return {model, default_moment_range(model)}; }

inline ScalingFunction theoretical_tau(const Parametric& model, MomentRange range) { return {model, range}; }

inline ScalingFunction tabulated_tau(std::vector<double> qs, std::vector<double> tau, MomentRange range = {}) {
    return {Tabulated{std::move(qs), std::move(tau)}, range};
}

}  // namespace mfbounds
