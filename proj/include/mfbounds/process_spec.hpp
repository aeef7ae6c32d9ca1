#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include <nlohmann/json.hpp>

#include "mfbounds/error.hpp"

namespace mfbounds {

namespace process {

struct BM {};

struct FBM {
    double hurst = 0.5;
};

// S_alpha(sigma, beta, mu), sigma/beta/mu as in the standard
// Samorodnitsky-Taqqu parametrization (mu is a location shift).
struct StableLevy {
    double alpha = 1.0;
    double sigma = 1.0;
    double beta = 0.0;
    double mu = 0.0;
};

struct LFSM {
    double hurst = 0.9;
    double alpha = 1.2;
    int kernel_cutoff = 600;
    int mesh = 256;
};

struct IGLevy {
    double delta = 1.0;
    double lambda = 1.0;
};

struct StableSubordinator {
    double alpha = 0.5;
    double sigma = 1.0;
};

struct InverseStableSubordinator {
    double alpha = 0.5;
    int refine = 4;
};

// `horizon` is the integral scale L of the log-correlated field.
struct LognormalCascade {
    double lambda2 = 0.025;
    double horizon = 1.0;
};

struct MRW {
    double lambda2 = 0.025;
    double horizon = 1.0;
};

}  // namespace process

using ProcessSpec =
    std::variant<process::BM, process::FBM, process::StableLevy, process::LFSM, process::IGLevy,
                 process::StableSubordinator, process::InverseStableSubordinator,
                 process::LognormalCascade, process::MRW>;

namespace detail {

inline void require(bool ok, const char* field, const char* what) {
    if (!ok) throw ValidationError(field, what);
}

inline bool finite(double x) { return std::isfinite(x); }

}  // namespace detail

inline std::string family_name(const ProcessSpec& spec) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, process::BM>) return "bm";
            else if constexpr (std::is_same_v<T, process::FBM>) return "fbm";
            else if constexpr (std::is_same_v<T, process::StableLevy>) return "stable";
            else if constexpr (std::is_same_v<T, process::LFSM>) return "lfsm";
            else if constexpr (std::is_same_v<T, process::IGLevy>) return "ig";
            else if constexpr (std::is_same_v<T, process::StableSubordinator>) return "stable-subordinator";
            else if constexpr (std::is_same_v<T, process::InverseStableSubordinator>) return "inverse-stable-subordinator";
            else if constexpr (std::is_same_v<T, process::LognormalCascade>) return "cascade";
            else return "mrw";
        },
        spec);
}

// Families whose sample paths are non-decreasing.
inline bool is_monotone(const ProcessSpec& spec) {
    return std::holds_alternative<process::StableSubordinator>(spec) ||
           std::holds_alternative<process::InverseStableSubordinator>(spec) ||
           std::holds_alternative<process::LognormalCascade>(spec) ||
           std::holds_alternative<process::IGLevy>(spec);
}

inline void validate(const process::BM&) {}

inline void validate(const process::FBM& p) {
    detail::require(p.hurst > 0.0 && p.hurst < 1.0, "hurst", "must lie in (0, 1)");
}

inline void validate(const process::StableLevy& p) {
    detail::require(p.alpha > 0.0 && p.alpha <= 2.0, "alpha", "must lie in (0, 2]");
    detail::require(p.sigma > 0.0 && detail::finite(p.sigma), "sigma", "must be positive");
    detail::require(p.beta >= -1.0 && p.beta <= 1.0, "beta", "must lie in [-1, 1]");
    detail::require(detail::finite(p.mu), "mu", "must be finite");
}

inline void validate(const process::LFSM& p) {
    detail::require(p.hurst > 0.0 && p.hurst < 1.0, "hurst", "must lie in (0, 1)");
    // alpha = 2 is accepted as the Gaussian degenerate case (reduces to FBM).
    detail::require(p.alpha > 0.0 && p.alpha <= 2.0, "alpha", "must lie in (0, 2]");
    detail::require(std::abs(p.hurst - 1.0 / p.alpha) > 1e-12, "hurst", "must differ from 1/alpha");
    detail::require(p.kernel_cutoff >= 1, "kernel_cutoff", "must be a positive integer");
    detail::require(p.mesh >= 1, "mesh", "must be a positive integer");
}

inline void validate(const process::IGLevy& p) {
    detail::require(p.delta > 0.0 && detail::finite(p.delta), "delta", "must be positive");
    detail::require(p.lambda >= 0.0 && detail::finite(p.lambda), "lambda", "must be non-negative");
}

inline void validate(const process::StableSubordinator& p) {
    detail::require(p.alpha > 0.0 && p.alpha < 1.0, "alpha", "must lie in (0, 1)");
    detail::require(p.sigma > 0.0 && detail::finite(p.sigma), "sigma", "must be positive");
}

inline void validate(const process::InverseStableSubordinator& p) {
    detail::require(p.alpha > 0.0 && p.alpha < 1.0, "alpha", "must lie in (0, 1)");
    detail::require(p.refine >= 1, "refine", "must be a positive integer");
}

inline void validate(const process::LognormalCascade& p) {
    detail::require(p.lambda2 > 0.0 && p.lambda2 < 0.5, "lambda2", "must lie in (0, 1/2)");
    detail::require(p.horizon > 0.0 && detail::finite(p.horizon), "horizon", "must be positive");
}

inline void validate(const process::MRW& p) {
    detail::require(p.lambda2 > 0.0 && p.lambda2 < 0.5, "lambda2", "must lie in (0, 1/2)");
    detail::require(p.horizon > 0.0 && detail::finite(p.horizon), "horizon", "must be positive");
}

inline void validate(const ProcessSpec& spec) {
    std::visit([](const auto& p) { validate(p); }, spec);
}

// JSON form: {"family": "<name>", <parameters...>}.
inline nlohmann::json to_json_value(const ProcessSpec& spec) {
    nlohmann::json j;
    j["family"] = family_name(spec);
    std::visit(
        [&j](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, process::FBM>) {
                j["hurst"] = p.hurst;
            } else if constexpr (std::is_same_v<T, process::StableLevy>) {
                j["alpha"] = p.alpha;
                j["sigma"] = p.sigma;
                j["beta"] = p.beta;
                j["mu"] = p.mu;
            } else if constexpr (std::is_same_v<T, process::LFSM>) {
                j["hurst"] = p.hurst;
                j["alpha"] = p.alpha;
                j["kernel_cutoff"] = p.kernel_cutoff;
                j["mesh"] = p.mesh;
            } else if constexpr (std::is_same_v<T, process::IGLevy>) {
                j["delta"] = p.delta;
                j["lambda"] = p.lambda;
            } else if constexpr (std::is_same_v<T, process::StableSubordinator>) {
                j["alpha"] = p.alpha;
                j["sigma"] = p.sigma;
            } else if constexpr (std::is_same_v<T, process::InverseStableSubordinator>) {
                j["alpha"] = p.alpha;
                j["refine"] = p.refine;
            } else if constexpr (std::is_same_v<T, process::LognormalCascade> ||
                                 std::is_same_v<T, process::MRW>) {
                j["lambda2"] = p.lambda2;
                j["horizon"] = p.horizon;
            }
        },
        spec);
    return j;
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(key, "has the wrong type");
    }
}

}  // namespace detail

// Missing parameters keep their defaults; the result is validated.
inline ProcessSpec process_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw ValidationError("process", "expected an object with a string \"family\"");
    const auto family = j["family"].get<std::string>();
    ProcessSpec spec;
    if (family == "bm") {
        spec = process::BM{};
    } else if (family == "fbm") {
        process::FBM p;
        detail::read_field(j, "hurst", p.hurst);
        spec = p;
    } else if (family == "stable") {
        process::StableLevy p;
        detail::read_field(j, "alpha", p.alpha);
        detail::read_field(j, "sigma", p.sigma);
        detail::read_field(j, "beta", p.beta);
        detail::read_field(j, "mu", p.mu);
        spec = p;
    } else if (family == "lfsm") {
        process::LFSM p;
        detail::read_field(j, "hurst", p.hurst);
        detail::read_field(j, "alpha", p.alpha);
        detail::read_field(j, "kernel_cutoff", p.kernel_cutoff);
        detail::read_field(j, "mesh", p.mesh);
        spec = p;
    } else if (family == "ig") {
        process::IGLevy p;
        detail::read_field(j, "delta", p.delta);
        detail::read_field(j, "lambda", p.lambda);
        spec = p;
    } else if (family == "stable-subordinator") {
        process::StableSubordinator p;
        detail::read_field(j, "alpha", p.alpha);
        detail::read_field(j, "sigma", p.sigma);
        spec = p;
    } else if (family == "inverse-stable-subordinator") {
        process::InverseStableSubordinator p;
        detail::read_field(j, "alpha", p.alpha);
        detail::read_field(j, "refine", p.refine);
        spec = p;
    } else if (family == "cascade") {
        process::LognormalCascade p;
        detail::read_field(j, "lambda2", p.lambda2);
        detail::read_field(j, "horizon", p.horizon);
        spec = p;
    } else if (family == "mrw") {
        process::MRW p;
        detail::read_field(j, "lambda2", p.lambda2);
        detail::read_field(j, "horizon", p.horizon);
        spec = p;
    } else {
        throw ValidationError("process", "unknown family '" + family + "'");
    }
    validate(spec);
    return spec;
}

}  // namespace mfbounds
