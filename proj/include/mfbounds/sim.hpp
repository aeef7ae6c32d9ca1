#pragma once

// Seedable sample-path generators for every supported process family.
//
// All generators are pure functions of (parameters, n, horizon, seed). Each
// returns n + 1 points on the uniform grid t_k = k * horizon / n with
// values[0] == 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "mfbounds/error.hpp"
#include "mfbounds/fft.hpp"
#include "mfbounds/process_spec.hpp"
#include "mfbounds/rng.hpp"
#include "mfbounds/sample_path.hpp"

namespace mfbounds {

inline constexpr std::size_t kMinFftPoints = 8;
inline constexpr std::size_t kCholeskyMax = 2048;
inline constexpr double kEigenClipTolerance = 1e-10;

// ---------------------------------------------------------------------------
// Scalar variates
// ---------------------------------------------------------------------------

// Chambers-Mallows-Stuck draw from S_alpha(sigma, beta, mu).
//
// The standardized draw X ~ S_alpha(1, beta, 0) is mapped by
//   alpha != 1:  sigma * X + mu
//   alpha == 1:  sigma * X + (2/pi) * beta * sigma * ln(sigma) + mu
// which is exactly S_alpha(sigma, beta, mu) under the characteristic function
//   exp{-sigma^a |z|^a (1 - i beta sign(z) tan(pi a / 2)) + i mu z}    (a != 1)
//   exp{-sigma |z| (1 + i beta (2/pi) sign(z) ln|z|) + i mu z}          (a == 1).
// With beta = 1, alpha < 1 and mu = 0 every draw is strictly positive.
inline double stable_variate(double alpha, double sigma, double beta, double mu, RandomStream& rng) {
    using std::numbers::pi;
    const double v = pi * (rng.uniform() - 0.5);
    const double w = rng.exponential();
    if (alpha == 1.0) {
        const double half_pi_bv = pi / 2 + beta * v;
        const double x = (2.0 / pi) * (half_pi_bv * std::tan(v) - beta * std::log((pi / 2) * w * std::cos(v) / half_pi_bv));
        return sigma * x + (2.0 / pi) * beta * sigma * std::log(sigma) + mu;
    }
    const double t = beta * std::tan(pi * alpha / 2);
    const double b = std::atan(t) / alpha;
    const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
    const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                     std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
    return sigma * x + mu;
}

inline double stable_variate(double alpha, double sigma, double beta, double mu, Seed seed) {
    validate(process::StableLevy{alpha, sigma, beta, mu});
    RandomStream rng(seed);
    return stable_variate(alpha, sigma, beta, mu, rng);
}

// Inverse Gaussian IG(delta, lambda) with density
//   delta / sqrt(2 pi) e^{delta lambda} x^{-3/2} exp(-(delta^2 / x + lambda^2 x) / 2),
// i.e. mean delta / lambda and shape delta^2. Michael-Schucany-Haas transform.
inline double ig_variate(double delta, double lambda, RandomStream& rng) {
    const double mean = delta / lambda;
    const double shape = delta * delta;
    const double z = rng.normal();
    const double a = mean * z * z / (2.0 * shape);
    // mean * (1 + a - sqrt(a^2 + 2a)), written without cancellation.
    const double x = mean / (1.0 + a + std::sqrt(a * a + 2.0 * a));
    return rng.uniform() <= mean / (mean + x) ? x : mean * mean / x;
}

inline double ig_variate(double delta, double lambda, Seed seed) {
    if (!(delta > 0.0)) throw ValidationError("delta", "must be positive");
    if (!(lambda > 0.0)) throw ValidationError("lambda", "must be positive for IG variates");
    RandomStream rng(seed);
    return ig_variate(delta, lambda, rng);
}

// ---------------------------------------------------------------------------
// Stationary Gaussian sequences by circulant embedding
// ---------------------------------------------------------------------------

namespace detail {

inline void check_size(std::size_t n, std::size_t min_points, const char* method) {
    if (n < min_points)
        throw SizeError(std::string(method) + " needs n >= " + std::to_string(min_points) + ", got " +
                        std::to_string(n));
}

inline void check_horizon(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon", "must be positive");
}

inline std::vector<double> cholesky_sequence(const std::vector<double>& autocov, std::size_t n, RandomStream& rng) {
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cov(i, j) = autocov[i > j ? i - j : j - i];
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericError("covariance matrix is not positive definite");
    Eigen::VectorXd z(n);
    for (std::size_t i = 0; i < n; ++i) z(i) = rng.normal();
    Eigen::VectorXd x = llt.matrixL() * z;
    return std::vector<double>(x.data(), x.data() + n);
}

// n draws of a zero-mean stationary Gaussian sequence with autocovariance
// autocov[0..n] (Davies-Harte, embedding length 2n).
inline std::vector<double> circulant_gaussian(const std::vector<double>& autocov, std::size_t n, RandomStream& rng,
                                              std::vector<std::string>& warnings) {
    const std::size_t size = 2 * n;
    std::vector<std::complex<double>> row(size);
    for (std::size_t k = 0; k <= n; ++k) row[k] = autocov[k];
    for (std::size_t k = 1; k < n; ++k) row[size - k] = autocov[k];
    auto eig = fft::dft(row);

    double min_eig = 0.0;
    for (const auto& e : eig) min_eig = std::min(min_eig, e.real());
    if (min_eig < -kEigenClipTolerance) {
        if (n <= kCholeskyMax) {
            warnings.push_back("circulant embedding not PSD (min eigenvalue " + io::format_double(min_eig) +
                               "); used exact Cholesky synthesis");
            return cholesky_sequence(autocov, n, rng);
        }
        throw NumericError("circulant embedding not PSD (min eigenvalue " + io::format_double(min_eig) +
                           ") and n > " + std::to_string(kCholeskyMax));
    }
    if (min_eig < 0.0)
        warnings.push_back("clipped negative embedding eigenvalues (min " + io::format_double(min_eig) + ") to zero");

    std::vector<std::complex<double>> w(size);
    const double inv_size = 1.0 / static_cast<double>(size);
    for (std::size_t k = 0; k < size; ++k) {
        const double lam = std::max(eig[k].real(), 0.0);
        const double re = rng.normal();
        const double im = rng.normal();
        w[k] = std::sqrt(lam * inv_size) * std::complex<double>(re, im);
    }
    auto v = fft::dft(w);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = v[k].real();
    return out;
}

inline std::vector<double> fgn_autocov(double hurst, std::size_t n) {
    std::vector<double> r(n + 1);
    const double e = 2.0 * hurst;
    for (std::size_t k = 0; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        r[k] = 0.5 * (std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + std::pow(std::abs(kk - 1.0), e));
    }
    return r;
}

inline SamplePath make_path(std::size_t n, double horizon, ProcessSpec spec, Seed seed) {
    SamplePath p;
    p.times = uniform_times(n, horizon);
    p.values.assign(n + 1, 0.0);
    p.spec = std::move(spec);
    p.seed = seed;
    return p;
}

inline void accumulate(SamplePath& p, const std::vector<double>& increments, double scale = 1.0) {
    double x = 0.0;
    for (std::size_t k = 0; k < increments.size(); ++k) {
        x += increments[k];
        p.values[k + 1] = scale * x;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Path generators
// ---------------------------------------------------------------------------

inline SamplePath bm_path(std::size_t n, double horizon, Seed seed) {
    detail::check_size(n, 2, "bm_path");
    detail::check_horizon(horizon);
    RandomStream rng(seed);
    auto p = detail::make_path(n, horizon, process::BM{}, seed);
    const double sd = std::sqrt(horizon / static_cast<double>(n));
    std::vector<double> inc(n);
    for (auto& d : inc) d = sd * rng.normal();
    detail::accumulate(p, inc);
    return p;
}

// Fractional Brownian motion with E B(t)B(s) = (|t|^2H + |s|^2H - |t-s|^2H) / 2.
inline SamplePath fbm_path(double hurst, std::size_t n, double horizon, Seed seed) {
    validate(process::FBM{hurst});
    detail::check_size(n, kMinFftPoints, "fbm_path");
    detail::check_horizon(horizon);
    RandomStream rng(seed);
    auto p = detail::make_path(n, horizon, process::FBM{hurst}, seed);
    auto fgn = detail::circulant_gaussian(detail::fgn_autocov(hurst, n), n, rng, p.warnings);
    detail::accumulate(p, fgn, std::pow(horizon / static_cast<double>(n), hurst));
    return p;
}

inline SamplePath stable_levy_path(const process::StableLevy& sp, std::size_t n, double horizon, Seed seed) {
    validate(sp);
    detail::check_size(n, 2, "stable_levy_path");
    detail::check_horizon(horizon);
    RandomStream rng(seed);
    auto p = detail::make_path(n, horizon, sp, seed);
    // X(dt) ~ S_alpha(sigma dt^{1/alpha}, beta, mu dt) for every alpha.
    const double dt = horizon / static_cast<double>(n);
    const double scale = sp.sigma * std::pow(dt, 1.0 / sp.alpha);
    std::vector<double> inc(n);
    for (auto& d : inc) d = stable_variate(sp.alpha, scale, sp.beta, sp.mu * dt, rng);
    detail::accumulate(p, inc);
    return p;
}

inline SamplePath stable_subordinator_path(const process::StableSubordinator& sp, std::size_t n, double horizon,
                                           Seed seed) {
    validate(sp);
    detail::check_size(n, 2, "stable_subordinator_path");
    detail::check_horizon(horizon);
    RandomStream rng(seed);
    auto p = detail::make_path(n, horizon, sp, seed);
    const double scale = sp.sigma * std::pow(horizon / static_cast<double>(n), 1.0 / sp.alpha);
    std::vector<double> inc(n);
    for (auto& d : inc) d = stable_variate(sp.alpha, scale, 1.0, 0.0, rng);
    detail::accumulate(p, inc);
    return p;
}

// IG Levy subordinator: X(t) ~ IG(t delta, lambda). With lambda = 0 the
// increments are Levy-distributed, i.e. S_{1/2}((delta dt)^2, 1, 0).
inline SamplePath ig_levy_path(const process::IGLevy& sp, std::size_t n, double horizon, Seed seed) {
    validate(sp);
    detail::check_size(n, 2, "ig_levy_path");
    detail::check_horizon(horizon);
    RandomStream rng(seed);
    auto p = detail::make_path(n, horizon, sp, seed);
    const double d = sp.delta * horizon / static_cast<double>(n);
    std::vector<double> inc(n);
    for (auto& x : inc) x = sp.lambda > 0.0 ? ig_variate(d, sp.lambda, rng) : stable_variate(0.5, d * d, 1.0, 0.0, rng);
    detail::accumulate(p, inc);
    return p;
}

// Linear fractional stable motion by Riemann-sum discretization of the
// moving-average kernel (t - u)_+^{H - 1/alpha} - (-u)_+^{H - 1/alpha}.
//
// Unit-lag increments are
//   Y(t) = sum_{j=1}^{mesh*cutoff} g(j) L(mesh (t+1) - j),
//   g(j) = (j/mesh)^d - (j/mesh - 1)_+^d,   d = H - 1/alpha,
// with L i.i.d. symmetric alpha-stable of scale mesh^{-1/alpha}. Writing
// j = mesh * a + r splits the sum into `mesh` ordinary convolutions, which
// are accumulated in the frequency domain. The same Riemann sum gives the
// normalizing constant, so X(1) has scale parameter 1; the path is then
// rescaled to the requested step by H-self-similarity.
inline SamplePath lfsm_path(const process::LFSM& sp, std::size_t n, double horizon, Seed seed) {
    validate(sp);
    detail::check_size(n, kMinFftPoints, "lfsm_path");
    detail::check_horizon(horizon);
    RandomStream rng(seed);
    auto p = detail::make_path(n, horizon, sp, seed);
    if (sp.mesh < 32 || sp.kernel_cutoff < 100)
        p.warnings.push_back("lfsm: mesh=" + std::to_string(sp.mesh) + ", kernel_cutoff=" +
                             std::to_string(sp.kernel_cutoff) + " below recommended accuracy (32, 100)");

    const std::size_t mesh = static_cast<std::size_t>(sp.mesh);
    const std::size_t cutoff = static_cast<std::size_t>(sp.kernel_cutoff);
    const double d = sp.hurst - 1.0 / sp.alpha;
    const double inv_mesh = 1.0 / static_cast<double>(mesh);

    auto kernel = [&](std::size_t j) {
        const double u = static_cast<double>(j) * inv_mesh;
        return std::pow(u, d) - (j > mesh ? std::pow(u - 1.0, d) : 0.0);
    };

    double norm_alpha = 0.0;
    for (std::size_t j = 1; j <= mesh * cutoff; ++j) norm_alpha += std::pow(std::abs(kernel(j)), sp.alpha);
    const double norm = std::pow(norm_alpha * inv_mesh, 1.0 / sp.alpha);

    const std::size_t noise_len = n + cutoff - 1;
    fft::RealTransform transform(fft::next_pow2(noise_len + cutoff - 1));
    std::vector<std::complex<double>> acc(transform.spectrum_size());
    std::vector<double> h(cutoff), u(noise_len);
    const double noise_scale = std::pow(inv_mesh, 1.0 / sp.alpha);

    for (std::size_t r = 1; r <= mesh; ++r) {
        for (std::size_t a = 0; a < cutoff; ++a) h[a] = kernel(mesh * a + r);
        for (auto& x : u) x = stable_variate(sp.alpha, noise_scale, 0.0, 0.0, rng);
        auto hf = transform.forward(h);
        auto uf = transform.forward(u);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += hf[k] * uf[k];
    }
    auto conv = transform.backward(acc);

    const double fft_scale = 1.0 / static_cast<double>(transform.size());
    std::vector<double> inc(n);
    for (std::size_t t = 0; t < n; ++t) inc[t] = conv[t + cutoff - 1] * fft_scale / norm;
    detail::accumulate(p, inc, std::pow(horizon / static_cast<double>(n), sp.hurst));
    return p;
}

inline SamplePath lfsm_path(double hurst, double alpha, int kernel_cutoff, int mesh, std::size_t n, double horizon,
                            Seed seed) {
    return lfsm_path(process::LFSM{hurst, alpha, kernel_cutoff, mesh}, n, horizon, seed);
}

// Inverse stable subordinator X(t) = inf{s : Y(s) > t}, Y(1) ~ S_alpha(1, 1, 0).
//
// Y is simulated on the operational-time grid s_j = j * ds with
// ds = E X(horizon) / (n * refine), so on average n * refine grid steps
// cover the output range. X(t_k) is the first s_j with Y(s_j) strictly above
// t_k; X(0) = 0.
inline SamplePath inverse_subordinator_path(double alpha, int refine, std::size_t n, double horizon, Seed seed) {
    const process::InverseStableSubordinator sp{alpha, refine};
    validate(sp);
    detail::check_size(n, 2, "inverse_subordinator_path");
    detail::check_horizon(horizon);
    RandomStream rng(seed);
    auto p = detail::make_path(n, horizon, sp, seed);

    // Laplace exponent of Y(1) ~ S_alpha(1, 1, 0): c u^alpha, c = 1 / cos(pi alpha / 2).
    const double c = 1.0 / std::cos(std::numbers::pi * alpha / 2.0);
    const double mean_x = std::pow(horizon, alpha) / (c * std::tgamma(1.0 + alpha));
    const double ds = mean_x / (static_cast<double>(n) * refine);
    const double y_scale = std::pow(ds, 1.0 / alpha);

    double y = 0.0;
    std::size_t j = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double t = p.times[k];
        while (y <= t) {
            y += stable_variate(alpha, y_scale, 1.0, 0.0, rng);
            ++j;
        }
        p.values[k] = static_cast<double>(j) * ds;
    }
    return p;
}

namespace detail {

// Log-normal cascade cell masses theta_k = dt exp(2 w_k - 2 Var w), with w a
// stationary Gaussian field of covariance
//   lambda2 * ln+(L / ((|k - l| + 1) dt)).
inline std::vector<double> cascade_masses(double lambda2, double corr_length, std::size_t n, double horizon,
                                          RandomStream& rng, std::vector<std::string>& warnings) {
    const double dt = horizon / static_cast<double>(n);
    std::vector<double> cov(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        cov[k] = lambda2 * std::max(0.0, std::log(corr_length / ((static_cast<double>(k) + 1.0) * dt)));
    auto w = circulant_gaussian(cov, n, rng, warnings);
    std::vector<double> theta(n);
    for (std::size_t k = 0; k < n; ++k) theta[k] = dt * std::exp(2.0 * w[k] - 2.0 * cov[0]);
    return theta;
}

}  // namespace detail

// Non-decreasing cascade measure process theta(t), E theta(t) = t. The
// integral scale of the field is `corr_length`.
inline SamplePath cascade_path(double lambda2, std::size_t n, double horizon, Seed seed, double corr_length) {
    const process::LognormalCascade sp{lambda2, corr_length};
    validate(sp);
    detail::check_size(n, kMinFftPoints, "cascade_path");
    detail::check_horizon(horizon);
    RandomStream rng(seed);
    auto p = detail::make_path(n, horizon, sp, seed);
    detail::accumulate(p, detail::cascade_masses(lambda2, corr_length, n, horizon, rng, p.warnings));
    return p;
}

inline SamplePath cascade_path(double lambda2, std::size_t n, double horizon, Seed seed) {
    return cascade_path(lambda2, n, horizon, seed, horizon);
}

// Multifractal random walk B(theta(t)) with B an independent Brownian motion
// drawn from a separate stream of the same seed.
inline SamplePath mrw_path(double lambda2, std::size_t n, double horizon, Seed seed, double corr_length) {
    const process::MRW sp{lambda2, corr_length};
    validate(sp);
    detail::check_size(n, kMinFftPoints, "mrw_path");
    detail::check_horizon(horizon);
    RandomStream field_rng(seed, StreamId::primary);
    RandomStream bm_rng(seed, StreamId::secondary);
    auto p = detail::make_path(n, horizon, sp, seed);
    auto theta = detail::cascade_masses(lambda2, corr_length, n, horizon, field_rng, p.warnings);
    std::vector<double> inc(n);
    for (std::size_t k = 0; k < n; ++k) inc[k] = std::sqrt(theta[k]) * bm_rng.normal();
    detail::accumulate(p, inc);
    return p;
}

inline SamplePath mrw_path(double lambda2, std::size_t n, double horizon, Seed seed) {
    return mrw_path(lambda2, n, horizon, seed, horizon);
}

inline SamplePath generate(const ProcessSpec& spec, std::size_t n, double horizon, Seed seed) {
    validate(spec);
    detail::check_horizon(horizon);
    if (n < 2) throw SizeError("generate needs n >= 2, got " + std::to_string(n));
    return std::visit(
        [&](const auto& p) -> SamplePath {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, process::BM>) return bm_path(n, horizon, seed);
            else if constexpr (std::is_same_v<T, process::FBM>) return fbm_path(p.hurst, n, horizon, seed);
            else if constexpr (std::is_same_v<T, process::StableLevy>) return stable_levy_path(p, n, horizon, seed);
            else if constexpr (std::is_same_v<T, process::LFSM>) return lfsm_path(p, n, horizon, seed);
            else if constexpr (std::is_same_v<T, process::IGLevy>) return ig_levy_path(p, n, horizon, seed);
            else if constexpr (std::is_same_v<T, process::StableSubordinator>)
                return stable_subordinator_path(p, n, horizon, seed);
            else if constexpr (std::is_same_v<T, process::InverseStableSubordinator>)
                return inverse_subordinator_path(p.alpha, p.refine, n, horizon, seed);
            else if constexpr (std::is_same_v<T, process::LognormalCascade>)
                return cascade_path(p.lambda2, n, horizon, seed, p.horizon);
            else return mrw_path(p.lambda2, n, horizon, seed, p.horizon);
        },
        spec);
}

}  // namespace mfbounds
