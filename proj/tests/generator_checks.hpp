#pragma once

// Monte-Carlo distribution checks for the path generators. Each returns the
// median two-sample KS p-value over `batches` independent seed batches.

#include <cmath>
#include <cstdint>
#include <vector>

#include "mfbounds/sim.hpp"
#include "support.hpp"

namespace testing {

inline constexpr int kBatches = 10;

template <class F>
double median_p(F&& one_batch, int batches = kBatches) {
    std::vector<double> ps;
    for (int b = 1; b <= batches; ++b) ps.push_back(one_batch(static_cast<std::uint64_t>(b)));
    return median_of(ps);
}

// stable_variate(alpha = 2) against sqrt(2) * N(0, 1).
inline double stable2_vs_gaussian() {
    return median_p([](std::uint64_t b) {
        mfbounds::RandomStream rng(mfbounds::Seed{b});
        std::vector<double> a(5000);
        for (auto& x : a) x = mfbounds::stable_variate(2.0, 1.0, 0.0, 0.0, rng);
        auto g = mfbounds::gaussian_variates(5000, mfbounds::Seed{b + 1000});
        for (auto& x : g) x *= std::sqrt(2.0);
        return ks_two_sample(a, g).p_value;
    });
}

// Unit-step increments of FBM(1/2) against those of BM.
inline double fbm_half_vs_bm() {
    return median_p([](std::uint64_t b) {
        auto f = mfbounds::fbm_path(0.5, 4096, 4096.0, mfbounds::Seed{b});
        auto w = mfbounds::bm_path(4096, 4096.0, mfbounds::Seed{b + 1000});
        return ks_two_sample(diffs(f.values), diffs(w.values)).p_value;
    });
}

// LFSM(H, alpha = 2) / sqrt(2) against FBM(H), on unit increments and on
// increments over 16 steps.
inline double lfsm2_vs_fbm(double hurst = 0.7) {
    return median_p([hurst](std::uint64_t b) {
        auto l = mfbounds::lfsm_path(hurst, 2.0, 600, 256, 4096, 4096.0, mfbounds::Seed{b});
        for (auto& x : l.values) x /= std::sqrt(2.0);
        auto f = mfbounds::fbm_path(hurst, 4096, 4096.0, mfbounds::Seed{b + 1000});
        const double p1 = ks_two_sample(diffs(l.values), diffs(f.values)).p_value;
        const double p16 = ks_two_sample(diffs(l.values, 16), diffs(f.values, 16)).p_value;
        return std::min(p1, p16);
    });
}

// X(2t) / 2^alpha against X(t) for the inverse stable subordinator, 200 seeds
// per side and batch.
inline double inverse_subordinator_self_similarity(double alpha = 0.6, int refine = 4) {
    return median_p([=](std::uint64_t b) {
        std::vector<double> at_2t, at_t;
        const std::uint64_t base = 1000 * b;
        for (std::uint64_t s = 0; s < 200; ++s) {
            auto p = mfbounds::inverse_subordinator_path(alpha, refine, 64, 2.0, mfbounds::Seed{base + s});
            at_2t.push_back(p.values[64] / std::pow(2.0, alpha));
            auto r = mfbounds::inverse_subordinator_path(alpha, refine, 64, 2.0, mfbounds::Seed{base + 500 + s});
            at_t.push_back(r.values[32]);
        }
        return ks_two_sample(at_2t, at_t).p_value;
    });
}

// LFSM X(2t) / 2^H against X(t), 200 seeds per side and batch.
inline double lfsm_self_similarity(double hurst, double alpha) {
    return median_p([=](std::uint64_t b) {
        std::vector<double> at_2t, at_t;
        const std::uint64_t base = 1000 * b;
        for (std::uint64_t s = 0; s < 200; ++s) {
            auto p = mfbounds::lfsm_path(hurst, alpha, 200, 32, 16, 16.0, mfbounds::Seed{base + s});
            at_2t.push_back(p.values[16] / std::pow(2.0, hurst));
            auto r = mfbounds::lfsm_path(hurst, alpha, 200, 32, 16, 16.0, mfbounds::Seed{base + 500 + s});
            at_t.push_back(r.values[8]);
        }
        return ks_two_sample(at_2t, at_t).p_value;
    }, 5);
}

// Increments at one time in the first half against increments at one time
// in the second half, each side drawn from its own 300 seeds. Sampling across
// seeds keeps the two samples independent even for long-memory families,
// where the halves of a single path are strongly dependent.
inline double stationary_halves(const mfbounds::ProcessSpec& spec, std::size_t n = 128) {
    return median_p([&](std::uint64_t b) {
        std::vector<double> early, late;
        for (std::uint64_t s = 0; s < 300; ++s) {
            auto p = mfbounds::generate(spec, n, static_cast<double>(n), mfbounds::Seed{10000 * b + s});
            early.push_back(p.values[n / 4 + 1] - p.values[n / 4]);
            auto r = mfbounds::generate(spec, n, static_cast<double>(n), mfbounds::Seed{10000 * b + 5000 + s});
            late.push_back(r.values[3 * n / 4 + 1] - r.values[3 * n / 4]);
        }
        return ks_two_sample(early, late).p_value;
    });
}

}  // namespace testing
