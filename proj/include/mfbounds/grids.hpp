#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mfbounds/error.hpp"
#include "mfbounds/sample_path.hpp"

namespace mfbounds {

// Moments closer to zero than this are excluded: S_q is ~1 there and adds a
// row with no information to the regression.
inline constexpr double kMomentEpsilon = 0.01;

class MomentGrid {
public:
    MomentGrid() = default;

    explicit MomentGrid(std::vector<double> qs) : qs_(std::move(qs)) {
        if (qs_.empty()) throw ValidationError("qs", "moment grid is empty");
        for (std::size_t i = 0; i < qs_.size(); ++i) {
            if (!std::isfinite(qs_[i])) throw ValidationError("qs", "moments must be finite");
            if (std::abs(qs_[i]) < kMomentEpsilon)
                throw ValidationError("qs", "moment " + io::format_double(qs_[i]) + " lies within q_eps of 0");
            if (i > 0 && !(qs_[i] > qs_[i - 1])) throw ValidationError("qs", "moments must be strictly ascending");
        }
    }

    // qmin, qmin + step, ... up to qmax (inclusive within step/1e6), dropping
    // any node within q_eps of zero.
    static MomentGrid range(double qmin, double qmax, double step) {
        if (!(step > 0.0)) throw ValidationError("q_step", "must be positive");
        if (!(qmax > qmin)) throw ValidationError("q_max", "must exceed q_min");
        std::vector<double> qs;
        const auto count = static_cast<std::size_t>(std::floor((qmax - qmin) / step + 1e-6));
        for (std::size_t i = 0; i <= count; ++i) {
            double q = qmin + static_cast<double>(i) * step;
            if (std::abs(q) < 1e-12) q = 0.0;
            if (std::abs(q) >= kMomentEpsilon) qs.push_back(q);
        }
        return MomentGrid(std::move(qs));
    }

    const std::vector<double>& values() const noexcept { return qs_; }
    std::size_t size() const noexcept { return qs_.size(); }
    double operator[](std::size_t i) const { return qs_[i]; }
    bool has_negative() const noexcept { return !qs_.empty() && qs_.front() < 0.0; }

private:
    std::vector<double> qs_;
};

// Time scales expressed both in path time units and as integer lags of the
// sampling step.
class ScaleGrid {
public:
    ScaleGrid() = default;

    ScaleGrid(std::vector<std::size_t> lags, double step) : lags_(std::move(lags)), step_(step) {
        if (!(step_ > 0.0)) throw ValidationError("step", "sampling step must be positive");
        if (lags_.empty()) throw ValidationError("deltas", "scale grid is empty");
        for (std::size_t i = 0; i < lags_.size(); ++i) {
            if (lags_[i] == 0) throw ValidationError("deltas", "scales must be positive");
            if (i > 0 && !(lags_[i] > lags_[i - 1])) throw ValidationError("deltas", "scales must be strictly ascending");
        }
    }

    // Converts explicit time scales to lags; each must be an integer
    // multiple of the path step.
    static ScaleGrid from_deltas(const std::vector<double>& deltas, double step) {
        std::vector<std::size_t> lags;
        for (double dt : deltas) {
            const double ratio = dt / step;
            const double r = std::round(ratio);
            if (!(r >= 1.0) || std::abs(ratio - r) > 1e-9 * std::max(1.0, r))
                throw GridError("scale " + io::format_double(dt) + " is not a positive integer multiple of the step " +
                                io::format_double(step));
            lags.push_back(static_cast<std::size_t>(r));
        }
        return ScaleGrid(std::move(lags), step);
    }

    // Geometric grid n^{i/N}, i = 1..N, in units of the sampling step (the
    // T^{i/N} grid when time points are 1..T), rounded to the nearest
    // integer lag and de-duplicated. Lags above `max_lag` are dropped.
    static ScaleGrid geometric(std::size_t n, std::size_t count, double step, std::size_t max_lag = 0) {
        if (count == 0) throw ValidationError("scales", "must be positive");
        if (max_lag == 0) max_lag = n;
        std::vector<std::size_t> lags;
        for (std::size_t i = 1; i <= count; ++i) {
            const double x = std::pow(static_cast<double>(n), static_cast<double>(i) / static_cast<double>(count));
            const auto lag = static_cast<std::size_t>(std::max(1.0, std::round(x)));
            if (lag <= max_lag && (lags.empty() || lag > lags.back())) lags.push_back(lag);
        }
        if (lags.empty()) throw ValidationError("scales", "no scale fits below the maximum lag");
        return ScaleGrid(std::move(lags), step);
    }

    static ScaleGrid geometric(const SamplePath& path, std::size_t count, std::size_t max_lag = 0) {
        return geometric(path.increments(), count, path.step(), max_lag);
    }

    const std::vector<std::size_t>& lags() const noexcept { return lags_; }
    std::size_t size() const noexcept { return lags_.size(); }
    double step() const noexcept { return step_; }
    double delta(std::size_t i) const { return static_cast<double>(lags_[i]) * step_; }

    std::vector<double> deltas() const {
        std::vector<double> d(lags_.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = delta(i);
        return d;
    }

private:
    std::vector<std::size_t> lags_;
    double step_ = 1.0;
};

}  // namespace mfbounds
