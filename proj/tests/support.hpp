#pragma once

// Independent oracles and statistics shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

namespace testing {

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2),
// with the small-sample correction lambda = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D.
inline double kolmogorov_pvalue(double d, double ne) {
    const double root = std::sqrt(ne);
    const double lambda = (root + 0.12 + 0.11 / root) * d;
    if (lambda < 0.3) return 1.0;  // Q(0.3) > 0.99999
    double sum = 0.0, sign = 1.0, previous = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) <= 1e-12 * std::abs(sum) || std::abs(term) <= 1e-16 * previous) break;
        previous = std::abs(term);
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, kolmogorov_pvalue(d, n)};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, kolmogorov_pvalue(d, na * nb / (na + nb))};
}

inline double normal_cdf(double x, double sd = 1.0) { return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0))); }

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline std::vector<double> diffs(const std::vector<double>& x, std::size_t lag = 1) {
    std::vector<double> d;
    for (std::size_t i = lag; i < x.size(); i += lag) d.push_back(x[i] - x[i - lag]);
    return d;
}

// Plain nested-loop partition sums, written independently of the library.
inline double naive_partition(const std::vector<double>& x, double q, std::size_t lag) {
    const std::size_t count = (x.size() - 1) / lag;
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) total += std::pow(std::fabs(x[(k + 1) * lag] - x[k * lag]), q);
    return total / static_cast<double>(count);
}

inline double naive_modified_partition(const std::vector<double>& x, double q, std::size_t lag, std::size_t m) {
    const std::size_t count = (x.size() - 1) / (m * lag);
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        double top = 0.0;
        for (std::size_t l = 0; l < m; ++l) {
            const std::size_t a = (k * m + l) * lag;
            const double v = std::fabs(x[a + lag] - x[a]);
            if (v > top) top = v;
        }
        total += std::pow(top, q);
    }
    return total / static_cast<double>(count);
}

// Textbook centered least squares.
struct Line {
    double slope = 0.0;
    double intercept = 0.0;
};

inline Line centered_ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

inline std::filesystem::path fresh_dir(const std::string& name) {
#ifdef MFBOUNDS_SCRATCH_DIR
    std::filesystem::path base = MFBOUNDS_SCRATCH_DIR;
#else
    std::filesystem::path base = std::filesystem::temp_directory_path() / "mfbounds-tests";
#endif
    auto dir = base / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Compares `content` with tests/golden/<name>. With MFBOUNDS_UPDATE_GOLDEN
// set, the golden file is rewritten instead and the comparison passes.
inline bool matches_golden(const std::string& name, const std::string& content) {
#ifdef MFBOUNDS_GOLDEN_DIR
    const std::filesystem::path file = std::filesystem::path(MFBOUNDS_GOLDEN_DIR) / name;
#else
    const std::filesystem::path file = std::filesystem::path("tests/golden") / name;
#endif
    if (std::getenv("MFBOUNDS_UPDATE_GOLDEN")) {
        std::ofstream(file, std::ios::binary) << content;
        return true;
    }
    std::ifstream in(file, std::ios::binary);
    if (!in) return false;
    const std::string golden{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return golden == content;
}

}  // namespace testing
