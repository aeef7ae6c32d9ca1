#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <vector>

#include <fftw3.h>

namespace mfbounds::fft {

namespace detail {

// FFTW's planner is not re-entrant.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

// fftw_malloc keeps SIMD alignment identical from run to run, which keeps the
// ESTIMATE planner choosing the same codelets and the output bit-stable.
template <class T>
std::unique_ptr<T[], FftwFree> aligned(std::size_t n) {
    void* p = fftw_malloc(sizeof(T) * (n == 0 ? 1 : n));
    if (!p) throw std::bad_alloc();
    return std::unique_ptr<T[], FftwFree>(static_cast<T*>(p));
}

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p) {}
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

}  // namespace detail

// Unnormalized complex DFT; `inverse` uses the +i sign convention.
inline std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in, bool inverse = false) {
    const std::size_t n = in.size();
    auto buf = detail::aligned<fftw_complex>(n);
    fftw_plan raw;
    {
        std::lock_guard lock(detail::planner_mutex());
        raw = fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(),
                               inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    detail::Plan plan(raw);
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = in[i].real();
        buf[i][1] = in[i].imag();
    }
    plan.execute();
    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {buf[i][0], buf[i][1]};
    return out;
}

// Reusable real <-> half-complex transform pair of fixed length, used for
// repeated FFT convolutions of the same size.
class RealTransform {
public:
    explicit RealTransform(std::size_t n)
        : n_(n), real_(detail::aligned<double>(n)), spec_(detail::aligned<fftw_complex>(n / 2 + 1)) {
        std::lock_guard lock(detail::planner_mutex());
        forward_ = std::make_unique<detail::Plan>(
            fftw_plan_dft_r2c_1d(static_cast<int>(n), real_.get(), spec_.get(), FFTW_ESTIMATE));
        backward_ = std::make_unique<detail::Plan>(
            fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_.get(), real_.get(), FFTW_ESTIMATE));
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

    // Zero-pads `in` to the transform length.
    std::vector<std::complex<double>> forward(std::span<const double> in) {
        for (std::size_t i = 0; i < n_; ++i) real_[i] = i < in.size() ? in[i] : 0.0;
        forward_->execute();
        std::vector<std::complex<double>> out(spectrum_size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = {spec_[i][0], spec_[i][1]};
        return out;
    }

    // Unnormalized inverse: the result is n times the original signal.
    std::vector<double> backward(std::span<const std::complex<double>> in) {
        for (std::size_t i = 0; i < spectrum_size(); ++i) {
            spec_[i][0] = in[i].real();
            spec_[i][1] = in[i].imag();
        }
        backward_->execute();
        return std::vector<double>(real_.get(), real_.get() + n_);
    }

private:
    std::size_t n_;
    std::unique_ptr<double[], detail::FftwFree> real_;
    std::unique_ptr<fftw_complex[], detail::FftwFree> spec_;
    std::unique_ptr<detail::Plan> forward_;
    std::unique_ptr<detail::Plan> backward_;
};

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace mfbounds::fft
