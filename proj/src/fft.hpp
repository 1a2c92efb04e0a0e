#pragma once

// Thin RAII wrapper over FFTW used by the split-operator propagator and spectral moments.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstring>
#include <vector>

namespace wpdyn::detail {

class FftPlan {
  public:
    explicit FftPlan(std::size_t n) : n_(n) {
        buffer_ = fftw_alloc_complex(n_);
        const int ni = static_cast<int>(n_);
        // FFTW_ESTIMATE keeps planning deterministic and leaves the buffer untouched
        forward_ = fftw_plan_dft_1d(ni, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(ni, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(buffer_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const noexcept { return n_; }

    /// Unnormalized forward transform, sum_j v_j exp(-2 pi i jk/n).
    void forward(std::vector<std::complex<double>>& v) { run(forward_, v); }
    /// Unnormalized backward transform; divide by n for the inverse.
    void backward(std::vector<std::complex<double>>& v) { run(backward_, v); }

  private:
    void run(fftw_plan plan, std::vector<std::complex<double>>& v) {
        std::memcpy(buffer_, v.data(), n_ * sizeof(fftw_complex));
        fftw_execute(plan);
        std::memcpy(static_cast<void*>(v.data()), buffer_, n_ * sizeof(fftw_complex));
    }

    std::size_t n_;
    fftw_complex* buffer_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace wpdyn::detail
