#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "latsch/errors.hpp"

namespace latsch {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// In-place complex d-dimensional transform over an N^d grid, N per axis.
/// Plans use FFTW_ESTIMATE so planning never depends on runtime measurement
/// and results are reproducible run to run.
class FftPlan {
  public:
    FftPlan(int rank, int n_per_axis)
        : rank_(rank), n_(n_per_axis), size_(1) {
        for (int i = 0; i < rank_; ++i) size_ *= static_cast<size_t>(n_);
        buf_ = fftw_alloc_complex(size_);
        if (!buf_) throw Error("fftw_alloc_complex failed");
        std::vector<int> dims(static_cast<size_t>(rank_), n_);
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fwd_ = fftw_plan_dft(rank_, dims.data(), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(rank_, dims.data(), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw Error("fftw plan creation failed");
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    size_t size() const { return size_; }
    int n() const { return n_; }
    int rank() const { return rank_; }

    std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
    const std::complex<double>* data() const {
        return reinterpret_cast<const std::complex<double>*>(buf_);
    }

    void forward() { fftw_execute(fwd_); }    // sum e^{-2 pi i k n / N}
    void backward() { fftw_execute(bwd_); }   // sum e^{+2 pi i k n / N}, unnormalized

  private:
    int rank_, n_;
    size_t size_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

}  // namespace latsch
