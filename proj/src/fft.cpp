#include "schrodlab/fft.hpp"

#include "schrodlab/error.hpp"

#include <fftw3.h>

#include <mutex>

namespace schrodlab {

namespace {

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}

} // namespace

FFT::FFT(int dims, int N) : dims_(dims), N_(N), size_(1) {
    if (dims < 1 || N < 2) throw DimensionError("FFT: bad shape");
    std::vector<int> shape(static_cast<size_t>(dims), N);
    for (int i = 0; i < dims; ++i) size_ *= static_cast<std::size_t>(N);
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* buf = fftw_alloc_complex(size_);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft(dims, shape.data(), buf, buf, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft(dims, shape.data(), buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
    if (!fwd_ || !bwd_) throw Error("FFT: planning failed");
}

FFT::~FFT() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void FFT::forward(std::vector<std::complex<double>>& a) const {
    if (a.size() != size_) throw DimensionError("FFT: array size");
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void FFT::backward(std::vector<std::complex<double>>& a) const {
    if (a.size() != size_) throw DimensionError("FFT: array size");
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

} // namespace schrodlab
