#pragma once

#include <complex>
#include <vector>

namespace schrodlab {

// In-place n-dimensional complex FFT on an N^n array (row-major, last axis
// fastest). Unnormalized in both directions; backward uses exp(+i...).
class FFT {
public:
    FFT(int dims, int N);
    ~FFT();
    FFT(const FFT&) = delete;
    FFT& operator=(const FFT&) = delete;

    void forward(std::vector<std::complex<double>>& a) const;
    void backward(std::vector<std::complex<double>>& a) const;
    std::size_t size() const { return size_; }

private:
    int dims_;
    int N_;
    std::size_t size_;
    void* fwd_;
    void* bwd_;
};

} // namespace schrodlab
