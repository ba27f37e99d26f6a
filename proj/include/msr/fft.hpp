#pragma once

#include "msr/grid.hpp"

#include <vector>

namespace msr {

// Owns an FFTW buffer plus forward/backward plans for a fixed shape.
// dims are slowest-varying first. Unnormalised in both directions.
class FftPlan {
public:
    explicit FftPlan(std::vector<int> dims);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    cplx* data() { return buf_; }
    std::size_t size() const { return n_; }
    const std::vector<int>& dims() const { return dims_; }
    void forward();  // sign -1
    void backward(); // sign +1

private:
    std::vector<int> dims_;
    std::size_t n_ = 0;
    cplx* buf_ = nullptr;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

// In-place type-I sine transform on an nx*ny*nz real block (x fastest), unnormalised.
void dst1_3d(std::vector<double>& a, int nx, int ny, int nz);

// signed frequency index of FFT bin k out of n
inline int fft_freq(int k, int n) { return k <= (n - 1) / 2 ? k : k - n; }

} // namespace msr
