#include "msr/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace msr {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

FftPlan::FftPlan(std::vector<int> dims) : dims_(std::move(dims)) {
    n_ = 1;
    for (int d : dims_) n_ *= std::size_t(d);
    std::lock_guard<std::mutex> lock(planner_mutex());
    buf_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n_));
    auto* b = reinterpret_cast<fftw_complex*>(buf_);
    int rank = int(dims_.size());
    fwd_ = fftw_plan_dft(rank, dims_.data(), b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(rank, dims_.data(), b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw StageError("FFTW planning failed");
}

FftPlan::~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(buf_);
}

void FftPlan::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void FftPlan::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

void dst1_3d(std::vector<double>& a, int nx, int ny, int nz) {
    fftw_plan p;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        p = fftw_plan_r2r_3d(nz, ny, nx, a.data(), a.data(), FFTW_RODFT00, FFTW_RODFT00,
                             FFTW_RODFT00, FFTW_ESTIMATE);
    }
    if (!p) throw StageError("FFTW sine-transform planning failed");
    fftw_execute(p);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p);
}

} // namespace msr
