#pragma once

#include "msr/fft.hpp"
#include "msr/fields.hpp"
#include "msr/frame.hpp"

#include <memory>

namespace msr {

// Periodic extension box: M nodes per axis at x = lo + i h and Mt time levels at t = m dt.
// Functions on it are twisted: shifting by one period multiplies by e^{2 pi i twist}
// (space) or e^{2 pi i twist_t} (time), which keeps the exact zero of the free symbol at
// the origin off the frequency lattice. Mt = 1 is the static (time-independent) box.
struct BoxLattice {
    double h = 1.0 / 16, dt = 1.0 / 64;
    int M = 32, Mt = 1;
    double lo = -0.5;
    double twist = 0.5, twist_t = 0.5;
    int Nx = 16, Nt = 64; // the embedded Omega grid

    bool is_static() const { return Mt == 1; }
    std::size_t space_size() const { return std::size_t(M) * M * M; }
    std::size_t size() const { return space_size() * std::size_t(Mt); }
    std::size_t idx(int i, int j, int k, int m = 0) const {
        return std::size_t(i) + std::size_t(M) * (std::size_t(j) + std::size_t(M) * (std::size_t(k) + std::size_t(M) * m));
    }
    int offset() const { return int(std::lround(-lo / h)); } // box index of x = 0
    Vec3 x(int i, int j, int k) const { return {lo + i * h, lo + j * h, lo + k * h}; }
    double kx(int a) const; // twisted wave number of bin a
    double kt(int b) const;
};

// 2x box around Omega; dynamic boxes also double the time period.
BoxLattice make_box(const Grid& g, bool dynamic);

enum class SymbolKind { Continuum, CrankNicolson };

struct MultiplierOptions {
    double eps = 1e-3;
    SymbolKind kind = SymbolKind::CrankNicolson;
};

// E f = F^{-1}[ F f / p ] with
//   Continuum:     p = -tau - |k|^2 + 2 rho.k
//   CrankNicolson: p = i(G e^{i tau dt} - 1)/dt - (G e^{i tau dt} + 1) lam_h(k - rho)/2,
// the symbol of the carrier-conjugated Crank-Nicolson operator. Where |p| < eps sigma the
// divisor becomes p + i eps sigma sgn(Im p).
class MultiplierE {
public:
    MultiplierE(const BoxLattice& box, const DiscreteCarrier& c, double sigma, const MultiplierOptions& opt = {});
    void apply(std::vector<cplx>& f) const; // in place
    cplx symbol(int a, int b, int c, int mt) const;
    std::size_t regularized() const { return n_reg_; }
    double min_abs_symbol() const { return min_abs_; }
    const BoxLattice& box() const { return box_; }

private:
    BoxLattice box_;
    DiscreteCarrier car_;
    double sigma_;
    MultiplierOptions opt_;
    std::vector<cplx> inv_;
    std::vector<cplx> twx_, twt_;
    std::unique_ptr<FftPlan> plan_;
    std::size_t n_reg_ = 0;
    double min_abs_ = 0.0;
};

// Coefficients of the carrier-conjugated scheme on the box. Row m of K v is
//   i(G v^{m+1} - v^m)/dt + H_rho^{m+1/2}(G v^{m+1} + v^m)/2,
// with H_rho the Hermitian magnetic Laplacian plus q conjugated by e^{-i x.rho}. K0 is the
// A = q = 0 part, K1 = K - K0 (supported where the coefficients are).
class ConjugatedScheme {
public:
    // q may be null; q on a static box must be time-independent (level 0 is used)
    ConjugatedScheme(const BoxLattice& box, const DiscreteCarrier& c, const VectorField& A,
                     const ScalarSpaceTimeField* q);
    // out = K1 v (overwrites)
    void apply_k1(const std::vector<cplx>& v, std::vector<cplx>& out) const;
    // out = K0 v, for v vanishing near the box faces (no wrap-around terms)
    void apply_k0_compact(const std::vector<cplx>& v, std::vector<cplx>& out) const;
    const BoxLattice& box() const { return box_; }
    bool has_coefficients() const { return !rows_.empty(); }

private:
    BoxLattice box_;
    DiscreteCarrier car_;
    std::vector<std::size_t> rows_;        // box spatial index of nodes with coefficients
    std::vector<std::array<cplx, 7>> cf_;  // centre, +x, -x, +y, -y, +z, -z (magnetic part)
    std::vector<double> qh_;               // q^{m+1/2} per (row, time row); static: one per row
    int qlevels_ = 0;
    // node-local apply of (H_rho - H_rho^0) at row r (spatial), time row m
    cplx h1_at(const std::vector<cplx>& v, std::size_t r, int tm, int m) const;
};

struct PicardReport {
    int iterations = 0;
    double last_update = 0.0;
    double contraction = 0.0; // ratio of the last two updates
    bool converged = false;
};

struct PicardOptions {
    int max_iter = 60;
    double tol = 1e-8;
};

// w <- E(S - K1 w) until the relative update drops below tol. Throws StageError when the
// updates grow (non-contraction), reporting the measured factor.
std::vector<cplx> picard_iterate_G(const MultiplierE& E, const ConjugatedScheme& K, const std::vector<cplx>& S,
                                   const PicardOptions& opt, PicardReport* report);

// Restriction of a box field to Omega x [0, T] (levels 0..Nt; static boxes repeat).
ComplexSpaceTimeField restrict_to_q(const BoxLattice& box, const Grid& g, const std::vector<cplx>& v);

// sqrt( int_0^T |v(t)|_{H^k}^2 dt ) on Q with trapezoid weights, k = 0, 1, 2
double l2_hk(const ComplexSpaceTimeField& v, int k);
// the same norm applied to the j-th forward time difference (j = 1, 2)
double l2_hk_dt(const ComplexSpaceTimeField& v, int k, int j);

} // namespace msr
