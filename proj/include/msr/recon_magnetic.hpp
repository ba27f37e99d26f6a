#pragma once

#include "msr/sampling.hpp"

#include <array>
#include <string>
#include <vector>

namespace msr {

// (0,1), (0,2), (1,2) components, as in CurlField
using CurlHat = std::array<cplx, 3>;

struct CurlSampleDiag {
    double leading_abs[2] = {0.0, 0.0}; // |F / T_eff| for the +/- probes (I analogue)
    double gauge_abs = 0.0;             // |xi_h . a_hat| before the gauge row (J analogue)
    double carrier_norm = 0.0;
    double probe_norm = 0.0;
    double dtn_opnorm = 0.0;
    double go_residual = 0.0;
    double w_norm = 0.0;
};

struct CurlSample {
    Vec3 xi{0, 0, 0};
    std::array<int, 3> k{0, 0, 0}; // lattice index, xi = 2 pi k
    double sigma = 0.0;
    CVec3 a_hat{};         // recovered (A_1 - A_2)^ in the gauge xi_h . a_hat = 0
    CurlHat value{};       // sigma_hat_{jk}
    std::vector<CurlHat> noisy; // per NoisePlan eta
    CurlSampleDiag diag;
};

struct FourierSampleSet {
    std::string target = "curl";
    double R = 0.0;
    double sigma = 0.0;
    std::vector<double> etas;
    std::vector<CurlSample> samples;
};

struct CurlSampleOptions {
    ProbeOptions probe;
};

// The two probes at xi: w_I = (xi_j e_k - xi_k e_j)/|.|, w_R = +/- xi^ x w_I. Each gives
// F / T_eff = kappa . a_hat with T_eff = T (1 + G_2)(1 + conj G_1)/4 and
//   kappa_j = 2 cos(xi_j h/2) sin(c_j h)/h,  c = (rho_2 + conj rho_1)/2,
// the exact discrete form of 2 sigma conj(w).a_hat. The third row xi_h . a_hat = 0,
// xi_h = sin(xi h)/h, fixes the gauge; sigma_hat_{jk} = i(xi_h,j a_k - xi_h,k a_j).
CurlSample curl_fourier_sample_all(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                                   const Vec3& xi, double sigma, int j, int k, const CurlSampleOptions& opt = {},
                                   const NoisePlan& noise = {});
// Single component sigma_hat_{jk}(xi).
cplx curl_fourier_sample(const DtnDifferenceOracle& oracle, const CoefficientPair& model, const Vec3& xi,
                         double sigma, int j, int k, const CurlSampleOptions& opt = {});

// (j,k) with the largest |xi_j e_k - xi_k e_j|
std::array<int, 2> best_pair(const Vec3& xi);

// R = sigma^{2/(n+4)}
double choose_cutoff(double sigma, int n);

// Lattice 2 pi Z^3 within |xi| <= R, one representative per +/- pair, xi = 0 excluded.
std::vector<std::array<int, 3>> half_lattice(double R);

struct LatticeSampleOptions {
    CurlSampleOptions sample;
    int jobs = 1;
};

FourierSampleSet sample_curl_lattice(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                                     double sigma, double R, const LatticeSampleOptions& opt = {},
                                     const NoisePlan& noise = {});

// copy of the set whose values are the eta-th noisy values
FourierSampleSet select_noise(const FourierSampleSet& s, std::size_t e);

// sigma(x) = sum_{|xi| <= R} sigma_hat(xi) e^{i (x - x_c).xi}, the half lattice filled by
// conjugation. Samples must sit on 2 pi Z^3.
CurlField invert_lowpass(const FourierSampleSet& s, double R, const Grid& g);

// h^3 sum_x e^{-i (x - x_c).xi} sigma_{jk}(x) over the nodes (the unit-cell DFT)
CurlHat curl_oracle(const CurlField& c, const Vec3& xi);
CVec3 potential_oracle(const VectorField& A, const Vec3& xi);

// sqrt(sum |s - o|^2 / sum |o|^2) over the set (both members of each +/- pair)
double spectral_error(const FourierSampleSet& s, const CurlField& truth);

struct CurlErrors {
    double hminus1 = 0.0; // relative
    double linf = 0.0;    // relative
};
CurlErrors curl_errors(const CurlField& rec, const CurlField& truth);

// curl(A_1) - curl(A_2)
CurlField curl_difference(const CoefficientPair& c);

struct MagneticSweepConfig {
    std::vector<double> etas{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    double c_sigma = 0.8;
    double sigma_min = 4.0, sigma_cap = 12.0;
    // R = min(c_R sigma^{2/(n+4)}, 2 sigma xi_margin); frames need |xi| < 2 sigma
    double c_R = 6.5;
    double xi_margin = 0.99;
    double floor_tol = 0.05; // floor_flag when |err - err(eta=0, same sigma)| <= tol * err
    std::uint64_t seed = 1;
    int jobs = 1;
    CurlSampleOptions sample;
};

struct MagneticSweepRow {
    double eta, sigma, R, err_hminus1, err_linf;
    bool floor_flag;
};

double sweep_sigma(const MagneticSweepConfig& c, double eta);
double sweep_radius(const MagneticSweepConfig& c, double sigma);
std::vector<MagneticSweepRow> stability_sweep_magnetic(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                                                       const MagneticSweepConfig& c);

} // namespace msr
