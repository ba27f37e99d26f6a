#pragma once

#include "msr/sampling.hpp"

#include <string>
#include <vector>

namespace msr {

// Space-time lattice of the zero extension of q to the period box [0,2)^3 x [0,2T):
// xi = pi k, tau = (pi/T) m.
struct ConePoint {
    std::array<int, 3> k{0, 0, 0};
    int m = 0;
    Vec3 xi{0, 0, 0};
    double tau = 0.0;
};

struct FrequencyCone {
    double alpha = 0.0;
    std::vector<ConePoint> points;
    bool empty = true;
};

double lattice_xi_step();
double lattice_tau_step(const Grid& g);
ConePoint lattice_point(const Grid& g, const std::array<int, 3>& k, int m);

// lattice points with xi != 0, |xi| < 2 alpha, |tau| < 2|xi|
FrequencyCone build_cone_lattice(double alpha, const Grid& g);
// Same, further restricted to |(xi, tau)| < radius, one representative per +/- pair.
std::vector<ConePoint> half_cone(double alpha, double radius, const Grid& g);
// lattice points with |(xi, tau)| < alpha, one representative per +/- pair plus the origin
std::vector<ConePoint> half_ball(double alpha, const Grid& g);

struct QSampleDiag {
    double p1_inputs = 0.0; // |A|_inf + |xi|/sigma
    double p2_inputs = 0.0; // 1/sigma
    double carrier_norm = 0.0, probe_norm = 0.0, dtn_opnorm = 0.0;
    double go_residual = 0.0, w_norm = 0.0;
    cplx zeta = 0.0; // discrete shift along xi/|xi|
};

struct QSample {
    ConePoint pt;
    Vec3 y{0, 0, 0}; // tau xi / (2|xi|^2)
    double sigma = 0.0;
    cplx value = 0.0;
    std::vector<cplx> noisy;
    QSampleDiag diag;
};

struct QSampleSet {
    double sigma = 0.0;
    std::vector<double> etas;
    std::vector<QSample> samples;
};

// y = tau xi / (2|xi|^2); throws ConfigError when |y| >= 1 or xi = 0
Vec3 cone_y(const Vec3& xi, double tau);

// F / [(1 + G_2)(1 + conj G_1)/4 e^{i tau dt/2}] for the GO pair with shared y; the
// normalisation is the discrete carrier product summed over the time levels.
QSample q_fourier_sample(const DtnDifferenceOracle& oracle, const CoefficientPair& model, const ConePoint& pt,
                         double sigma, const ProbeOptions& opt = {}, const NoisePlan& noise = {});

QSampleSet sample_cone(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                       const std::vector<ConePoint>& pts, double sigma, const ProbeOptions& opt, int jobs,
                       const NoisePlan& noise = {});

QSampleSet select_noise(const QSampleSet& s, std::size_t e);

struct BallValue {
    ConePoint pt;
    cplx value = 0.0;
};

struct Extension {
    int degree = 0;            // degree actually used
    int requested_degree = 0;
    std::vector<cplx> coefficients;
    std::vector<std::array<int, 4>> monomials;
    double fit_residual = 0.0; // relative
    double condition = 0.0;
    std::vector<std::string> warnings;
    std::vector<BallValue> ball; // half ball
};

// total-degree monomials of (xi, tau)/alpha, graded
std::vector<std::array<int, 4>> monomials(int d);

// Least squares on the samples (each with its conjugate partner) in z = (xi, tau)/alpha,
// evaluated on half_ball(alpha). Rank-deficient designs lower the degree.
Extension extend_to_ball(const QSampleSet& s, double alpha, int degree, const Grid& g, int max_degree = 6);

// q(x,t) = (1/(8 * 2T)) sum over the ball of v e^{i((x - x_c).xi + (t - T/2) tau)}, with the
// half ball filled by conjugation
ScalarSpaceTimeField invert_q(const std::vector<BallValue>& ball, const Grid& g);

// Centred transform of the zero extension on the lattice above (trapezoid in time).
class QSpectrum {
public:
    explicit QSpectrum(const ScalarSpaceTimeField& q);
    cplx at(const std::array<int, 3>& k, int m) const;
    // relative H^{-1}: weights 1/(1 + |xi|^2 + tau^2)
    double hminus1_error(const std::vector<BallValue>& ball) const;
    double hminus1_norm() const;
    double band_error(const std::vector<BallValue>& ball) const; // over the ball only
    const Grid& grid() const { return g_; }

private:
    Grid g_;
    int M_ = 0, Mt_ = 0;
    std::vector<cplx> v_;
    std::size_t index(const std::array<int, 3>& k, int m) const;
    double weight(const std::array<int, 3>& k, int m) const;
};

// direct quadrature of the same transform at one point
cplx q_oracle(const ScalarSpaceTimeField& q, const Vec3& xi, double tau);

struct ElectricSweepConfig {
    std::vector<double> etas{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    // the pairing error grows like e^{C sigma} |D|, so sweeps run at a lower sigma than single samples
    double sigma = 5.0;
    double a = 4.0;           // alpha = a log(1 + log(1 + |log eta|))
    double alpha_cap = 5.0;   // also used for eta = 0
    double fit_radius = 1.5;  // cone samples used: |(xi, tau)| < fit_radius * alpha
    int degree = 2;
    int max_degree = 6;
    std::uint64_t seed = 2;
    int jobs = 1;
    ProbeOptions probe{GoOptions{}, U1Mode::Carrier, false};
};

struct ElectricSweepRow {
    double eta, alpha, sigma;
    int n_samples, fit_degree;
    double err_hminus1;
    double err_band;
};

struct ShapeFits {
    double tripleLog_R2 = 0.0, tripleLog_a = 0.0, tripleLog_b = 0.0;
    double logPower_R2 = 0.0, logPower_c = 0.0, logPower_a = 0.0;
};

double sweep_alpha(const ElectricSweepConfig& c, double eta);
std::vector<ElectricSweepRow> stability_sweep_electric(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                                                       const ElectricSweepConfig& c);
// err ~ a + b |log|log|log eta|||^{-1} and err ~ a |log eta|^{-c}, over rows with eta > 0
ShapeFits fit_electric_shapes(const std::vector<ElectricSweepRow>& rows);

} // namespace msr
