#pragma once

#include "msr/grid.hpp"

#include <optional>
#include <vector>

namespace msr {

using RVec = std::vector<double>;
using CVecN = std::vector<cplx>;

// (xi, w_R, w_I, y, sigma, side) in any dimension n >= 3.
struct FrequencyFrame {
    RVec xi, wR, wI, y;
    double sigma = 0.0;
    int side = 2;
    int n() const { return int(xi.size()); }
    void validate() const;
};

struct ComplexFrequency {
    CVecN rho;
    cplx rho_dot_rho;
    int side = 2;
};

// w_R, w_I completed by Gram-Schmidt from xi/|xi| followed by e_1, e_2, ...
// (xi = 0 needs an explicit axis: the completion then starts from e_axis).
FrequencyFrame build_frame(const RVec& xi, const RVec& y, double sigma, int side,
                           std::optional<int> zero_axis = std::nullopt);

// Same, with w_I prescribed (must be a unit vector orthogonal to xi); w_R completes it.
FrequencyFrame build_frame_with_im(const RVec& xi, const RVec& y, double sigma, int side, const RVec& wI);

// side 1: sigma(i w_I - xi/2s + r w_R) + y, side 2: sigma(-i w_I + xi/2s + r w_R) + y,
// with r = sqrt(1 - |xi|^2 / 4 sigma^2)
ComplexFrequency make_rho(const FrequencyFrame& f);

// rho_2 - conj(rho_1) and rho_2.rho_2 - conj(rho_1).conj(rho_1) for a side-1/side-2 pair
CVecN pair_difference(const ComplexFrequency& r1, const ComplexFrequency& r2);
cplx pair_phase(const ComplexFrequency& r1, const ComplexFrequency& r2);

cplx cdot(const CVecN& a, const CVecN& b); // bilinear
double rdot(const RVec& a, const RVec& b);
double rnorm(const RVec& a);
Vec3 to_vec3(const RVec& v);
CVec3 to_cvec3(const CVecN& v);

// Lattice frequencies with matched Crank-Nicolson dispersion on a Grid. The carrier
// e^{-i (x - x_c).rho} G^{m - m_c} is an exact discrete solution of the free scheme when
// G = (1 - i lam dt/2)/(1 + i lam dt/2), lam = sum_j (4/h^2) sin^2(rho_j h/2).
struct DiscreteCarrier {
    CVec3 rho{};
    cplx lambda, G;
};

cplx lambda_h(const CVec3& rho, double h);
cplx cn_amplification(cplx lambda, double dt);
DiscreteCarrier make_carrier(const CVec3& rho, const Grid& g);

// Shift both frequencies along xi/|xi| by a common complex zeta so that
// G_2 conj(G_1) = e^{-i tau dt} exactly (the discrete form of rho_2.rho_2 - conj(rho_1)^2 = tau).
// The continuum starting point is zeta = tau / (2|xi|), i.e. y = tau xi / (2|xi|^2).
struct MatchedPair {
    DiscreteCarrier c1, c2;
    cplx zeta;
    double mismatch = 0.0; // |G_2 conj(G_1) - e^{-i tau dt}|
    int newton_steps = 0;
};

MatchedPair match_dispersion(const FrequencyFrame& f, const Grid& g, double tau);

} // namespace msr
