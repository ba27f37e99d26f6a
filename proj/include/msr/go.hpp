#pragma once

#include "msr/forward.hpp"
#include "msr/frame.hpp"
#include "msr/multiplier.hpp"
#include "msr/transport.hpp"

#include <string>
#include <vector>

namespace msr {

struct GoOptions {
    double sigma0 = 4.0;
    MultiplierOptions mult;
    PicardOptions picard;
    TransportOptions transport;
    // spatial cutoff of the phase on the box: 1 on [-inner, 1+inner]^3, 0 outside [-outer, 1+outer]^3
    double cutoff_inner = 0.2, cutoff_outer = 0.4;
    bool force_dynamic = false;
    double residual_tol = 1e-4;
};

// u = C (v0 + w) on Q, with the discrete carrier C = e^{-i (x - x_c).rho} G^{m - m_c},
// v0 = e^{i phi} near Omega and phi = N_w^{-1}(-w.A) for the side's unit complex direction w.
// w is the box solution of K w = -K v0 for the carrier-conjugated Crank-Nicolson operator
// K, computed by Picard iteration on the twisted periodic box, restricted to Q.
struct GoSolution {
    Grid grid;
    FrequencyFrame frame;
    DiscreteCarrier carrier;
    ComplexDirection omega;
    PhaseField phase;  // on Omega
    ComplexField v0;   // on Omega
    ComplexSpaceTimeField w;
    bool static_path = true;

    double w_l2h1 = 0.0, w_l2h2 = 0.0;      // |w|_{L2(0,T;H1)}, |w|_{L2(0,T;H2)}
    double w_dt1_l2h1 = 0.0, w_dt2_l2h1 = 0.0; // same norm of first/second time differences
    double source_inf = 0.0;                // max |K v0| on the box
    double residual = 0.0;                  // max over interior rows of |scheme(u)/C|, relative to source_inf
    double transport_residual = 0.0;        // max |w.grad phi + w.A| on interior nodes
    PicardReport picard;
    std::size_t regularized_modes = 0;
    std::vector<std::string> warnings;

    cplx carrier_at(int i, int j, int k, int m) const;
    cplx value(int i, int j, int k, int m) const;
    void level(int m, ComplexField& out) const;
    ComplexSpaceTimeField field() const;
};

// unit complex direction of the side's frequency, (Re rho + i Im rho)/sigma with y removed
ComplexDirection side_direction(const FrequencyFrame& f);

GoSolution build_go_solution(const VectorField& A, const ScalarSpaceTimeField& q, const FrequencyFrame& frame,
                             const DiscreteCarrier& carrier, const GoOptions& opt = {});

// probe data (u(., 0), u on Sigma) of a GO solution
BoundaryInput go_probe(const GoSolution& u);

} // namespace msr
