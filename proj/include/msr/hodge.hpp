#pragma once

#include "msr/fields.hpp"

#include <limits>

namespace msr {

// Solves the 7-point Dirichlet problem Delta_h phi = f on interior nodes, phi = 0 on the boundary.
// Direct sine-transform solve; returns the relative max-norm residual through *residual.
RealField poisson_dirichlet(const RealField& f, double* residual = nullptr);

struct HodgeResult {
    RealField phi;
    VectorField A_prime;
    double poisson_residual = 0.0;
    double max_div = 0.0;
    double ratio_W1inf_over_curl = 0.0;
    double p = std::numeric_limits<double>::infinity();
    bool p_warning = false;
};

// A = A' + grad phi with div A' = O(h^2); p only sets the reported norm (max-norm surrogate).
HodgeResult hodge_project(const VectorField& A, double p = std::numeric_limits<double>::infinity());

} // namespace msr
