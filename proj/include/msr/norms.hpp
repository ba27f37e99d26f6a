#pragma once

#include "msr/fields.hpp"

#include <string>

namespace msr {

enum class NormId { L2, Linf, W1inf, Hminus1 };

NormId parse_norm_id(const std::string& s);

// L2 uses trapezoid weights; H-1 weights the Fourier coefficients of the periodic
// extension (unit cell in space, period T in time) by <(xi,tau)>^{-1}.
// W1inf is a stencil-based surrogate: max(|f|, |grad_h f|).
double discrete_norm(const RealField& f, NormId id);
double discrete_norm(const ComplexField& f, NormId id);
double discrete_norm(const VectorField& f, NormId id);
double discrete_norm(const CurlField& f, NormId id);
double discrete_norm(const ScalarSpaceTimeField& f, NormId id);
double discrete_norm(const ComplexSpaceTimeField& f, NormId id);

// trapezoid weight of node index i on an axis with N cells
inline double trap_weight(int i, int N) { return (i == 0 || i == N) ? 0.5 : 1.0; }

} // namespace msr
