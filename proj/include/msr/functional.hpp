#pragma once

#include "msr/go.hpp"

namespace msr {

// Pairing of a DtN-record difference D = rec_1 - rec_2 (both records taken for the probe of
// u_2) with u_1:
//   -i <D_T, u_1(T)>_Omega - <D_Sigma, u_1>_Sigma,   <a, b> = sum a conj(b),
// with h^3 node weights on Omega and, on Sigma, trapezoid face weights and midpoint values
// in time. With first-order traces this equals, to roundoff,
//   sum_m dt <(H_1 - H_2)^{m+1/2} u_2^{m+1/2}, u_1^{m+1/2}>_Omega.
cplx boundary_functional(const DtnRecord& diff, const ComplexField& u1_final,
                         const std::function<void(int, FaceSeries&)>& u1_faces);
cplx boundary_functional(const DtnRecord& diff, const GoSolution& u1);
cplx boundary_functional(const DtnRecord& diff, const ComplexSpaceTimeField& u1);

// sum_m dt <(H_1 - H_2)^{m+1/2} u_2^{m+1/2}, u_1^{m+1/2}> over interior nodes (h^3 weights)
cplx volume_pairing(const VectorField& A1, const ScalarSpaceTimeField& q1, const VectorField& A2,
                    const ScalarSpaceTimeField& q2, const ComplexSpaceTimeField& u2,
                    const ComplexSpaceTimeField& u1);

ProbeMeta probe_meta(const GoSolution& u);

} // namespace msr
