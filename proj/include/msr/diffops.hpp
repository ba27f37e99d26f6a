#pragma once

#include "msr/fields.hpp"

namespace msr {

// d/dx_axis at a node: central in the interior, first-order one-sided on faces.
template <class T>
T partial(const NodeField<T>& f, int axis, int i, int j, int k) {
    const Grid& g = f.grid;
    int c[3] = {i, j, k};
    int lo[3] = {i, j, k}, hi[3] = {i, j, k};
    double w = 2.0 * g.h();
    if (c[axis] == 0) {
        hi[axis] = 1;
        w = g.h();
    } else if (c[axis] == g.Nx) {
        lo[axis] = g.Nx - 1;
        w = g.h();
    } else {
        lo[axis] = c[axis] - 1;
        hi[axis] = c[axis] + 1;
    }
    return (f(hi[0], hi[1], hi[2]) - f(lo[0], lo[1], lo[2])) / w;
}

VectorField gradient(const RealField& f);
RealField divergence(const VectorField& A);
CurlField curl(const VectorField& A);
// three-dimensional vector curl, same stencils
VectorField vector_curl(const VectorField& psi);

// Discrete magnetic Laplacian on interior nodes (zero on the boundary):
//   (D_A u)_i = sum_j [u_{i+e} - 2u_i + u_{i-e}]/h^2
//             + i [(A_j(i) + A_j(i+e)) u_{i+e} - (A_j(i) + A_j(i-e)) u_{i-e}]/(2h)
//             - |A_i|^2 u_i,
// which is Delta + i(A.D + D.A) - |A|^2, a Hermitian form of Delta + 2iA.grad + i div A - |A|^2.
ComplexField magnetic_laplacian(const VectorField& A, const ComplexField& u);

// max over nodes of depth >= 2 of |e^{-i phi} D_A(e^{i phi} u) - D_{A + grad phi} u|.
double gauge_conjugation_residual(const VectorField& A, const RealField& phi, const ComplexField& u);

} // namespace msr
