#include "msr/diffops.hpp"

#include <cmath>

namespace msr {

VectorField gradient(const RealField& f) {
    const Grid& g = f.grid;
    VectorField out(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                for (int a = 0; a < 3; ++a) out.c[a](i, j, k) = partial(f, a, i, j, k);
    return out;
}

RealField divergence(const VectorField& A) {
    const Grid& g = A.grid;
    RealField out(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                out(i, j, k) = partial(A.c[0], 0, i, j, k) + partial(A.c[1], 1, i, j, k) +
                               partial(A.c[2], 2, i, j, k);
    return out;
}

CurlField curl(const VectorField& A) {
    const Grid& g = A.grid;
    CurlField out(g);
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                for (int s = 0; s < 3; ++s) {
                    int a = pairs[s][0], b = pairs[s][1];
                    out.s[s](i, j, k) = partial(A.c[b], a, i, j, k) - partial(A.c[a], b, i, j, k);
                }
    return out;
}

VectorField vector_curl(const VectorField& psi) {
    CurlField c = curl(psi);
    VectorField out(psi.grid);
    // (curl psi)_0 = s_12, (curl psi)_1 = -s_02 = s_20, (curl psi)_2 = s_01
    for (std::size_t p = 0; p < psi.grid.nodes(); ++p) {
        out.c[0][p] = c.s[2][p];
        out.c[1][p] = -c.s[1][p];
        out.c[2][p] = c.s[0][p];
    }
    return out;
}

ComplexField magnetic_laplacian(const VectorField& A, const ComplexField& u) {
    const Grid& g = u.grid;
    const double h = g.h(), ih2 = 1.0 / (h * h);
    const cplx I(0.0, 1.0);
    ComplexField out(g);
    const std::ptrdiff_t st[3] = {1, g.np(), std::ptrdiff_t(g.np()) * g.np()};
    for (int k = 1; k < g.Nx; ++k)
        for (int j = 1; j < g.Nx; ++j)
            for (int i = 1; i < g.Nx; ++i) {
                std::size_t p = g.idx(i, j, k);
                Vec3 a = A.at(p);
                cplx s = -(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]) * u[p];
                for (int d = 0; d < 3; ++d) {
                    std::size_t pp = p + st[d], pm = p - st[d];
                    s += (u[pp] - 2.0 * u[p] + u[pm]) * ih2;
                    s += I * ((a[d] + A.c[d][pp]) * u[pp] - (a[d] + A.c[d][pm]) * u[pm]) / (2.0 * h);
                }
                out[p] = s;
            }
    return out;
}

double gauge_conjugation_residual(const VectorField& A, const RealField& phi, const ComplexField& u) {
    const Grid& g = u.grid;
    const cplx I(0.0, 1.0);
    ComplexField eu(g);
    for (std::size_t p = 0; p < g.nodes(); ++p) eu[p] = std::exp(I * phi[p]) * u[p];
    ComplexField lhs = magnetic_laplacian(A, eu);
    VectorField Ap = gradient(phi);
    for (int c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < g.nodes(); ++p) Ap.c[c][p] += A.c[c][p];
    ComplexField rhs = magnetic_laplacian(Ap, u);
    double mx = 0.0;
    for (int k = 2; k <= g.Nx - 2; ++k)
        for (int j = 2; j <= g.Nx - 2; ++j)
            for (int i = 2; i <= g.Nx - 2; ++i) {
                std::size_t p = g.idx(i, j, k);
                mx = std::max(mx, std::abs(std::exp(-I * phi[p]) * lhs[p] - rhs[p]));
            }
    return mx;
}

} // namespace msr
