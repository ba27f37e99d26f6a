#include "msr/hodge.hpp"
#include "msr/diffops.hpp"
#include "msr/fft.hpp"
#include "msr/norms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace msr {

RealField poisson_dirichlet(const RealField& f, double* residual) {
    const Grid& g = f.grid;
    const int n = g.Nx - 1;
    const double h = g.h();
    std::vector<double> a(std::size_t(n) * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) a[i + n * (j + std::size_t(n) * k)] = f(i + 1, j + 1, k + 1);
    dst1_3d(a, n, n, n);
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
        double t = std::sin(std::numbers::pi * (i + 1) / (2.0 * g.Nx));
        s[i] = 4.0 / (h * h) * t * t;
    }
    const double norm = 1.0 / std::pow(2.0 * g.Nx, 3);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) a[i + n * (j + std::size_t(n) * k)] *= -norm / (s[i] + s[j] + s[k]);
    dst1_3d(a, n, n, n);
    RealField phi(g);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) phi(i + 1, j + 1, k + 1) = a[i + n * (j + std::size_t(n) * k)];

    double rmax = 0.0, fmax = 0.0;
    for (int k = 1; k < g.Nx; ++k)
        for (int j = 1; j < g.Nx; ++j)
            for (int i = 1; i < g.Nx; ++i) {
                double lap = (phi(i + 1, j, k) + phi(i - 1, j, k) + phi(i, j + 1, k) + phi(i, j - 1, k) +
                              phi(i, j, k + 1) + phi(i, j, k - 1) - 6.0 * phi(i, j, k)) /
                             (h * h);
                rmax = std::max(rmax, std::abs(lap - f(i, j, k)));
                fmax = std::max(fmax, std::abs(f(i, j, k)));
            }
    double rel = fmax > 0.0 ? rmax / fmax : rmax;
    if (residual) *residual = rel;
    if (rel > 1e-10) {
        std::ostringstream os;
        os << "Poisson solve did not reach 1e-10 (relative residual " << rel << ")";
        throw StageError(os.str());
    }
    return phi;
}

HodgeResult hodge_project(const VectorField& A, double p) {
    const Grid& g = A.grid;
    HodgeResult r;
    r.p = p;
    r.p_warning = !(p > double(g.n));
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i)
                    if (g.on_boundary(i, j, k) && A.c[c](i, j, k) != 0.0)
                        throw ConfigError("hodge_project needs A to vanish on the boundary");
    RealField div = divergence(A);
    r.phi = poisson_dirichlet(div, &r.poisson_residual);
    VectorField gp = gradient(r.phi);
    r.A_prime = VectorField(g);
    for (int c = 0; c < 3; ++c)
        for (std::size_t q = 0; q < g.nodes(); ++q) r.A_prime.c[c][q] = A.c[c][q] - gp.c[c][q];
    RealField d2 = divergence(r.A_prime);
    for (int k = 1; k < g.Nx; ++k)
        for (int j = 1; j < g.Nx; ++j)
            for (int i = 1; i < g.Nx; ++i) r.max_div = std::max(r.max_div, std::abs(d2(i, j, k)));
    double cn = discrete_norm(curl(r.A_prime), NormId::Linf);
    double wn = discrete_norm(r.A_prime, NormId::W1inf);
    r.ratio_W1inf_over_curl = cn > 0.0 ? wn / cn : 0.0;
    return r;
}

} // namespace msr
