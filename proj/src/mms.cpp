#include "msr/mms.hpp"
#include "msr/diffops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace msr {

namespace {

double div_bump_field(const std::vector<Bump>& recipe, const Vec3& x) {
    double s = 0.0;
    for (const auto& b : recipe) {
        Vec3 y{x[0] - b.center[0], x[1] - b.center[1], x[2] - b.center[2]};
        double s2 = dot(y, y) / (b.radius * b.radius);
        if (s2 >= 1.0) continue;
        double u = 1.0 - s2;
        Vec3 d = b.direction;
        double nd = norm(d);
        s += -8.0 * b.amplitude * u * u * u * dot(d, y) / (nd * b.radius * b.radius);
    }
    return s;
}

Grid make_grid(const MmsCase& c, int Nx, int Nt) {
    Grid g;
    g.Nx = Nx;
    g.Nt = Nt;
    g.T = c.T;
    g.validate();
    return g;
}

cplx wave(const MmsCase& c, const Vec3& x) { return std::exp(cplx(0.0, dot(c.k, x))); }

double max_level_error(const SpaceTimeSolution& s, const std::function<cplx(const Vec3&, double)>& exact) {
    const Grid& g = s.grid;
    double worst = 0.0;
    ComplexField e(g), u(g);
    for (int m = 0; m <= g.Nt; ++m) {
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) {
                    std::size_t p = g.idx(i, j, k);
                    u[p] = exact(g.x(i, j, k), m * g.dt());
                    e[p] = s.u.level(m)[p] - u[p];
                }
        worst = std::max(worst, l2_omega(e) / l2_omega(u));
    }
    return worst;
}

BoundaryInput exact_input(const Grid& g, const std::function<cplx(const Vec3&, double)>& exact) {
    ComplexField lv(g);
    return input_from_levels(g, [&](int m) -> const cplx* {
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) lv(i, j, k) = exact(g.x(i, j, k), m * g.dt());
        return lv.v.data();
    });
}

} // namespace

MmsError mms_space_error(const MmsCase& c, int Nx, int Nt, const SolverOptions& opt) {
    Grid g = make_grid(c, Nx, Nt);
    VectorField A = make_admissible_potential(g, c.A_bumps, false);
    ScalarSpaceTimeField q = make_scalar_potential(g, c.q);
    auto exact = [&](const Vec3& x, double) { return wave(c, x); };
    ComplexSpaceTimeField F(g);
    for (int m = 0; m <= g.Nt; ++m)
        for (int k = 1; k < g.Nx; ++k)
            for (int j = 1; j < g.Nx; ++j)
                for (int i = 1; i < g.Nx; ++i) {
                    Vec3 x = g.x(i, j, k);
                    Vec3 a = potential_value(c.A_bumps, false, x);
                    double sym = -dot(c.k, c.k) - 2.0 * dot(a, c.k) - dot(a, a) + q(i, j, k, m);
                    F(i, j, k, m) = cplx(sym, div_bump_field(c.A_bumps, x)) * wave(c, x);
                }
    SpaceTimeSolution s = solve_ibvp(A, q, exact_input(g, exact), &F, opt);
    return {Nx, Nt, max_level_error(s, exact)};
}

MmsError mms_time_error(const MmsCase& c, int Nx, int Nt, const SolverOptions& opt) {
    Grid g = make_grid(c, Nx, Nt);
    VectorField A = make_admissible_potential(g, c.A_bumps, false);
    ScalarSpaceTimeField q = make_scalar_potential(g, c.q);
    auto exact = [&](const Vec3& x, double t) { return std::exp(cplx(0.0, -c.omega * t)) * wave(c, x); };
    ComplexSpaceTimeField F(g);
    ComplexField lv(g);
    for (int m = 0; m <= g.Nt; ++m) {
        const double t = m * g.dt();
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) lv(i, j, k) = exact(g.x(i, j, k), t);
        ComplexField H = magnetic_laplacian(A, lv);
        for (int k = 1; k < g.Nx; ++k)
            for (int j = 1; j < g.Nx; ++j)
                for (int i = 1; i < g.Nx; ++i) {
                    std::size_t p = g.idx(i, j, k);
                    F.level(m)[p] = c.omega * lv[p] + H[p] + q.level(m)[p] * lv[p];
                }
    }
    SpaceTimeSolution s = solve_ibvp(A, q, exact_input(g, exact), &F, opt);
    return {Nx, Nt, max_level_error(s, exact)};
}

DriftReport l2_drift(const MmsCase& c, int Nx, int Nt, const SolverOptions& opt) {
    Grid g = make_grid(c, Nx, Nt);
    VectorField A = make_admissible_potential(g, c.A_bumps, false);
    ScalarSpaceTimeField q = make_scalar_potential(g, c.q);
    BoundaryInput in = zero_input(g);
    for (int k = 1; k < g.Nx; ++k)
        for (int j = 1; j < g.Nx; ++j)
            for (int i = 1; i < g.Nx; ++i) {
                Vec3 x = g.x(i, j, k);
                Vec3 y{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
                in.u0(i, j, k) = bump_profile(norm(y) / 0.4) * wave(c, x);
            }
    in.update_compatibility();
    SpaceTimeSolution s = solve_ibvp(A, q, in, nullptr, opt);
    DriftReport d;
    const double n0 = s.l2.front();
    for (std::size_t m = 1; m < s.l2.size(); ++m) {
        d.per_step = std::max(d.per_step, std::abs(s.l2[m] - s.l2[m - 1]) / n0);
        d.cumulative = std::max(d.cumulative, std::abs(s.l2[m] - n0) / n0);
    }
    return d;
}

} // namespace msr
