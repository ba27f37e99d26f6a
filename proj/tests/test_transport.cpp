#include "doctest.h"

#include "msr/potentials.hpp"
#include "msr/transport.hpp"

#include <cmath>
#include <random>

using namespace msr;

namespace {

Grid grid(int Nx) {
    Grid g;
    g.Nx = Nx;
    g.Nt = 16;
    g.validate();
    return g;
}

ComplexDirection tilted() {
    ComplexDirection w;
    const double s = 1.0 / std::sqrt(2.0);
    w.re = {s, s, 0};
    w.im = {0, 0, 1};
    return w;
}

// psi = (1 - |x - c|^2/r^2)^4 and g = w.grad psi, analytically
struct PsiCase {
    Vec3 c{0.5, 0.45, 0.55};
    double r = 0.3;
    double psi(const Vec3& x) const {
        Vec3 y{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
        return bump_profile(norm(y) / r);
    }
    cplx g(const ComplexDirection& w, const Vec3& x) const {
        Vec3 y{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
        double s2 = dot(y, y) / (r * r);
        if (s2 >= 1.0) return 0.0;
        double u = 1.0 - s2;
        double f = -8.0 * u * u * u / (r * r);
        return f * (dot(w.re, y) + cplx(0.0, 1.0) * dot(w.im, y));
    }
};

ComplexField sample(const Grid& g, const std::function<cplx(const Vec3&)>& fn) {
    ComplexField f(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) f(i, j, k) = fn(g.x(i, j, k));
    return f;
}

double max_diff(const ComplexField& a, const ComplexField& b) {
    double m = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
    return m;
}

} // namespace

TEST_CASE("complex directions must be orthonormal") {
    ComplexDirection w;
    CHECK_NOTHROW(w.validate());
    w.re = {1, 0.1, 0};
    CHECK_THROWS_AS(w.validate(), ConfigError);
    w.re = {0, 1, 0};
    CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("zero source gives zero phase") {
    Grid g = grid(8);
    PhaseField p = n_omega_inverse(tilted(), ComplexField(g));
    for (const auto& a : p.phi.v) CHECK(a == cplx(0.0));
    CHECK(p.residual == 0.0);
}

TEST_CASE("inverse transport is linear") {
    Grid g = grid(8);
    PsiCase pc;
    ComplexDirection w = tilted();
    ComplexField g1 = sample(g, [&](const Vec3& x) { return pc.g(w, x); });
    ComplexField g2 = sample(g, [&](const Vec3& x) { return cplx(0.0, 0.7) * pc.psi(x); });
    ComplexField gs(g), g2x(g);
    for (std::size_t p = 0; p < gs.size(); ++p) {
        gs[p] = g1[p] + g2[p];
        g2x[p] = 2.0 * g1[p];
    }
    PhaseField a = n_omega_inverse(w, g1), b = n_omega_inverse(w, g2), s = n_omega_inverse(w, gs);
    PhaseField d = n_omega_inverse(w, g2x);
    double add = 0.0, hom = 0.0, scale = 0.0;
    for (std::size_t p = 0; p < gs.size(); ++p) {
        scale = std::max(scale, std::abs(s.phi[p]));
        add = std::max(add, std::abs(s.phi[p] - a.phi[p] - b.phi[p]));
        hom = std::max(hom, std::abs(d.phi[p] - 2.0 * a.phi[p]));
    }
    CHECK(add <= 1e-12 * std::max(1.0, scale));
    CHECK(hom <= 1e-12 * std::max(1.0, scale));
}

TEST_CASE("inverting w.grad psi recovers psi at second order") {
    PsiCase pc;
    ComplexDirection w = tilted();
    std::vector<double> res, err;
    for (int Nx : {16, 32}) {
        Grid g = grid(Nx);
        ComplexField src = sample(g, [&](const Vec3& x) { return pc.g(w, x); });
        ComplexField psi = sample(g, [&](const Vec3& x) { return cplx(pc.psi(x)); });
        PhaseField p = n_omega_inverse(w, src);
        res.push_back(p.residual);
        err.push_back(max_diff(p.phi, psi));
    }
    MESSAGE("residual " << res[0] << " -> " << res[1] << ", |phi - psi| " << err[0] << " -> " << err[1]);
    CHECK(res[0] / res[1] >= 3.0);
    CHECK(err[0] / err[1] >= 3.0);
}

TEST_CASE("transport residual is blind to constant shifts and vanishes for A = 0") {
    Grid g = grid(8);
    ComplexDirection w = tilted();
    VectorField A0(g);
    PhaseField z = n_omega_inverse(w, dot_direction(w, A0));
    CHECK(transport_residual(z, A0, w) == 0.0);

    VectorField A = make_admissible_potential(g, {Bump{{0.5, 0.5, 0.5}, 0.3, 0.1, {1, 0, 0}}}, false);
    ComplexField src = dot_direction(w, A);
    for (auto& a : src.v) a = -a;
    PhaseField p = n_omega_inverse(w, src);
    double r0 = transport_residual(p, A, w);
    for (auto& a : p.phi.v) a += cplx(3.0, -1.0);
    CHECK(transport_residual(p, A, w) == doctest::Approx(r0).epsilon(1e-12));
}

TEST_CASE("sup bound of the inverse over a random ensemble") {
    Grid g = grid(8);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        Vec3 c{0.5 + 0.1 * U(rng), 0.5 + 0.1 * U(rng), 0.5 + 0.1 * U(rng)};
        cplx amp(U(rng), U(rng));
        ComplexField src = sample(g, [&](const Vec3& x) {
            Vec3 y{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
            return amp * bump_profile(norm(y) / 0.3) * (1.0 + 0.5 * U(rng));
        });
        worst = std::max(worst, n_omega_inverse(tilted(), src).bound_ratio);
    }
    MESSAGE("max |phi|/|g| " << worst);
    CHECK(worst < 50.0);
}

TEST_CASE("phase cancellation: trivial cases and frame checks") {
    Grid g = grid(8);
    ComplexDirection w;
    PhaseCancellation z = phase_cancellation_check(VectorField(g), w, {0, 0, 0});
    CHECK(std::abs(z.lhs) == 0.0);
    CHECK(std::abs(z.rhs) == 0.0);
    VectorField A = make_admissible_potential(g, {Bump{{0.5, 0.5, 0.5}, 0.3, 0.05, {1, 1, 0}}}, false);
    CHECK_THROWS_AS(phase_cancellation_check(A, w, {1.0, 0, 0}), ConfigError);
}

TEST_CASE("phase cancellation gap shrinks under refinement for either sign of A") {
    ComplexDirection w;
    std::vector<Bump> r{Bump{{0.45, 0.55, 0.5}, 0.3, 0.05, {1, -0.5, 0.3}},
                        Bump{{0.6, 0.45, 0.55}, 0.2, 0.05, {0.2, 1, -1}}};
    for (double sgn : {1.0, -1.0}) {
        std::vector<Bump> rs = r;
        for (auto& b : rs) b.amplitude *= sgn;
        double g8 = phase_cancellation_check(make_admissible_potential(grid(8), rs, false), w, {0, 0, 0}).gap;
        double g16 = phase_cancellation_check(make_admissible_potential(grid(16), rs, false), w, {0, 0, 0}).gap;
        MESSAGE("gap " << g8 << " -> " << g16);
        CHECK(g8 / g16 >= 3.0);
    }
}
