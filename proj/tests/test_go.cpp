#include "doctest.h"

#include "msr/frame.hpp"
#include "msr/go.hpp"
#include "msr/multiplier.hpp"
#include "msr/potentials.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace msr;

namespace {

constexpr double kPi = std::numbers::pi;

Grid grid(int Nx, int Nt) {
    Grid g;
    g.Nx = Nx;
    g.Nt = Nt;
    g.validate();
    return g;
}

double max_abs_diff(const CVecN& a, const CVecN& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<cplx> single_mode(const BoxLattice& box, int a, int b, int c, int mt) {
    std::vector<cplx> v(box.size());
    for (int m = 0; m < box.Mt; ++m)
        for (int k = 0; k < box.M; ++k)
            for (int j = 0; j < box.M; ++j)
                for (int i = 0; i < box.M; ++i)
                    v[box.idx(i, j, k, m)] = std::exp(
                        cplx(0.0, (box.kx(a) * i + box.kx(b) * j + box.kx(c) * k) * box.h + box.kt(mt) * m * box.dt));
    return v;
}

std::vector<cplx> smooth_box_source(const BoxLattice& box) {
    std::vector<cplx> v(box.size());
    for (int m = 0; m < box.Mt; ++m)
        for (int k = 0; k < box.M; ++k)
            for (int j = 0; j < box.M; ++j)
                for (int i = 0; i < box.M; ++i) {
                    Vec3 x = box.x(i, j, k);
                    Vec3 y{x[0] - 0.5, x[1] - 0.45, x[2] - 0.55};
                    v[box.idx(i, j, k, m)] = bump_profile(norm(y) / 0.4) * cplx(1.0, -0.5);
                }
    return v;
}

} // namespace

TEST_CASE("frame completion for xi along e3") {
    FrequencyFrame f = build_frame({0, 0, 1}, {0, 0, 0}, 1.0, 2);
    CHECK(f.wR == RVec{1, 0, 0});
    CHECK(f.wI == RVec{0, 1, 0});
}

TEST_CASE("frames are orthonormal for random inputs, including n > 3") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(-0.5, 0.5), F(0.05, 0.95);
    for (int t = 0; t < 100; ++t) {
        const int n = 3 + t % 3;
        const double sigma = 4.0 + 8.0 * F(rng);
        RVec xi(n), y(n);
        for (int i = 0; i < n; ++i) xi[i] = N(rng);
        const double s = F(rng) * 2.0 * sigma / rnorm(xi);
        for (int i = 0; i < n; ++i) {
            xi[i] *= s;
            y[i] = U(rng) / std::sqrt(double(n));
        }
        FrequencyFrame f = build_frame(xi, y, sigma, 1 + t % 2);
        CHECK(std::abs(rdot(f.wR, f.wI)) <= 1e-12);
        CHECK(std::abs(rdot(f.xi, f.wR)) <= 1e-12 * std::max(1.0, rnorm(xi)));
        CHECK(std::abs(rdot(f.xi, f.wI)) <= 1e-12 * std::max(1.0, rnorm(xi)));
        CHECK(rnorm(f.wR) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rnorm(f.wI) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("frames outside the valid range are rejected") {
    CHECK_THROWS_AS(build_frame({0, 0, 2}, {0, 0, 0}, 1.0, 2), ConfigError);
    CHECK_THROWS_AS(build_frame({0, 1}, {0, 0}, 4.0, 2), ConfigError);
    CHECK_THROWS_AS(build_frame({0, 0, 1}, {0, 0, 1.0}, 4.0, 2), ConfigError);
    CHECK_THROWS_AS(build_frame({0, 0, 1}, {0, 0, 0}, 4.0, 3), ConfigError);
    CHECK_THROWS_AS(build_frame({0, 0, 0}, {0, 0, 0}, 4.0, 2), ConfigError);
    CHECK_NOTHROW(build_frame({0, 0, 0}, {0, 0, 0}, 4.0, 2, 0));
}

TEST_CASE("complex frequencies of the unit example") {
    FrequencyFrame f2 = build_frame({0, 0, 1}, {0, 0, 0}, 1.0, 2);
    ComplexFrequency r2 = make_rho(f2);
    CHECK(max_abs_diff(r2.rho, {std::sqrt(3.0) / 2.0, cplx(0, -1), 0.5}) <= 1e-15);
    CHECK(std::abs(r2.rho_dot_rho) <= 1e-15);

    FrequencyFrame f1 = f2;
    f1.side = 1;
    ComplexFrequency r1 = make_rho(f1);
    CHECK(std::abs(r1.rho_dot_rho) <= 1e-15);
    CHECK(max_abs_diff(pair_difference(r1, r2), {0, 0, 1}) <= 1e-12);

    ComplexFrequency y1 = make_rho(build_frame({0, 0, 1}, {0, 0, 0.3}, 1.0, 1));
    ComplexFrequency y2 = make_rho(build_frame({0, 0, 1}, {0, 0, 0.3}, 1.0, 2));
    CHECK(std::abs(pair_phase(y1, y2) - 0.6) <= 1e-12);
}

TEST_CASE("discrete dispersion matching") {
    Grid g = grid(16, 64);
    for (double tau : {0.0, kPi, -2.0 * kPi}) {
        FrequencyFrame f = build_frame({0, 0, 2 * kPi}, {0, 0, 0}, 8.0, 2);
        MatchedPair mp = match_dispersion(f, g, tau);
        CHECK(mp.mismatch <= 1e-12);
        cplx lhs = mp.c2.G * std::conj(mp.c1.G);
        CHECK(std::abs(lhs - std::exp(cplx(0.0, -tau * g.dt()))) <= 1e-12);
        CHECK(std::abs(mp.c1.G - cn_amplification(lambda_h(mp.c1.rho, g.h()), g.dt())) <= 1e-14);
    }
}

TEST_CASE("the multiplier divides a single mode by its symbol") {
    Grid g = grid(16, 64);
    FrequencyFrame f = build_frame({0, 2 * kPi, 0}, {0, 0, 0}, 6.0, 2);
    MatchedPair mp = match_dispersion(f, g, 0.0);
    for (bool dynamic : {false, true}) {
        BoxLattice box = make_box(g, dynamic);
        MultiplierE E(box, mp.c2, 6.0);
        const int mt = dynamic ? 3 : 0;
        std::vector<cplx> v = single_mode(box, 2, 1, box.M - 1, mt), ev = v;
        E.apply(ev);
        const cplx p = E.symbol(2, 1, box.M - 1, mt);
        REQUIRE(std::abs(p) > 1e-3 * 6.0);
        double err = 0.0;
        for (std::size_t q = 0; q < v.size(); ++q) err = std::max(err, std::abs(ev[q] - v[q] / p));
        CHECK(err <= 1e-12 * std::max(1.0, 1.0 / std::abs(p)));

        std::vector<cplx> z(box.size(), 0.0);
        E.apply(z);
        for (cplx a : z) CHECK(a == cplx(0.0));
    }
}

TEST_CASE("the GO solution of the free medium is the bare carrier") {
    Grid g = grid(8, 16);
    FrequencyFrame f = build_frame({2 * kPi, 0, 0}, {0, 0, 0}, 6.0, 1);
    MatchedPair mp = match_dispersion(f, g, 0.0);
    GoSolution u = build_go_solution(VectorField(g), ScalarSpaceTimeField(g), f, mp.c1);
    CHECK(u.w.is_zero());
    for (cplx a : u.phase.phi.v) CHECK(a == cplx(0.0));
    for (int m : {0, 7, 16})
        for (int k = 0; k <= g.Nx; k += 4)
            for (int j = 0; j <= g.Nx; j += 4)
                for (int i = 0; i <= g.Nx; i += 4) CHECK(u.value(i, j, k, m) == u.carrier_at(i, j, k, m));
}

TEST_CASE("Picard iteration: free medium, zero source, small potential") {
    Grid g = grid(16, 64);
    FrequencyFrame f = build_frame({0, 0, 2 * kPi}, {0, 0, 0}, 8.0, 2);
    MatchedPair mp = match_dispersion(f, g, 0.0);
    BoxLattice box = make_box(g, false);
    MultiplierE E(box, mp.c2, 8.0);
    std::vector<cplx> S = smooth_box_source(box);

    SUBCASE("A = 0 returns E S") {
        ConjugatedScheme K(box, mp.c2, VectorField(g), nullptr);
        PicardReport rep;
        std::vector<cplx> w = picard_iterate_G(E, K, S, {}, &rep);
        std::vector<cplx> es = S;
        E.apply(es);
        CHECK(rep.iterations <= 1);
        double d = 0.0;
        for (std::size_t p = 0; p < w.size(); ++p) d = std::max(d, std::abs(w[p] - es[p]));
        CHECK(d == 0.0);
    }
    SUBCASE("zero source") {
        VectorField A = make_admissible_potential(g, {Bump{{0.5, 0.5, 0.5}, 0.3, 0.1, {1, 1, 1}}}, true);
        ConjugatedScheme K(box, mp.c2, A, nullptr);
        std::vector<cplx> w = picard_iterate_G(E, K, std::vector<cplx>(box.size(), 0.0), {}, nullptr);
        for (cplx a : w) CHECK(a == cplx(0.0));
    }
    SUBCASE("small potential: the operator applied to the output reproduces the source") {
        VectorField A = make_admissible_potential(g, {Bump{{0.5, 0.5, 0.5}, 0.3, 0.1, {1, 1, 1}}}, true);
        ConjugatedScheme K(box, mp.c2, A, nullptr);
        PicardReport rep;
        std::vector<cplx> w = picard_iterate_G(E, K, S, {}, &rep);
        CHECK(rep.converged);
        // (K0 + K1) w = S, with K0 w = E^{-1} w back through the multiplier: E(K1 w) + w = E S
        std::vector<cplx> k1w;
        K.apply_k1(w, k1w);
        E.apply(k1w);
        std::vector<cplx> es = S;
        E.apply(es);
        double res = 0.0, ref = 0.0;
        for (std::size_t p = 0; p < w.size(); ++p) {
            res = std::max(res, std::abs(w[p] + k1w[p] - es[p]));
            ref = std::max(ref, std::abs(es[p]));
        }
        MESSAGE("Picard iterations " << rep.iterations << ", relative residual " << res / ref);
        CHECK(res <= 1e-4 * ref);
    }
}

TEST_CASE("GO solution for a small admissible potential") {
    Grid g = grid(16, 32);
    VectorField A = make_admissible_potential(g, {Bump{{0.5, 0.5, 0.5}, 0.35, 0.1, {1, 1, 1}}}, true);
    ScalarSpaceTimeField q = make_scalar_potential(
        g, ScalarRecipe{{Bump{{0.5, 0.5, 0.5}, 0.3, 1.0, {0, 0, 1}}}, TimeProfile::Constant, 0.5, 0.15});
    FrequencyFrame f = build_frame({0, 0, 2 * kPi}, {0, 0, 0}, 8.0, 2);
    MatchedPair mp = match_dispersion(f, g, 0.0);
    GoSolution u = build_go_solution(A, q, f, mp.c2);
    MESSAGE("residual " << u.residual << ", transport residual " << u.transport_residual << ", |w| " << u.w_l2h1);
    CHECK(u.residual <= 1e-4);
    CHECK(u.picard.converged);
    CHECK(u.transport_residual < 0.05);
    CHECK(std::isfinite(u.w_l2h2));

    BoundaryInput in = go_probe(u);
    ComplexField lv0(g);
    u.level(0, lv0);
    CHECK(in.u0.v == lv0.v);
}
