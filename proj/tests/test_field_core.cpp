#include "doctest.h"

#include "msr/diffops.hpp"
#include "msr/fld_io.hpp"
#include "msr/hodge.hpp"
#include "msr/norms.hpp"
#include "msr/potentials.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace msr;

namespace {

Grid grid(int Nx, int Nt = 16) {
    Grid g;
    g.Nx = Nx;
    g.Nt = Nt;
    g.validate();
    return g;
}

double max_abs(const RealField& f, const Grid& g, int depth = 0) {
    double m = 0.0;
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                if (g.depth_at_least(i, j, k, depth)) m = std::max(m, std::abs(f(i, j, k)));
    return m;
}

std::vector<Bump> two_bumps() {
    return {Bump{{0.4, 0.45, 0.5}, 0.25, 0.3, {1.0, 0.2, -0.4}},
            Bump{{0.62, 0.55, 0.52}, 0.2, 0.2, {-0.3, 1.0, 0.5}}};
}

RealField smooth_scalar(const Grid& g) {
    RealField psi(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) {
                Vec3 x = g.x(i, j, k);
                psi(i, j, k) = std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]) *
                               std::sin(std::numbers::pi * x[2]) * (1.0 + x[0] * x[1]);
            }
    return psi;
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("msr_test_" + name)).string();
}

} // namespace

TEST_CASE("grid rejects meshes too coarse for the stencils") {
    Grid g;
    g.Nx = 4;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.Nx = 16;
    g.Nt = 4;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.Nt = 64;
    g.T = -1.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("empty recipe gives the zero potential") {
    Grid g = grid(8);
    CHECK(make_admissible_potential(g, {}, false).is_zero());
    CHECK(make_admissible_potential(g, {}, true).is_zero());
}

TEST_CASE("single bump peaks at its amplitude and vanishes outside its radius") {
    Grid g = grid(16);
    Bump b{{0.5, 0.5, 0.5}, 0.2, 0.1, {0, 0, 1}};
    VectorField A = make_admissible_potential(g, {b}, false);
    CHECK(A.c[2](8, 8, 8) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(A.max_abs() == doctest::Approx(0.1).epsilon(1e-14));
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) {
                Vec3 x = g.x(i, j, k);
                Vec3 y{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
                if (norm(y) >= 0.2) CHECK(A.at(g.idx(i, j, k)) == Vec3{0, 0, 0});
            }
}

TEST_CASE("bumps touching the boundary are rejected") {
    Grid g = grid(8);
    CHECK_THROWS_AS(make_admissible_potential(g, {Bump{{0.1, 0.5, 0.5}, 0.2, 0.1, {1, 0, 0}}}, false),
                    ConfigError);
    CHECK_THROWS_AS(make_admissible_potential(g, {Bump{{0.5, 0.5, 0.5}, 0.2, 0.1, {0, 0, 0}}}, false),
                    ConfigError);
}

TEST_CASE("divergence-free recipes meet the truncation bound") {
    for (int Nx : {16, 32}) {
        Grid g = grid(Nx);
        VectorField A = make_admissible_potential(g, two_bumps(), true);
        double bound = 4.0 * g.h() * g.h() * recipe_third_derivative_bound(two_bumps(), true);
        CHECK(max_abs(divergence(A), g, 1) <= bound);
    }
}

TEST_CASE("curl and divergence of simple fields") {
    Grid g = grid(16);
    CHECK(curl(VectorField(g)).s[0].v == RealField(g).v);

    VectorField lin(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) lin.c[0](i, j, k) = g.x(i, j, k)[0];
    RealField d = divergence(lin);
    for (int k = 1; k < g.Nx; ++k)
        for (int j = 1; j < g.Nx; ++j)
            for (int i = 1; i < g.Nx; ++i) CHECK(d(i, j, k) == doctest::Approx(1.0).epsilon(1e-12));

    // rotation field times a cutoff that is 1 on the middle of the cube
    auto rot_error = [](int Nx) {
        Grid gg = grid(Nx);
        VectorField A(gg);
        for (int k = 0; k <= gg.Nx; ++k)
            for (int j = 0; j <= gg.Nx; ++j)
                for (int i = 0; i <= gg.Nx; ++i) {
                    Vec3 x = gg.x(i, j, k);
                    Vec3 y{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
                    double chi = bump_profile(norm(y) / 0.45);
                    A.c[0](i, j, k) = -y[1] * chi;
                    A.c[1](i, j, k) = y[0] * chi;
                }
        CurlField c = curl(A);
        double err = 0.0;
        for (int k = 0; k <= gg.Nx; ++k)
            for (int j = 0; j <= gg.Nx; ++j)
                for (int i = 0; i <= gg.Nx; ++i) {
                    Vec3 x = gg.x(i, j, k);
                    Vec3 y{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
                    double r = norm(y) / 0.45;
                    if (r >= 1.0) continue;
                    // analytic d_1 A_2 - d_2 A_1 for (-y2, y1, 0) chi(r)
                    double u = 1.0 - r * r;
                    double dchi = -8.0 * u * u * u / (0.45 * 0.45);  // chi'(r)/r per unit |y|
                    double exact = 2.0 * std::pow(u, 4) + dchi * (y[0] * y[0] + y[1] * y[1]);
                    err = std::max(err, std::abs(c.s[0](i, j, k) - exact));
                }
        return err;
    };
    double e16 = rot_error(16), e32 = rot_error(32);
    CHECK(e32 < e16 / 3.0);
}

TEST_CASE("curl is antisymmetric and annihilates gradients") {
    Grid g = grid(16);
    VectorField A = make_admissible_potential(g, two_bumps(), false);
    CurlField c = curl(A);
    for (std::size_t p = 0; p < g.nodes(); ++p)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(c(a, b, p) + c(b, a, p) == 0.0);

    CurlField cg = curl(gradient(smooth_scalar(g)));
    double m = 0.0;
    for (int k = 2; k <= g.Nx - 2; ++k)
        for (int j = 2; j <= g.Nx - 2; ++j)
            for (int i = 2; i <= g.Nx - 2; ++i)
                for (int s = 0; s < 3; ++s) m = std::max(m, std::abs(cg.s[s](i, j, k)));
    CHECK(m < 1e-12);
}

TEST_CASE("hodge projection of solenoidal, gradient and mixed fields") {
    Grid g = grid(16);
    SUBCASE("solenoidal input is kept") {
        VectorField A = make_admissible_potential(g, two_bumps(), true);
        HodgeResult h = hodge_project(A);
        CHECK(max_abs(h.phi, g) < 1e-10);
        CHECK(h.poisson_residual <= 1e-10);
    }
    SUBCASE("pure gradient is removed to O(h^2)") {
        auto residual = [](int Nx) {
            Grid gg = grid(Nx);
            RealField psi(gg);
            for (int k = 0; k <= gg.Nx; ++k)
                for (int j = 0; j <= gg.Nx; ++j)
                    for (int i = 0; i <= gg.Nx; ++i) {
                        Vec3 x = gg.x(i, j, k);
                        Vec3 y{x[0] - 0.5, x[1] - 0.45, x[2] - 0.5};
                        psi(i, j, k) = bump_profile(norm(y) / 0.35) * (1.0 + x[0] * x[1]);
                    }
            HodgeResult h = hodge_project(gradient(psi));
            double m = 0.0;
            for (int k = 2; k <= gg.Nx - 2; ++k)
                for (int j = 2; j <= gg.Nx - 2; ++j)
                    for (int i = 2; i <= gg.Nx - 2; ++i)
                        for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(h.A_prime.c[a](i, j, k)));
            return m;
        };
        double r16 = residual(16), r32 = residual(32), r64 = residual(64);
        MESSAGE("max |A'| " << r16 << " -> " << r32 << " -> " << r64);
        CHECK(r16 / r32 > 3.0);
        CHECK(r32 / r64 > 3.0);
    }
    SUBCASE("two-bump field: curl kept, divergence removed, decomposition exact") {
        VectorField A = make_admissible_potential(g, two_bumps(), false);
        HodgeResult h = hodge_project(A);
        CurlField c0 = curl(A), c1 = curl(h.A_prime);
        VectorField gp = gradient(h.phi);
        double dc = 0.0, rec = 0.0;
        for (int k = 2; k <= g.Nx - 2; ++k)
            for (int j = 2; j <= g.Nx - 2; ++j)
                for (int i = 2; i <= g.Nx - 2; ++i)
                    for (int s = 0; s < 3; ++s) dc = std::max(dc, std::abs(c0.s[s](i, j, k) - c1.s[s](i, j, k)));
        for (std::size_t p = 0; p < g.nodes(); ++p)
            for (int a = 0; a < 3; ++a) rec = std::max(rec, std::abs(h.A_prime.c[a][p] + gp.c[a][p] - A.c[a][p]));
        CHECK(dc < 1e-12);
        CHECK(rec <= 10.0 * 1e-10 + 1e-14);
        CHECK(std::isfinite(h.ratio_W1inf_over_curl));
        // div A' is a stencil mismatch (wide div-grad against the 7-point Laplacian): O(h^2).
        // The radius-0.2 bump is under-resolved at Nx 16 (ratio 2.4 there), so refine from 32.
        HodgeResult h32 = hodge_project(make_admissible_potential(grid(32), two_bumps(), false));
        HodgeResult h64 = hodge_project(make_admissible_potential(grid(64), two_bumps(), false));
        MESSAGE("max div A' " << h.max_div << " -> " << h32.max_div << " -> " << h64.max_div);
        CHECK(h.max_div > h32.max_div);
        CHECK(h32.max_div / h64.max_div > 3.0);
    }
}

TEST_CASE("gauge conjugation residual") {
    auto fixture = [](int Nx, bool zero_phi, bool zero_u) {
        Grid g = grid(Nx);
        VectorField A(g);
        RealField phi(g);
        ComplexField u(g);
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) {
                    Vec3 x = g.x(i, j, k);
                    Vec3 y{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
                    phi(i, j, k) = zero_phi ? 0.0 : x[0] * (1 - x[0]) * x[1] * (1 - x[1]) * x[2] * (1 - x[2]) * 8.0;
                    u(i, j, k) = zero_u ? 0.0 : std::exp(-dot(y, y) / 0.05) * cplx(1.0, 0.5);
                }
        return gauge_conjugation_residual(A, phi, u);
    };
    CHECK(fixture(16, true, false) < 1e-12);
    CHECK(fixture(16, false, true) == 0.0);
    double r16 = fixture(16, false, false), r32 = fixture(32, false, false);
    CHECK(r16 / r32 > 3.0);
}

TEST_CASE("discrete norms: zero, constants, single modes, homogeneity") {
    Grid g = grid(16);
    ComplexField z(g);
    for (NormId id : {NormId::L2, NormId::Linf, NormId::W1inf, NormId::Hminus1}) CHECK(discrete_norm(z, id) == 0.0);

    RealField c(g, -2.5);
    CHECK(discrete_norm(c, NormId::Linf) == 2.5);

    const std::array<int, 3> kk{1, -2, 3};
    ComplexField mode(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) {
                Vec3 x = g.x(i, j, k);
                mode(i, j, k) = std::exp(cplx(0.0, 2.0 * std::numbers::pi * (kk[0] * x[0] + kk[1] * x[1] + kk[2] * x[2])));
            }
    const double k2 = 4.0 * std::numbers::pi * std::numbers::pi * 14.0;
    CHECK(discrete_norm(mode, NormId::L2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(discrete_norm(mode, NormId::Hminus1) == doctest::Approx(1.0 / std::sqrt(1.0 + k2)).epsilon(1e-12));

    RealField f = smooth_scalar(g);
    RealField f3 = f;
    for (auto& a : f3.v) a *= -3.0;
    for (NormId id : {NormId::L2, NormId::Linf, NormId::W1inf, NormId::Hminus1})
        CHECK(discrete_norm(f3, id) == doctest::Approx(3.0 * discrete_norm(f, id)).epsilon(1e-12));
    CHECK_THROWS_AS(parse_norm_id("H7"), ConfigError);
}

TEST_CASE("ratio of W1inf to curl over random solenoidal fields stays bounded") {
    Grid g = grid(16);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Bump> r;
        int nb = 1 + trial % 3;
        for (int b = 0; b < nb; ++b) {
            double rad = 0.15 + 0.15 * U(rng);
            Vec3 c;
            for (double& x : c) x = rad + 0.15 + (0.7 - 2 * rad) * U(rng);
            r.push_back(Bump{c, rad, 0.05 + 0.2 * U(rng), {U(rng) - 0.5, U(rng) - 0.5, U(rng) - 0.5}});
        }
        VectorField A = make_admissible_potential(g, r, true);
        double ratio = discrete_norm(A, NormId::W1inf) / discrete_norm(curl(A), NormId::Linf);
        worst = std::max(worst, ratio);
    }
    MESSAGE("max ratio " << worst);
    CHECK(worst < 100.0);
}

TEST_CASE("fld files round-trip every field kind") {
    Grid g = grid(8, 16);
    VectorField A = make_admissible_potential(g, two_bumps(), false);
    std::string pv = tmp_path("A.fld");
    write_fld(pv, A);
    CHECK(fld_kind(pv) == "vector");
    VectorField B = read_fld_vector(pv);
    CHECK(B.grid == g);
    for (int a = 0; a < 3; ++a) CHECK(B.c[a].v == A.c[a].v);

    CurlField c = curl(A);
    std::string pc = tmp_path("c.fld");
    write_fld(pc, c);
    CurlField c2 = read_fld_curl(pc);
    for (int s = 0; s < 3; ++s) CHECK(c2.s[s].v == c.s[s].v);

    ScalarRecipe rq{{Bump{{0.5, 0.5, 0.5}, 0.3, 1.0, {0, 0, 1}}}, TimeProfile::Gaussian, 0.4, 0.2};
    ScalarSpaceTimeField q = make_scalar_potential(g, rq);
    std::string pq = tmp_path("q.fld");
    write_fld(pq, q);
    ScalarSpaceTimeField q2 = read_fld_spacetime(pq);
    CHECK(q2.v == q.v);
    CHECK_THROWS(read_fld_vector(pq));
    std::filesystem::remove(pv);
    std::filesystem::remove(pc);
    std::filesystem::remove(pq);
}
