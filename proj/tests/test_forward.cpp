#include "doctest.h"

#include "msr/diffops.hpp"
#include "msr/dtn_io.hpp"
#include "msr/forward.hpp"
#include "msr/mms.hpp"
#include "msr/potentials.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

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

BoundaryInput eigenmode_input(const Grid& g) {
    BoundaryInput in = zero_input(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) {
                Vec3 x = g.x(i, j, k);
                in.u0(i, j, k) = std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]);
            }
    // sin(pi) is not exactly zero in floating point; keep the Dirichlet data exactly zero
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                if (g.on_boundary(i, j, k)) in.u0(i, j, k) = 0.0;
    in.update_compatibility();
    return in;
}

double eigen_lambda(const Grid& g) {
    const double s = std::sin(kPi * g.h() / 2.0);
    return 3.0 * 4.0 / (g.h() * g.h()) * s * s;
}

// f = t^2 (1 + x.(1,2,3)) e^{i t} on Sigma, compatible at t = 0
BoundaryInput face_input(const Grid& g) {
    BoundaryInput in = zero_input(g);
    for (int m = 0; m <= g.Nt; ++m) {
        double t = m * g.dt();
        for (int f = 0; f < 6; ++f)
            for (int b = 0; b <= g.Nx; ++b)
                for (int a = 0; a <= g.Nx; ++a) {
                    std::size_t p = face_node(g, f, a, b);
                    int i = int(p % g.np()), j = int((p / g.np()) % g.np()), k = int(p / (g.np() * g.np()));
                    Vec3 x = g.x(i, j, k);
                    in.f.at(m, f, a, b) = t * t * (1.0 + x[0] + 2 * x[1] + 3 * x[2]) * std::exp(cplx(0.0, t));
                }
    }
    in.update_compatibility();
    return in;
}

struct Medium {
    VectorField A;
    ScalarSpaceTimeField q;
};

Medium medium(const Grid& g) {
    return {make_admissible_potential(g, {Bump{{0.5, 0.5, 0.5}, 0.3, 0.4, {1, 1, 0}}}, false),
            make_scalar_potential(g, ScalarRecipe{{Bump{{0.5, 0.5, 0.5}, 0.3, 1.5, {0, 0, 1}}},
                                                  TimeProfile::SinSquared, 0.5, 0.15})};
}

double record_gap(const DtnRecord& a, const DtnRecord& b, double* scale) {
    double m = 0.0, s = 0.0;
    for (std::size_t p = 0; p < a.final_state.size(); ++p) {
        m = std::max(m, std::abs(a.final_state[p] - b.final_state[p]));
        s = std::max(s, std::abs(a.final_state[p]));
    }
    for (std::size_t p = 0; p < a.trace.v.size(); ++p) {
        m = std::max(m, std::abs(a.trace.v[p] - b.trace.v[p]));
        s = std::max(s, std::abs(a.trace.v[p]));
    }
    *scale = s;
    return m;
}

} // namespace

TEST_CASE("free eigenmode follows the Crank-Nicolson amplification") {
    Grid g = grid(8, 256);
    BoundaryInput in = eigenmode_input(g);
    SpaceTimeSolution s = solve_ibvp(VectorField(g), ScalarSpaceTimeField(g), in);
    const double lam = eigen_lambda(g), dt = g.dt();
    const cplx G = (1.0 - cplx(0, 0.5 * lam * dt)) / (1.0 + cplx(0, 0.5 * lam * dt));
    double e_cn = 0.0, e_exp = 0.0;
    for (int m = 0; m <= g.Nt; ++m) {
        cplx gm = std::pow(G, m), ex = std::exp(cplx(0.0, -lam * m * dt));
        for (std::size_t p = 0; p < g.nodes(); ++p) {
            e_cn = std::max(e_cn, std::abs(s.u.level(m)[p] - gm * in.u0[p]));
            e_exp = std::max(e_exp, std::abs(s.u.level(m)[p] - ex * in.u0[p]));
        }
    }
    const double phase_bound = g.T * std::pow(lam, 3) * dt * dt / 12.0;
    MESSAGE("vs G^m " << e_cn << ", vs exp(-i lam t) " << e_exp << " (bound " << phase_bound << ")");
    CHECK(e_cn <= 1e-8);
    CHECK(e_exp <= 1.05 * phase_bound + 1e-8);
}

TEST_CASE("eigenmode trace on the face x3 = 0") {
    std::vector<double> err;
    for (int Nx : {8, 16}) {
        Grid g = grid(Nx, 16);
        BoundaryInput in = eigenmode_input(g);
        SpaceTimeSolution s = solve_ibvp(VectorField(g), ScalarSpaceTimeField(g), in);
        FaceSeries tr = magnetic_neumann_trace(s, VectorField(g));
        const double lam = eigen_lambda(g), dt = g.dt();
        const cplx G = (1.0 - cplx(0, 0.5 * lam * dt)) / (1.0 + cplx(0, 0.5 * lam * dt));
        double e = 0.0, ref = 0.0;
        for (int m = 0; m <= g.Nt; ++m)
            for (int b = 0; b <= g.Nx; ++b)
                for (int a = 0; a <= g.Nx; ++a) {
                    cplx exact = -kPi * std::pow(G, m) * std::sin(kPi * a * g.h()) * std::sin(kPi * b * g.h());
                    e = std::max(e, std::abs(tr.at(m, 4, a, b) - exact));
                    ref = std::max(ref, std::abs(exact));
                }
        err.push_back(e / ref);
    }
    MESSAGE("relative trace error " << err[0] << " -> " << err[1]);
    CHECK(err[0] < 0.05);
    CHECK(err[0] / err[1] >= 3.0);
}

TEST_CASE("trace of a constant state is i A.nu") {
    Grid g = grid(8, 16);
    VectorField A(g);
    for (int a = 0; a < 3; ++a)
        for (auto& v : A.c[a].v) v = a + 1.0;
    ComplexField one(g, 1.0);
    FaceSeries out(g, 1);
    for (TraceStencil st : {TraceStencil::SecondOrder, TraceStencil::FirstOrder}) {
        neumann_trace_level(one, A, st, out, 0);
        for (int f = 0; f < 6; ++f) {
            double nu = (f % 2) ? 1.0 : -1.0;
            for (int b = 0; b <= g.Nx; ++b)
                for (int a = 0; a <= g.Nx; ++a) CHECK(out.at(0, f, a, b) == cplx(0.0, nu * (f / 2 + 1.0)));
        }
    }
}

TEST_CASE("zero data give the zero solution and record") {
    Grid g = grid(8, 16);
    Medium md = medium(g);
    BoundaryInput in = zero_input(g);
    SpaceTimeSolution s = solve_ibvp(md.A, md.q, in);
    CHECK(s.u.is_zero());
    DtnRecord r = dtn_apply(md.A, md.q, in);
    for (auto a : r.final_state.v) CHECK(a == cplx(0.0));
    for (auto a : r.trace.v) CHECK(a == cplx(0.0));

    EnergyReport e = energy_report(s, in);
    CHECK(e.lhs == 0.0);
    CHECK(e.rhs == 0.0);
    CHECK_FALSE(e.ratio_defined);
    CHECK(std::isnan(e.ratio));
}

TEST_CASE("the DtN map is linear in the probe") {
    Grid g = grid(8, 16);
    Medium md = medium(g);
    BoundaryInput g1 = eigenmode_input(g), g2 = face_input(g);
    CHECK(g2.compat_f0);
    CHECK(g2.compat_dtf0);
    BoundaryInput gs = g1;
    for (std::size_t p = 0; p < gs.u0.size(); ++p) gs.u0[p] += g2.u0[p];
    for (std::size_t p = 0; p < gs.f.v.size(); ++p) gs.f.v[p] += g2.f.v[p];
    gs.update_compatibility();
    DtnOptions opt;
    opt.solver.tol = 1e-12;
    DtnRecord r1 = dtn_apply(md.A, md.q, g1, opt), r2 = dtn_apply(md.A, md.q, g2, opt);
    DtnRecord rs = dtn_apply(md.A, md.q, gs, opt);
    DtnRecord sum = r1;
    for (std::size_t p = 0; p < sum.final_state.size(); ++p) sum.final_state[p] += r2.final_state[p];
    for (std::size_t p = 0; p < sum.trace.v.size(); ++p) sum.trace.v[p] += r2.trace.v[p];
    double scale = 0.0;
    double gap = record_gap(rs, sum, &scale);
    CHECK(gap <= 1e-8 * scale);
}

TEST_CASE("manufactured solutions converge at second order in h and dt") {
    MmsCase c;
    MmsError h8 = mms_space_error(c, 8, 16), h16 = mms_space_error(c, 16, 16);
    MmsError t16 = mms_time_error(c, 8, 16), t32 = mms_time_error(c, 8, 32);
    const double sh = std::log2(h8.error / h16.error), st = std::log2(t16.error / t32.error);
    MESSAGE("h slope " << sh << ", dt slope " << st);
    CHECK(sh >= 1.9);
    CHECK(st >= 1.9);
}

TEST_CASE("real coefficients and homogeneous data conserve the L2 norm") {
    SolverOptions tight;
    tight.tol = 1e-13;
    DriftReport d = l2_drift(MmsCase{}, 8, 32, tight);
    MESSAGE("per-step drift " << d.per_step << ", cumulative " << d.cumulative);
    CHECK(d.per_step <= 1e-10);
    CHECK(d.cumulative <= 1e-10);
}

TEST_CASE("gauge transform of the solution") {
    auto gap = [](int Nx) {
        Grid g = grid(Nx, 16);
        Medium md = medium(g);
        RealField phi(g);
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) {
                    Vec3 x = g.x(i, j, k);
                    phi(i, j, k) = 4.0 * x[0] * (1 - x[0]) * x[1] * (1 - x[1]) * x[2] * (1 - x[2]);
                }
        // (grad + iA)^2 with u -> e^{i phi} u pairs with A -> A - grad phi
        VectorField Ag = md.A, gp = gradient(phi);
        for (int a = 0; a < 3; ++a)
            for (std::size_t p = 0; p < g.nodes(); ++p) Ag.c[a][p] -= gp.c[a][p];
        BoundaryInput in = eigenmode_input(g), ing = in;
        for (std::size_t p = 0; p < g.nodes(); ++p) ing.u0[p] *= std::exp(cplx(0.0, phi[p]));
        SpaceTimeSolution s = solve_ibvp(md.A, md.q, in), sg = solve_ibvp(Ag, md.q, ing);
        double m = 0.0;
        for (int lv = 0; lv <= g.Nt; ++lv)
            for (std::size_t p = 0; p < g.nodes(); ++p)
                m = std::max(m, std::abs(std::exp(cplx(0.0, phi[p])) * s.u.level(lv)[p] - sg.u.level(lv)[p]));
        return m;
    };
    double g8 = gap(8), g16 = gap(16);
    MESSAGE("gauge gap " << g8 << " -> " << g16);
    CHECK(g8 / g16 >= 3.0);
}

TEST_CASE("energy ratio of random probes stays bounded under refinement") {
    std::vector<double> worst;
    for (int Nx : {8, 16}) {
        Grid g = grid(Nx, 16);
        Medium md = medium(g);
        double w = 0.0;
        for (int s = 0; s < 3; ++s) {
            BoundaryInput in = face_input(g);
            for (auto& v : in.f.v) v *= cplx(1.0 + s, 0.5 * s);
            BoundaryInput e = eigenmode_input(g);
            for (std::size_t p = 0; p < in.u0.size(); ++p) in.u0[p] = double(s) * e.u0[p];
            in.update_compatibility();
            EnergyReport r = energy_report(solve_ibvp(md.A, md.q, in), in);
            REQUIRE(r.ratio_defined);
            w = std::max(w, r.ratio);
        }
        worst.push_back(w);
    }
    MESSAGE("max energy ratio " << worst[0] << ", " << worst[1]);
    CHECK(std::isfinite(worst[1]));
    CHECK(worst[1] < 3.0 * worst[0]);
}

TEST_CASE("dtn records round-trip with their probe metadata") {
    Grid g = grid(8, 16);
    Medium md = medium(g);
    DtnRecord r = dtn_apply(md.A, md.q, face_input(g));
    r.meta.sigma = 6.5;
    r.meta.xi = {1, 2, 3};
    r.meta.y = {0.1, 0, -0.2};
    r.meta.side = 1;
    r.meta.label = "probe-a";
    std::string path = (std::filesystem::temp_directory_path() / "msr_test_r.dtn").string();
    write_dtn(path, r);
    DtnRecord b = read_dtn(path);
    CHECK(b.grid == g);
    CHECK(b.meta.sigma == 6.5);
    CHECK(b.meta.xi == r.meta.xi);
    CHECK(b.meta.y == r.meta.y);
    CHECK(b.meta.side == 1);
    CHECK(b.meta.label == "probe-a");
    CHECK(b.final_state.v == r.final_state.v);
    CHECK(b.trace.v == r.trace.v);
    std::filesystem::remove(path);
}

TEST_CASE("compatibility flags reject data that moves at t = 0") {
    Grid g = grid(8, 16);
    BoundaryInput in = face_input(g), lin = zero_input(g), jump = zero_input(g);
    for (int m = 0; m <= g.Nt; ++m) {
        const double t = m * g.dt();
        for (std::size_t p = 0; p < lin.f.face_size(); ++p) {
            lin.f.face(m, 0)[p] = t * std::exp(cplx(0.0, t));
            jump.f.face(m, 0)[p] = 1.0;
        }
    }
    lin.update_compatibility();
    jump.update_compatibility();
    CHECK(in.compat_dtf0);
    CHECK(lin.compat_f0);
    CHECK_FALSE(lin.compat_dtf0);
    CHECK_FALSE(jump.compat_f0);
}
