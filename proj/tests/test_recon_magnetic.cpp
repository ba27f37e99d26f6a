#include "doctest.h"

#include "msr/checks.hpp"
#include "msr/functional.hpp"
#include "msr/recon_magnetic.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace msr;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ExperimentConfig small_config(int Nx, int Nt) {
    ExperimentConfig c;
    c.grid.Nx = Nx;
    c.grid.Nt = Nt;
    c.grid.validate();
    return c;
}

Vec3 xi_of(const std::array<int, 3>& k) { return {kTwoPi * k[0], kTwoPi * k[1], kTwoPi * k[2]}; }

double max_abs(const CurlField& c) {
    double m = 0.0;
    for (const auto& s : c.s)
        for (double v : s.v) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST_CASE("cutoff radius") {
    CHECK(choose_cutoff(128.0, 3) == 4.0);
    CHECK(choose_cutoff(1.0, 3) == 1.0);
    CHECK(choose_cutoff(16.0, 4) == 2.0);
    CHECK(choose_cutoff(8.0, 3) == doctest::Approx(std::pow(8.0, 2.0 / 7.0)).epsilon(1e-15));
}

TEST_CASE("half lattice keeps one member of each +/- pair") {
    CHECK(half_lattice(0.5 * kTwoPi).empty());
    CHECK(half_lattice(1.01 * kTwoPi).size() == 3);
    CHECK(half_lattice(std::sqrt(2.0) * 1.001 * kTwoPi).size() == 9);
    CHECK(half_lattice(std::sqrt(3.0) * 1.001 * kTwoPi).size() == 13);
    auto ks = half_lattice(2.5 * kTwoPi);
    std::set<std::array<int, 3>> seen(ks.begin(), ks.end());
    CHECK(seen.size() == ks.size());
    for (const auto& k : ks) {
        CHECK(seen.count({-k[0], -k[1], -k[2]}) == 0);
        CHECK(norm(xi_of(k)) <= 2.5 * kTwoPi);
    }
}

TEST_CASE("best component pair maximises the cross term") {
    CHECK(best_pair({kTwoPi, 0, 0}) == std::array<int, 2>{0, 1});
    CHECK(best_pair({0, 0, kTwoPi}) == std::array<int, 2>{0, 2});
    auto p = best_pair({0, kTwoPi, 2 * kTwoPi});
    CHECK(p == std::array<int, 2>{1, 2});
}

TEST_CASE("low-pass inversion of zero and of exact band-limited samples") {
    Grid g;
    g.Nx = 16;
    g.Nt = 16;
    const double R = std::sqrt(3.0) * 1.001 * kTwoPi;
    FourierSampleSet zero;
    for (const auto& k : half_lattice(R)) {
        CurlSample s;
        s.k = k;
        s.xi = xi_of(k);
        zero.samples.push_back(s);
    }
    CHECK(max_abs(invert_lowpass(zero, R, g)) == 0.0);

    // synthesise a band-limited field, take its oracle spectrum and invert again
    FourierSampleSet set = zero;
    int n = 0;
    for (auto& s : set.samples) {
        ++n;
        s.value = {cplx(0.3 / n, 0.1 * n), cplx(-0.2, 0.05 * n), cplx(0.1 * n, -0.4 / n)};
    }
    CurlField field = invert_lowpass(set, R, g);
    FourierSampleSet meas = zero;
    for (auto& s : meas.samples) s.value = curl_oracle(field, s.xi);
    double vdiff = 0.0;
    for (std::size_t i = 0; i < set.samples.size(); ++i)
        for (int c = 0; c < 3; ++c) vdiff = std::max(vdiff, std::abs(meas.samples[i].value[c] - set.samples[i].value[c]));
    CHECK(vdiff <= 1e-12);
    CurlField again = invert_lowpass(meas, R, g);
    double d = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < g.nodes(); ++p) d = std::max(d, std::abs(again.s[c][p] - field.s[c][p]));
    CHECK(d <= 1e-10);
    CHECK(spectral_error(meas, field) <= 1e-10);
}

TEST_CASE("identical media give vanishing functionals and samples") {
    ExperimentConfig cfg = small_config(8, 16);
    CoefficientPair p = magnetic_pair(cfg);
    CoefficientPair same = p;
    same.A2 = same.A1;
    SimulatedOracle oracle(same);
    FrequencyFrame f2 = build_frame({kTwoPi, 0, 0}, {0, 0, 0}, 6.0, 2);
    ProbeResult r = run_probe(oracle, same, f2, 0.0, {}, {});
    CHECK(std::abs(r.functional) <= 1e-8 * r.probe_norm * std::max(1.0, r.carrier_norm));
    CurlSample s = curl_fourier_sample_all(oracle, same, {kTwoPi, 0, 0}, 6.0, 0, 1);
    for (cplx v : s.value) CHECK(std::abs(v) <= 1e-6);
}

TEST_CASE("boundary functional equals the volume pairing and vanishes for u1 = 0") {
    ExperimentConfig cfg = small_config(8, 16);
    CoefficientPair p = magnetic_pair(cfg);
    const Grid& g = p.grid();
    SimulatedOracle oracle(p);
    FrequencyFrame f2 = build_frame({kTwoPi, 0, 0}, {0, 0, 0}, 5.0, 2);
    FrequencyFrame f1 = f2;
    f1.side = 1;
    MatchedPair mp = match_dispersion(f2, g, 0.0);
    GoSolution u2 = build_go_solution(p.A2, p.q2, f2, mp.c2);
    GoSolution u1 = build_go_solution(p.A1, p.q1, f1, mp.c1);
    DtnRecord d = oracle.difference(go_probe(u2), probe_meta(u2));

    ComplexSpaceTimeField zero(g);
    CHECK(boundary_functional(d, zero) == cplx(0.0));

    cplx b = boundary_functional(d, u1);
    cplx v = volume_pairing(p.A1, p.q1, p.A2, p.q2, u2.field(), u1.field());
    MESSAGE("boundary " << b << ", volume " << v);
    CHECK(std::abs(b - v) <= 0.05 * std::abs(v));
}

TEST_CASE("magnetic samples track the curl oracle at one frequency") {
    ExperimentConfig cfg = small_config(16, 64);
    CoefficientPair p = magnetic_pair(cfg);
    SimulatedOracle oracle(p);
    const Vec3 xi{kTwoPi, 0, 0};
    auto jk = best_pair(xi);
    CurlSample s = curl_fourier_sample_all(oracle, p, xi, 8.0, jk[0], jk[1]);
    CurlHat o = curl_oracle(curl_difference(p), xi);
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c) {
        num = std::max(num, std::abs(s.value[c] - o[c]));
        den = std::max(den, std::abs(o[c]));
    }
    MESSAGE("relative sample error " << num / den);
    CHECK(num / den <= 0.15);

    // the recovered matrix is antisymmetric by construction of the gauge row
    const double h = p.grid().h();
    cplx xh[3];
    for (int j = 0; j < 3; ++j) xh[j] = std::sin(xi[j] * h) / h;
    cplx gauge = xh[0] * s.a_hat[0] + xh[1] * s.a_hat[1] + xh[2] * s.a_hat[2];
    CHECK(std::abs(gauge) <= 1e-10 * std::max(1.0, std::abs(s.a_hat[0]) + std::abs(s.a_hat[1]) + std::abs(s.a_hat[2])));
}

TEST_CASE("magnetic sweep schedule") {
    MagneticSweepConfig c;
    CHECK(sweep_sigma(c, 0.0) == c.sigma_cap);
    double prev = 0.0;
    for (double eta : {1e-1, 1e-2, 1e-3, 1e-4}) {
        double s = sweep_sigma(c, eta);
        CHECK(s >= c.sigma_min);
        CHECK(s <= c.sigma_cap);
        CHECK(s >= prev);
        prev = s;
        CHECK(sweep_radius(c, s) < 2.0 * s);
    }
}
