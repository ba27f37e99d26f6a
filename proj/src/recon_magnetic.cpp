#include "msr/recon_magnetic.hpp"
#include "msr/diffops.hpp"
#include "msr/norms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace msr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CurlHat curl_from_potential(const CVec3& a, const Vec3& xh) {
    const cplx I(0.0, 1.0);
    return {I * (xh[0] * a[1] - xh[1] * a[0]), I * (xh[0] * a[2] - xh[2] * a[0]), I * (xh[1] * a[2] - xh[2] * a[1])};
}

Vec3 xi_of(const std::array<int, 3>& k) { return {kTwoPi * k[0], kTwoPi * k[1], kTwoPi * k[2]}; }

} // namespace

std::array<int, 2> best_pair(const Vec3& xi) {
    std::array<int, 2> best{0, 1};
    double bn = -1.0;
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k) {
            double nn = std::hypot(xi[j], xi[k]);
            if (nn > bn) {
                bn = nn;
                best = {j, k};
            }
        }
    return best;
}

CurlSample curl_fourier_sample_all(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                                   const Vec3& xi, double sigma, int j, int k, const CurlSampleOptions& opt,
                                   const NoisePlan& noise) {
    const Grid& g = model.grid();
    if (j == k || j < 0 || k < 0 || j > 2 || k > 2) throw ConfigError("curl sample: bad component pair");
    const double nn = std::hypot(xi[j], xi[k]);
    if (nn <= 1e-8) throw ConfigError("curl sample: xi_j e_k - xi_k e_j vanishes for this pair");
    if (sigma <= norm(xi) / 2.0) throw ConfigError("curl sample: needs sigma > |xi|/2");

    RVec wI(3, 0.0);
    wI[k] = xi[j] / nn;
    wI[j] = -xi[k] / nn;
    const RVec x{xi[0], xi[1], xi[2]};
    const double h = g.h();

    CurlSample out;
    out.xi = xi;
    out.sigma = sigma;
    for (int a = 0; a < 3; ++a) out.k[a] = int(std::lround(xi[a] / kTwoPi));

    Eigen::Matrix3cd M;
    const std::size_t ne = noise.etas.size();
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(3, 1 + ne);
    for (int s = 0; s < 2; ++s) {
        FrequencyFrame fr = build_frame_with_im(x, {0, 0, 0}, sigma, 2, wI);
        if (s == 1)
            for (auto& c : fr.wR) c = -c;
        NoisePlan np = noise;
        np.job = 2 * noise.job + s;
        ProbeResult pr = run_probe(oracle, model, fr, 0.0, opt.probe, np);
        const cplx teff = g.T * (1.0 + pr.pair.c2.G) * (1.0 + std::conj(pr.pair.c1.G)) / 4.0;
        for (int a = 0; a < 3; ++a) {
            cplx c = 0.5 * (pr.pair.c2.rho[a] + std::conj(pr.pair.c1.rho[a]));
            M(s, a) = 2.0 * std::cos(xi[a] * h / 2.0) * std::sin(c * h) / h;
        }
        rhs(s, 0) = pr.functional / teff;
        for (std::size_t e = 0; e < ne; ++e) rhs(s, 1 + e) = pr.noisy[e] / teff;
        out.diag.leading_abs[s] = std::abs(rhs(s, 0));
        out.diag.carrier_norm = std::max(out.diag.carrier_norm, pr.carrier_norm);
        out.diag.probe_norm = std::max(out.diag.probe_norm, pr.probe_norm);
        out.diag.dtn_opnorm = std::max(out.diag.dtn_opnorm, pr.dtn_opnorm);
        out.diag.go_residual = std::max({out.diag.go_residual, pr.u1_residual, pr.u2_residual});
        out.diag.w_norm = std::max({out.diag.w_norm, pr.u1_w, pr.u2_w});
    }
    Vec3 xh;
    for (int a = 0; a < 3; ++a) {
        xh[a] = std::sin(xi[a] * h) / h;
        M(2, a) = xh[a];
    }
    Eigen::FullPivLU<Eigen::Matrix3cd> lu(M);
    if (!lu.isInvertible()) throw StageError("curl sample: singular directional system");
    Eigen::MatrixXcd sol = lu.solve(rhs);

    for (int a = 0; a < 3; ++a) out.a_hat[a] = sol(a, 0);
    // minimum-norm fit of the two probe rows alone, to report how far it is from the gauge
    Eigen::Matrix<cplx, 2, 3> M2 = M.topRows<2>();
    Eigen::Vector3cd free = M2.completeOrthogonalDecomposition().solve(rhs.block<2, 1>(0, 0));
    out.diag.gauge_abs = std::abs(xh[0] * free(0) + xh[1] * free(1) + xh[2] * free(2));

    out.value = curl_from_potential(out.a_hat, xh);
    out.noisy.resize(ne);
    for (std::size_t e = 0; e < ne; ++e)
        out.noisy[e] = curl_from_potential({sol(0, 1 + e), sol(1, 1 + e), sol(2, 1 + e)}, xh);
    return out;
}

cplx curl_fourier_sample(const DtnDifferenceOracle& oracle, const CoefficientPair& model, const Vec3& xi,
                         double sigma, int j, int k, const CurlSampleOptions& opt) {
    CurlSample s = curl_fourier_sample_all(oracle, model, xi, sigma, j, k, opt);
    int a = std::min(j, k), b = std::max(j, k);
    cplx v = s.value[CurlField::slot(a, b)];
    return j < k ? v : -v;
}

double choose_cutoff(double sigma, int n) {
    if (!(sigma > 0.0)) throw ConfigError("choose_cutoff: sigma must be positive");
    if (n < 1) throw ConfigError("choose_cutoff: bad dimension");
    const int p = n + 4;
    double R = std::pow(sigma, 2.0 / p);
    // one Newton step on R^p = sigma^2 removes the rounding of pow (exact powers come out exact)
    double Rp1 = std::pow(R, p - 1);
    return R - (Rp1 * R - sigma * sigma) / (p * Rp1);
}

std::vector<std::array<int, 3>> half_lattice(double R) {
    std::vector<std::array<int, 3>> out;
    const int K = int(std::floor(R / kTwoPi)) + 1;
    for (int c = -K; c <= K; ++c)
        for (int b = -K; b <= K; ++b)
            for (int a = -K; a <= K; ++a) {
                std::array<int, 3> k{a, b, c};
                if (norm(xi_of(k)) > R) continue;
                // first nonzero index positive
                int lead = a != 0 ? a : (b != 0 ? b : c);
                if (lead <= 0) continue;
                out.push_back(k);
            }
    return out;
}

FourierSampleSet sample_curl_lattice(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                                     double sigma, double R, const LatticeSampleOptions& opt,
                                     const NoisePlan& noise) {
    FourierSampleSet set;
    set.R = R;
    set.sigma = sigma;
    set.etas = noise.etas;
    auto ks = half_lattice(R);
    set.samples.resize(ks.size());
    parallel_for_indexed(ks.size(), opt.jobs, [&](std::size_t i) {
        Vec3 xi = xi_of(ks[i]);
        auto jk = best_pair(xi);
        NoisePlan np = noise;
        np.job = i;
        set.samples[i] = curl_fourier_sample_all(oracle, model, xi, sigma, jk[0], jk[1], opt.sample, np);
    });
    return set;
}

FourierSampleSet select_noise(const FourierSampleSet& s, std::size_t e) {
    FourierSampleSet out = s;
    for (auto& x : out.samples) {
        if (e >= x.noisy.size()) throw ConfigError("select_noise: no such noise level");
        x.value = x.noisy[e];
    }
    out.etas = {s.etas.at(e)};
    return out;
}

CurlField invert_lowpass(const FourierSampleSet& s, double R, const Grid& g) {
    CurlField out(g);
    std::vector<std::array<double, 3>> acc(g.nodes(), {0.0, 0.0, 0.0});
    for (const auto& x : s.samples) {
        for (int a = 0; a < 3; ++a) {
            double r = x.xi[a] / kTwoPi;
            if (std::abs(r - std::round(r)) > 1e-9)
                throw ConfigError("invert_lowpass: sample off the 2 pi lattice");
        }
        if (norm(x.xi) > R) continue;
        if (x.xi[0] == 0.0 && x.xi[1] == 0.0 && x.xi[2] == 0.0) continue;
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) {
                    Vec3 p = g.x(i, j, k);
                    double ph = (p[0] - 0.5) * x.xi[0] + (p[1] - 0.5) * x.xi[1] + (p[2] - 0.5) * x.xi[2];
                    cplx e = std::exp(cplx(0.0, ph));
                    auto& o = acc[g.idx(i, j, k)];
                    // the sample and its conjugate partner at -xi
                    for (int c = 0; c < 3; ++c) o[c] += 2.0 * (x.value[c] * e).real();
                }
    }
    for (std::size_t p = 0; p < g.nodes(); ++p)
        for (int c = 0; c < 3; ++c) out.s[c][p] = acc[p][c];
    return out;
}

CurlHat curl_oracle(const CurlField& c, const Vec3& xi) {
    const Grid& g = c.grid;
    CurlHat o{0.0, 0.0, 0.0};
    // periodic cell: the x = 1 faces are the x = 0 faces again
    for (int k = 0; k < g.Nx; ++k)
        for (int j = 0; j < g.Nx; ++j)
            for (int i = 0; i < g.Nx; ++i) {
                Vec3 p = g.x(i, j, k);
                double ph = (p[0] - 0.5) * xi[0] + (p[1] - 0.5) * xi[1] + (p[2] - 0.5) * xi[2];
                cplx e = std::exp(cplx(0.0, -ph));
                std::size_t q = g.idx(i, j, k);
                for (int a = 0; a < 3; ++a) o[a] += c.s[a][q] * e;
            }
    const double w = std::pow(g.h(), 3);
    for (auto& z : o) z *= w;
    return o;
}

CVec3 potential_oracle(const VectorField& A, const Vec3& xi) {
    const Grid& g = A.grid;
    CVec3 o{0.0, 0.0, 0.0};
    // periodic cell: the x = 1 faces are the x = 0 faces again
    for (int k = 0; k < g.Nx; ++k)
        for (int j = 0; j < g.Nx; ++j)
            for (int i = 0; i < g.Nx; ++i) {
                Vec3 p = g.x(i, j, k);
                double ph = (p[0] - 0.5) * xi[0] + (p[1] - 0.5) * xi[1] + (p[2] - 0.5) * xi[2];
                cplx e = std::exp(cplx(0.0, -ph));
                std::size_t q = g.idx(i, j, k);
                for (int a = 0; a < 3; ++a) o[a] += A.c[a][q] * e;
            }
    const double w = std::pow(g.h(), 3);
    for (auto& z : o) z *= w;
    return o;
}

double spectral_error(const FourierSampleSet& s, const CurlField& truth) {
    double num = 0.0, den = 0.0;
    for (const auto& x : s.samples) {
        CurlHat o = curl_oracle(truth, x.xi);
        for (int a = 0; a < 3; ++a) {
            num += std::norm(x.value[a] - o[a]);
            den += std::norm(o[a]);
        }
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

CurlErrors curl_errors(const CurlField& rec, const CurlField& truth) {
    CurlField d(truth.grid);
    double dm = 0.0, tm = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < truth.grid.nodes(); ++p) {
            d.s[c][p] = rec.s[c][p] - truth.s[c][p];
            dm = std::max(dm, std::abs(d.s[c][p]));
            tm = std::max(tm, std::abs(truth.s[c][p]));
        }
    CurlErrors e;
    double th = discrete_norm(truth, NormId::Hminus1);
    double dh = discrete_norm(d, NormId::Hminus1);
    e.hminus1 = th > 0.0 ? dh / th : dh;
    e.linf = tm > 0.0 ? dm / tm : dm;
    return e;
}

CurlField curl_difference(const CoefficientPair& c) {
    CurlField a = curl(c.A1), b = curl(c.A2);
    for (int s = 0; s < 3; ++s)
        for (std::size_t p = 0; p < a.grid.nodes(); ++p) a.s[s][p] -= b.s[s][p];
    return a;
}

double sweep_sigma(const MagneticSweepConfig& c, double eta) {
    if (eta < 0.0) throw ConfigError("eta must be >= 0");
    if (eta == 0.0) return c.sigma_cap;
    return std::clamp(c.c_sigma * std::abs(std::log(eta)), c.sigma_min, c.sigma_cap);
}

double sweep_radius(const MagneticSweepConfig& c, double sigma) {
    return std::min(c.c_R * choose_cutoff(sigma, 3), 2.0 * sigma * c.xi_margin);
}

std::vector<MagneticSweepRow> stability_sweep_magnetic(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                                                       const MagneticSweepConfig& c) {
    const Grid& g = model.grid();
    const CurlField truth = curl_difference(model);
    std::map<double, std::vector<std::size_t>> by_sigma;
    for (std::size_t i = 0; i < c.etas.size(); ++i) by_sigma[sweep_sigma(c, c.etas[i])].push_back(i);

    std::vector<MagneticSweepRow> rows(c.etas.size());
    for (const auto& [sigma, idx] : by_sigma) {
        const double R = sweep_radius(c, sigma);
        NoisePlan np;
        np.seed = c.seed;
        np.etas.push_back(0.0);
        for (std::size_t i : idx) np.etas.push_back(c.etas[i]);
        LatticeSampleOptions lo;
        lo.sample = c.sample;
        lo.jobs = c.jobs;
        FourierSampleSet set = sample_curl_lattice(oracle, model, sigma, R, lo, np);
        const CurlErrors floor = curl_errors(invert_lowpass(set, R, g), truth);
        for (std::size_t e = 0; e < idx.size(); ++e) {
            CurlErrors er = curl_errors(invert_lowpass(select_noise(set, e + 1), R, g), truth);
            MagneticSweepRow& r = rows[idx[e]];
            r.eta = c.etas[idx[e]];
            r.sigma = sigma;
            r.R = R;
            r.err_hminus1 = er.hminus1;
            r.err_linf = er.linf;
            r.floor_flag = std::abs(er.hminus1 - floor.hminus1) <= c.floor_tol * floor.hminus1;
        }
    }
    return rows;
}

} // namespace msr
