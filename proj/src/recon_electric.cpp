#include "msr/recon_electric.hpp"
#include "msr/fft.hpp"
#include "msr/fit.hpp"
#include "msr/norms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace msr {

namespace {

constexpr double kPi = std::numbers::pi;

// first nonzero entry of (k, m) positive
bool leads_positive(const std::array<int, 3>& k, int m) {
    for (int a : k)
        if (a != 0) return a > 0;
    return m > 0;
}

double st_norm(const ConePoint& p) { return std::sqrt(dot(p.xi, p.xi) + p.tau * p.tau); }

bool in_cone(const ConePoint& p, double alpha) {
    const double nx = norm(p.xi);
    return nx > 0.0 && nx < 2.0 * alpha && std::abs(p.tau) < 2.0 * nx;
}

template <class Keep>
std::vector<ConePoint> scan_lattice(const Grid& g, double reach, bool half, Keep keep) {
    std::vector<ConePoint> out;
    const int K = int(std::ceil(reach / lattice_xi_step())) + 1;
    const int Mm = int(std::ceil(reach / lattice_tau_step(g))) + 1;
    for (int c = -K; c <= K; ++c)
        for (int b = -K; b <= K; ++b)
            for (int a = -K; a <= K; ++a)
                for (int m = -Mm; m <= Mm; ++m) {
                    std::array<int, 3> k{a, b, c};
                    if (half && !(leads_positive(k, m) || (a == 0 && b == 0 && c == 0 && m == 0))) continue;
                    ConePoint p = lattice_point(g, k, m);
                    if (keep(p)) out.push_back(p);
                }
    return out;
}

} // namespace

double lattice_xi_step() { return kPi; }
double lattice_tau_step(const Grid& g) { return kPi / g.T; }

ConePoint lattice_point(const Grid& g, const std::array<int, 3>& k, int m) {
    ConePoint p;
    p.k = k;
    p.m = m;
    for (int a = 0; a < 3; ++a) p.xi[a] = lattice_xi_step() * k[a];
    p.tau = lattice_tau_step(g) * m;
    return p;
}

FrequencyCone build_cone_lattice(double alpha, const Grid& g) {
    if (!(alpha > 0.0)) throw ConfigError("cone: alpha must be positive");
    FrequencyCone c;
    c.alpha = alpha;
    // |tau| < 2|xi| < 4 alpha
    c.points = scan_lattice(g, 4.0 * alpha, false, [&](const ConePoint& p) { return in_cone(p, alpha); });
    c.empty = c.points.empty();
    return c;
}

std::vector<ConePoint> half_cone(double alpha, double radius, const Grid& g) {
    return scan_lattice(g, std::max(radius, 4.0 * alpha), true, [&](const ConePoint& p) {
        return in_cone(p, alpha) && st_norm(p) < radius;
    });
}

std::vector<ConePoint> half_ball(double alpha, const Grid& g) {
    return scan_lattice(g, alpha, true, [&](const ConePoint& p) { return st_norm(p) < alpha; });
}

Vec3 cone_y(const Vec3& xi, double tau) {
    const double n2 = dot(xi, xi);
    if (n2 == 0.0) throw ConfigError("cone point needs xi != 0");
    Vec3 y;
    for (int a = 0; a < 3; ++a) y[a] = tau * xi[a] / (2.0 * n2);
    if (norm(y) >= 1.0) throw ConfigError("cone point violates |y| < 1 (|tau| >= 2|xi|)");
    return y;
}

QSample q_fourier_sample(const DtnDifferenceOracle& oracle, const CoefficientPair& model, const ConePoint& pt,
                         double sigma, const ProbeOptions& opt, const NoisePlan& noise) {
    const Grid& g = model.grid();
    QSample s;
    s.pt = pt;
    s.sigma = sigma;
    s.y = cone_y(pt.xi, pt.tau);
    if (sigma <= norm(pt.xi) / 2.0) throw ConfigError("q sample: needs sigma > |xi|/2");
    FrequencyFrame fr = build_frame({pt.xi[0], pt.xi[1], pt.xi[2]}, {s.y[0], s.y[1], s.y[2]}, sigma, 2);
    ProbeResult pr = run_probe(oracle, model, fr, pt.tau, opt, noise);
    const cplx nrm = (1.0 + pr.pair.c2.G) * (1.0 + std::conj(pr.pair.c1.G)) / 4.0 *
                     std::exp(cplx(0.0, pt.tau * g.dt() / 2.0));
    s.value = pr.functional / nrm;
    for (const cplx& f : pr.noisy) s.noisy.push_back(f / nrm);
    s.diag.p1_inputs = std::max(model.A1.max_abs(), model.A2.max_abs()) + norm(pt.xi) / sigma;
    s.diag.p2_inputs = 1.0 / sigma;
    s.diag.carrier_norm = pr.carrier_norm;
    s.diag.probe_norm = pr.probe_norm;
    s.diag.dtn_opnorm = pr.dtn_opnorm;
    s.diag.go_residual = std::max(pr.u1_residual, pr.u2_residual);
    s.diag.w_norm = std::max(pr.u1_w, pr.u2_w);
    s.diag.zeta = pr.pair.zeta;
    return s;
}

QSampleSet sample_cone(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                       const std::vector<ConePoint>& pts, double sigma, const ProbeOptions& opt, int jobs,
                       const NoisePlan& noise) {
    QSampleSet set;
    set.sigma = sigma;
    set.etas = noise.etas;
    set.samples.resize(pts.size());
    parallel_for_indexed(pts.size(), jobs, [&](std::size_t i) {
        NoisePlan np = noise;
        np.job = i;
        set.samples[i] = q_fourier_sample(oracle, model, pts[i], sigma, opt, np);
    });
    return set;
}

QSampleSet select_noise(const QSampleSet& s, std::size_t e) {
    QSampleSet out = s;
    for (auto& x : out.samples) {
        if (e >= x.noisy.size()) throw ConfigError("select_noise: no such noise level");
        x.value = x.noisy[e];
    }
    out.etas = {s.etas.at(e)};
    return out;
}

std::vector<std::array<int, 4>> monomials(int d) {
    std::vector<std::array<int, 4>> out;
    for (int t = 0; t <= d; ++t)
        for (int a = t; a >= 0; --a)
            for (int b = t - a; b >= 0; --b)
                for (int c = t - a - b; c >= 0; --c) out.push_back({a, b, c, t - a - b - c});
    return out;
}

namespace {

double monomial(const std::array<int, 4>& e, const std::array<double, 4>& z) {
    double v = 1.0;
    for (int a = 0; a < 4; ++a) v *= std::pow(z[a], e[a]);
    return v;
}

std::array<double, 4> scaled(const ConePoint& p, double alpha, double sign = 1.0) {
    return {sign * p.xi[0] / alpha, sign * p.xi[1] / alpha, sign * p.xi[2] / alpha, sign * p.tau / alpha};
}

} // namespace

Extension extend_to_ball(const QSampleSet& s, double alpha, int degree, const Grid& g, int max_degree) {
    if (s.samples.empty()) throw ConfigError("extend_to_ball: no samples");
    if (degree < 0 || degree > max_degree) {
        std::ostringstream os;
        os << "extend_to_ball: degree " << degree << " outside [0, " << max_degree << "]";
        throw ConfigError(os.str());
    }
    Extension ex;
    ex.requested_degree = degree;
    const std::size_t n = 2 * s.samples.size();
    Eigen::VectorXcd v(n);
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        v(2 * i) = s.samples[i].value;
        v(2 * i + 1) = std::conj(s.samples[i].value);
    }
    for (int d = degree; d >= 0; --d) {
        auto ms = monomials(d);
        const std::size_t p = ms.size();
        Eigen::MatrixXd X(n, p);
        for (std::size_t i = 0; i < s.samples.size(); ++i) {
            auto zp = scaled(s.samples[i].pt, alpha), zm = scaled(s.samples[i].pt, alpha, -1.0);
            for (std::size_t c = 0; c < p; ++c) {
                X(2 * i, c) = monomial(ms[c], zp);
                X(2 * i + 1, c) = monomial(ms[c], zm);
            }
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        qr.setThreshold(1e-10);
        if (n < p || qr.rank() < Eigen::Index(p)) {
            std::ostringstream os;
            os << "degree " << d << " design has rank " << qr.rank() << " < " << p << "; lowering the degree";
            ex.warnings.push_back(os.str());
            continue;
        }
        Eigen::VectorXd cr = qr.solve(v.real()), ci = qr.solve(v.imag());
        Eigen::VectorXcd coef(p);
        for (std::size_t c = 0; c < p; ++c) coef(c) = cplx(cr(c), ci(c));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
        const auto& sv = svd.singularValues();
        ex.condition = sv(0) / sv(sv.size() - 1);
        Eigen::VectorXcd r = X.cast<cplx>() * coef - v;
        const double vn = v.norm();
        ex.fit_residual = vn > 0.0 ? r.norm() / vn : r.norm();
        ex.degree = d;
        ex.monomials = ms;
        ex.coefficients.assign(coef.data(), coef.data() + p);
        for (const ConePoint& bp : half_ball(alpha, g)) {
            auto z = scaled(bp, alpha);
            cplx val = 0.0;
            for (std::size_t c = 0; c < p; ++c) val += coef(c) * monomial(ms[c], z);
            ex.ball.push_back({bp, val});
        }
        return ex;
    }
    throw StageError("extend_to_ball: even the constant fit is rank deficient");
}

ScalarSpaceTimeField invert_q(const std::vector<BallValue>& ball, const Grid& g) {
    ScalarSpaceTimeField q(g);
    const double scale = 1.0 / (8.0 * 2.0 * g.T);
    for (const BallValue& b : ball) {
        for (int a = 0; a < 3; ++a)
            if (std::abs(b.pt.xi[a] - lattice_xi_step() * b.pt.k[a]) > 1e-9)
                throw ConfigError("invert_q: ball value off the lattice");
        if (std::abs(b.pt.tau - lattice_tau_step(g) * b.pt.m) > 1e-9)
            throw ConfigError("invert_q: ball value off the lattice");
        const bool origin = b.pt.k == std::array<int, 3>{0, 0, 0} && b.pt.m == 0;
        const double mult = origin ? 1.0 : 2.0;
        for (int m = 0; m <= g.Nt; ++m) {
            const double tp = (m * g.dt() - 0.5 * g.T) * b.pt.tau;
            double* lv = q.level(m);
            for (int k = 0; k <= g.Nx; ++k)
                for (int j = 0; j <= g.Nx; ++j)
                    for (int i = 0; i <= g.Nx; ++i) {
                        Vec3 x = g.x(i, j, k);
                        double ph = tp + (x[0] - 0.5) * b.pt.xi[0] + (x[1] - 0.5) * b.pt.xi[1] + (x[2] - 0.5) * b.pt.xi[2];
                        lv[g.idx(i, j, k)] += mult * scale * (b.value * std::exp(cplx(0.0, ph))).real();
                    }
        }
    }
    return q;
}

QSpectrum::QSpectrum(const ScalarSpaceTimeField& q) : g_(q.grid), M_(2 * q.grid.Nx), Mt_(2 * q.grid.Nt) {
    FftPlan plan({Mt_, M_, M_, M_});
    cplx* d = plan.data();
    std::fill(d, d + plan.size(), cplx(0.0));
    const double w3 = std::pow(g_.h(), 3);
    for (int m = 0; m <= g_.Nt; ++m) {
        const double wt = g_.dt() * trap_weight(m, g_.Nt);
        for (int k = 0; k <= g_.Nx; ++k)
            for (int j = 0; j <= g_.Nx; ++j)
                for (int i = 0; i <= g_.Nx; ++i)
                    d[std::size_t(i) + M_ * (std::size_t(j) + M_ * (std::size_t(k) + std::size_t(M_) * m))] =
                        q(i, j, k, m) * w3 * wt;
    }
    plan.forward();
    v_.assign(d, d + plan.size());
    // centre at (x_c, T/2)
    for (int m = 0; m < Mt_; ++m)
        for (int k = 0; k < M_; ++k)
            for (int j = 0; j < M_; ++j)
                for (int i = 0; i < M_; ++i) {
                    double ph = 0.5 * lattice_xi_step() * (fft_freq(i, M_) + fft_freq(j, M_) + fft_freq(k, M_)) +
                                0.5 * g_.T * lattice_tau_step(g_) * fft_freq(m, Mt_);
                    v_[std::size_t(i) + M_ * (std::size_t(j) + M_ * (std::size_t(k) + std::size_t(M_) * m))] *=
                        std::exp(cplx(0.0, ph));
                }
}

std::size_t QSpectrum::index(const std::array<int, 3>& k, int m) const {
    auto wrap = [](int a, int n) { return ((a % n) + n) % n; };
    return std::size_t(wrap(k[0], M_)) +
           M_ * (std::size_t(wrap(k[1], M_)) + M_ * (std::size_t(wrap(k[2], M_)) + std::size_t(M_) * wrap(m, Mt_)));
}

double QSpectrum::weight(const std::array<int, 3>& k, int m) const {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += std::pow(lattice_xi_step() * k[a], 2);
    return 1.0 / (1.0 + s + std::pow(lattice_tau_step(g_) * m, 2));
}

cplx QSpectrum::at(const std::array<int, 3>& k, int m) const {
    if (std::abs(k[0]) > g_.Nx || std::abs(k[1]) > g_.Nx || std::abs(k[2]) > g_.Nx || std::abs(m) > g_.Nt)
        throw ConfigError("spectrum: index beyond the lattice");
    return v_[index(k, m)];
}

double QSpectrum::hminus1_norm() const {
    double s = 0.0;
    for (int m = 0; m < Mt_; ++m)
        for (int c = 0; c < M_; ++c)
            for (int b = 0; b < M_; ++b)
                for (int a = 0; a < M_; ++a) {
                    std::array<int, 3> k{fft_freq(a, M_), fft_freq(b, M_), fft_freq(c, M_)};
                    s += std::norm(v_[index(k, fft_freq(m, Mt_))]) * weight(k, fft_freq(m, Mt_));
                }
    return std::sqrt(s);
}

double QSpectrum::hminus1_error(const std::vector<BallValue>& ball) const {
    const double n0 = hminus1_norm();
    double s = n0 * n0;
    for (const BallValue& b : ball) {
        const bool origin = b.pt.k == std::array<int, 3>{0, 0, 0} && b.pt.m == 0;
        const double w = weight(b.pt.k, b.pt.m);
        const cplx o = at(b.pt.k, b.pt.m);
        const double d = (std::norm(o - b.value) - std::norm(o)) * w;
        s += origin ? d : 2.0 * d; // the conjugate partner gives the same terms
    }
    s = std::max(s, 0.0);
    return n0 > 0.0 ? std::sqrt(s) / n0 : std::sqrt(s);
}

double QSpectrum::band_error(const std::vector<BallValue>& ball) const {
    double num = 0.0, den = 0.0;
    for (const BallValue& b : ball) {
        const bool origin = b.pt.k == std::array<int, 3>{0, 0, 0} && b.pt.m == 0;
        const double w = (origin ? 1.0 : 2.0) * weight(b.pt.k, b.pt.m);
        const cplx o = at(b.pt.k, b.pt.m);
        num += std::norm(o - b.value) * w;
        den += std::norm(o) * w;
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

cplx q_oracle(const ScalarSpaceTimeField& q, const Vec3& xi, double tau) {
    const Grid& g = q.grid;
    cplx s = 0.0;
    for (int m = 0; m <= g.Nt; ++m) {
        const double wt = g.dt() * trap_weight(m, g.Nt);
        const double tp = (m * g.dt() - 0.5 * g.T) * tau;
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) {
                    const double v = q(i, j, k, m);
                    if (v == 0.0) continue;
                    Vec3 x = g.x(i, j, k);
                    double ph = tp + (x[0] - 0.5) * xi[0] + (x[1] - 0.5) * xi[1] + (x[2] - 0.5) * xi[2];
                    s += wt * v * std::exp(cplx(0.0, -ph));
                }
    }
    return s * std::pow(g.h(), 3);
}

double sweep_alpha(const ElectricSweepConfig& c, double eta) {
    if (eta < 0.0) throw ConfigError("eta must be >= 0");
    if (eta == 0.0) return c.alpha_cap;
    return std::min(c.alpha_cap, c.a * std::log(1.0 + std::log(1.0 + std::abs(std::log(eta)))));
}

std::vector<ElectricSweepRow> stability_sweep_electric(const DtnDifferenceOracle& oracle, const CoefficientPair& model,
                                                       const ElectricSweepConfig& c) {
    const Grid& g = model.grid();
    double amax = 0.0;
    for (double e : c.etas) amax = std::max(amax, sweep_alpha(c, e));
    std::vector<ConePoint> pts = half_cone(amax, c.fit_radius * amax, g);
    if (pts.empty()) throw StageError("electric sweep: empty cone lattice");
    NoisePlan np;
    np.seed = c.seed;
    np.etas = c.etas;
    QSampleSet all = sample_cone(oracle, model, pts, c.sigma, c.probe, c.jobs, np);
    ScalarSpaceTimeField dq = model.q1;
    for (std::size_t p = 0; p < dq.v.size(); ++p) dq.v[p] -= model.q2.v[p];
    const QSpectrum spec(dq);

    std::vector<ElectricSweepRow> rows;
    for (std::size_t e = 0; e < c.etas.size(); ++e) {
        const double alpha = sweep_alpha(c, c.etas[e]);
        QSampleSet sub = select_noise(all, e);
        std::erase_if(sub.samples, [&](const QSample& s) {
            return !in_cone(s.pt, alpha) || st_norm(s.pt) >= c.fit_radius * alpha;
        });
        if (sub.samples.empty()) throw StageError("electric sweep: no samples for this alpha");
        Extension ex = extend_to_ball(sub, alpha, c.degree, g, c.max_degree);
        ElectricSweepRow r;
        r.eta = c.etas[e];
        r.alpha = alpha;
        r.sigma = c.sigma;
        r.n_samples = int(sub.samples.size());
        r.fit_degree = ex.degree;
        r.err_hminus1 = spec.hminus1_error(ex.ball);
        r.err_band = spec.band_error(ex.ball);
        rows.push_back(r);
    }
    return rows;
}

ShapeFits fit_electric_shapes(const std::vector<ElectricSweepRow>& rows) {
    std::vector<double> phi, le, err, lerr;
    for (const auto& r : rows) {
        if (!(r.eta > 0.0) || r.eta >= 1.0) continue;
        double l1 = std::abs(std::log(r.eta));
        double l3 = std::abs(std::log(std::abs(std::log(l1))));
        if (l3 == 0.0) continue;
        phi.push_back(1.0 / l3);
        le.push_back(std::log(l1));
        err.push_back(r.err_hminus1);
        lerr.push_back(std::log(r.err_hminus1));
    }
    ShapeFits f;
    if (err.size() < 3) throw StageError("shape fits need >= 3 rows with 0 < eta < 1");
    LineFit t = fit_line(phi, err);
    f.tripleLog_a = t.intercept;
    f.tripleLog_b = t.slope;
    f.tripleLog_R2 = t.r2;
    LineFit p = fit_line(le, lerr);
    f.logPower_c = -p.slope;
    f.logPower_a = std::exp(p.intercept);
    std::vector<double> model(err.size());
    for (std::size_t i = 0; i < err.size(); ++i) model[i] = f.logPower_a * std::exp(-f.logPower_c * le[i]);
    f.logPower_R2 = r_squared(err, model);
    return f;
}

} // namespace msr
