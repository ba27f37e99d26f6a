#include "msr/frame.hpp"

#include <cmath>
#include <sstream>

namespace msr {

double rdot(const RVec& a, const RVec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double rnorm(const RVec& a) { return std::sqrt(rdot(a, a)); }

cplx cdot(const CVecN& a, const CVecN& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec3 to_vec3(const RVec& v) {
    if (v.size() != 3) throw ConfigError("grid-backed operations need n = 3");
    return {v[0], v[1], v[2]};
}

CVec3 to_cvec3(const CVecN& v) {
    if (v.size() != 3) throw ConfigError("grid-backed operations need n = 3");
    return {v[0], v[1], v[2]};
}

void FrequencyFrame::validate() const {
    const std::size_t n = xi.size();
    if (n < 3) throw ConfigError("frames need n >= 3");
    if (wR.size() != n || wI.size() != n || y.size() != n) throw ConfigError("frame vectors differ in length");
    if (side != 1 && side != 2) throw ConfigError("frame side must be 1 or 2");
    if (!(sigma > 0.5 * rnorm(xi))) throw ConfigError("frame needs sigma > |xi|/2");
    if (!(rnorm(y) < 1.0)) throw ConfigError("frame needs |y| < 1");
    double tol = 1e-12 * std::max(1.0, rnorm(xi));
    if (std::abs(rnorm(wR) - 1.0) > 1e-12 || std::abs(rnorm(wI) - 1.0) > 1e-12 ||
        std::abs(rdot(wR, wI)) > 1e-12 || std::abs(rdot(xi, wR)) > tol || std::abs(rdot(xi, wI)) > tol)
        throw ConfigError("frame orthogonality violated");
}

namespace {

// orthonormalize `v` against `basis`; returns false if v lies in their span
bool gram_schmidt(RVec& v, const std::vector<RVec>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
            double c = rdot(v, b);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
        }
    double nv = rnorm(v);
    if (nv < 1e-8) return false;
    for (auto& a : v) a /= nv;
    return true;
}

void check_common(const RVec& xi, const RVec& y, double sigma) {
    if (xi.size() < 3) throw ConfigError("frames need n >= 3 (three mutually orthogonal directions)");
    if (y.size() != xi.size()) throw ConfigError("y and xi differ in length");
    for (double a : xi)
        if (!std::isfinite(a)) throw ConfigError("non-finite xi");
    if (!(sigma > 0.5 * rnorm(xi))) {
        std::ostringstream os;
        os << "sigma = " << sigma << " must exceed |xi|/2 = " << 0.5 * rnorm(xi);
        throw ConfigError(os.str());
    }
    if (!(rnorm(y) < 1.0)) throw ConfigError("|y| must be < 1");
}

} // namespace

FrequencyFrame build_frame(const RVec& xi, const RVec& y, double sigma, int side, std::optional<int> zero_axis) {
    check_common(xi, y, sigma);
    const std::size_t n = xi.size();
    std::vector<RVec> basis;
    RVec lead(n, 0.0);
    double nx = rnorm(xi);
    if (nx > 0.0) {
        for (std::size_t i = 0; i < n; ++i) lead[i] = xi[i] / nx;
    } else {
        if (!zero_axis || *zero_axis < 0 || *zero_axis >= int(n))
            throw ConfigError("xi = 0 needs an explicit axis choice");
        lead[*zero_axis] = 1.0;
    }
    basis.push_back(lead);
    for (std::size_t e = 0; e < n && basis.size() < 3; ++e) {
        RVec v(n, 0.0);
        v[e] = 1.0;
        if (gram_schmidt(v, basis)) basis.push_back(v);
    }
    FrequencyFrame f;
    f.xi = xi;
    f.y = y;
    f.sigma = sigma;
    f.side = side;
    f.wR = basis[1];
    f.wI = basis[2];
    f.validate();
    return f;
}

FrequencyFrame build_frame_with_im(const RVec& xi, const RVec& y, double sigma, int side, const RVec& wI) {
    check_common(xi, y, sigma);
    const std::size_t n = xi.size();
    if (wI.size() != n) throw ConfigError("w_I has the wrong length");
    double nx = rnorm(xi);
    if (!(nx > 0.0)) throw ConfigError("prescribed w_I needs xi != 0");
    RVec lead(n);
    for (std::size_t i = 0; i < n; ++i) lead[i] = xi[i] / nx;
    RVec im = wI;
    if (std::abs(rnorm(im) - 1.0) > 1e-12 || std::abs(rdot(im, lead)) > 1e-12)
        throw ConfigError("prescribed w_I must be a unit vector orthogonal to xi");
    FrequencyFrame f;
    f.xi = xi;
    f.y = y;
    f.sigma = sigma;
    f.side = side;
    f.wI = im;
    if (n == 3) {
        f.wR = {lead[1] * im[2] - lead[2] * im[1], lead[2] * im[0] - lead[0] * im[2],
                lead[0] * im[1] - lead[1] * im[0]};
    } else {
        std::vector<RVec> basis{lead, im};
        for (std::size_t e = 0; e < n; ++e) {
            RVec v(n, 0.0);
            v[e] = 1.0;
            if (gram_schmidt(v, basis)) {
                f.wR = v;
                break;
            }
        }
    }
    f.validate();
    return f;
}

ComplexFrequency make_rho(const FrequencyFrame& f) {
    f.validate();
    const std::size_t n = f.xi.size();
    const double s = f.sigma;
    const double r = std::sqrt(1.0 - rdot(f.xi, f.xi) / (4.0 * s * s));
    const double sg = f.side == 1 ? 1.0 : -1.0;
    ComplexFrequency out;
    out.side = f.side;
    out.rho.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.rho[i] = s * cplx(r * f.wR[i] - sg * f.xi[i] / (2.0 * s), sg * f.wI[i]) + f.y[i];
    out.rho_dot_rho = cdot(out.rho, out.rho);
    return out;
}

CVecN pair_difference(const ComplexFrequency& r1, const ComplexFrequency& r2) {
    CVecN d(r2.rho.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = r2.rho[i] - std::conj(r1.rho[i]);
    return d;
}

cplx pair_phase(const ComplexFrequency& r1, const ComplexFrequency& r2) {
    return r2.rho_dot_rho - std::conj(r1.rho_dot_rho);
}

cplx lambda_h(const CVec3& rho, double h) {
    cplx l = 0.0;
    for (int j = 0; j < 3; ++j) {
        cplx s = std::sin(rho[j] * (0.5 * h));
        l += 4.0 / (h * h) * s * s;
    }
    return l;
}

cplx cn_amplification(cplx lambda, double dt) {
    cplx a = cplx(0.0, 0.5 * dt) * lambda;
    return (1.0 - a) / (1.0 + a);
}

DiscreteCarrier make_carrier(const CVec3& rho, const Grid& g) {
    DiscreteCarrier c;
    c.rho = rho;
    c.lambda = lambda_h(rho, g.h());
    c.G = cn_amplification(c.lambda, g.dt());
    return c;
}

MatchedPair match_dispersion(const FrequencyFrame& f, const Grid& g, double tau) {
    f.validate();
    if (f.n() != 3) throw ConfigError("discrete carriers need n = 3");
    const double nx = rnorm(f.xi);
    const double h = g.h(), dt = g.dt();
    Vec3 e{0, 0, 0};
    if (nx > 0.0)
        for (int j = 0; j < 3; ++j) e[j] = f.xi[j] / nx;
    else if (tau != 0.0)
        throw ConfigError("tau != 0 needs xi != 0");

    FrequencyFrame f1 = f, f2 = f;
    f1.side = 1;
    f2.side = 2;
    f1.y.assign(3, 0.0);
    f2.y.assign(3, 0.0);
    CVec3 b1 = to_cvec3(make_rho(f1).rho), b2 = to_cvec3(make_rho(f2).rho);
    CVec3 b1c{std::conj(b1[0]), std::conj(b1[1]), std::conj(b1[2])};

    auto kappa = [&](cplx l) { return (2.0 / dt) * std::atan(l * (0.5 * dt)); };
    auto dkappa = [&](cplx l) {
        cplx a = l * (0.5 * dt);
        return 1.0 / (1.0 + a * a);
    };
    auto shifted = [&](const CVec3& b, cplx z) {
        return CVec3{b[0] + z * e[0], b[1] + z * e[1], b[2] + z * e[2]};
    };
    auto dlam = [&](const CVec3& r) {
        cplx d = 0.0;
        for (int j = 0; j < 3; ++j) d += (2.0 / h) * std::sin(r[j] * h) * e[j];
        return d;
    };

    MatchedPair out;
    cplx z = nx > 0.0 ? tau / (2.0 * nx) : 0.0;
    if (nx > 0.0) {
        for (int it = 0; it < 50; ++it) {
            CVec3 r2 = shifted(b2, z), r1c = shifted(b1c, z);
            cplx l2 = lambda_h(r2, h), l1 = lambda_h(r1c, h);
            cplx F = kappa(l2) - kappa(l1) - tau;
            if (std::abs(F) < 1e-14 * std::max(1.0, std::abs(tau))) break;
            cplx J = dkappa(l2) * dlam(r2) - dkappa(l1) * dlam(r1c);
            if (std::abs(J) == 0.0) throw StageError("dispersion matching: singular Newton step");
            z -= F / J;
            out.newton_steps = it + 1;
        }
    }
    out.zeta = z;
    CVec3 r2 = shifted(b2, z), r1c = shifted(b1c, z);
    CVec3 r1{std::conj(r1c[0]), std::conj(r1c[1]), std::conj(r1c[2])};
    out.c1 = make_carrier(r1, g);
    out.c2 = make_carrier(r2, g);
    out.mismatch = std::abs(out.c2.G * std::conj(out.c1.G) - std::exp(cplx(0.0, -tau * dt)));
    if (!(out.mismatch < 1e-9)) {
        std::ostringstream os;
        os << "dispersion matching failed (mismatch " << out.mismatch << ")";
        throw StageError(os.str());
    }
    return out;
}

} // namespace msr
