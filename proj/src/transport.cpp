#include "msr/transport.hpp"
#include "msr/diffops.hpp"
#include "msr/norms.hpp"

#include <cmath>
#include <numbers>

namespace msr {

void ComplexDirection::validate() const {
    if (std::abs(norm(re) - 1.0) > 1e-12 || std::abs(norm(im) - 1.0) > 1e-12)
        throw ConfigError("complex direction parts must be unit vectors");
    if (std::abs(dot(re, im)) > 1e-12) throw ConfigError("complex direction parts must be orthogonal");
}

ComplexField dot_direction(const ComplexDirection& w, const VectorField& A) {
    ComplexField out(A.grid);
    CVec3 o = w.vec();
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = dot(o, A.at(p));
    return out;
}

namespace {

struct Support {
    Vec3 c{0, 0, 0};
    double r = -1.0; // negative: empty
};

Support support_ball(const ComplexField& g) {
    const Grid& G = g.grid;
    Vec3 lo{1e9, 1e9, 1e9}, hi{-1e9, -1e9, -1e9};
    bool any = false;
    for (int k = 0; k <= G.Nx; ++k)
        for (int j = 0; j <= G.Nx; ++j)
            for (int i = 0; i <= G.Nx; ++i)
                if (g(i, j, k) != cplx(0.0)) {
                    any = true;
                    Vec3 x = G.x(i, j, k);
                    for (int a = 0; a < 3; ++a) {
                        lo[a] = std::min(lo[a], x[a]);
                        hi[a] = std::max(hi[a], x[a]);
                    }
                }
    Support s;
    if (!any) return s;
    // pad by one cell: trilinear interpolation is nonzero up to the next node
    for (int a = 0; a < 3; ++a) {
        lo[a] -= G.h();
        hi[a] += G.h();
        s.c[a] = 0.5 * (lo[a] + hi[a]);
    }
    s.r = 0.5 * std::sqrt((hi[0] - lo[0]) * (hi[0] - lo[0]) + (hi[1] - lo[1]) * (hi[1] - lo[1]) +
                          (hi[2] - lo[2]) * (hi[2] - lo[2]));
    return s;
}

inline cplx trilinear(const ComplexField& g, double px, double py, double pz) {
    const Grid& G = g.grid;
    const double ih = G.Nx;
    double fx = px * ih, fy = py * ih, fz = pz * ih;
    if (fx < 0.0 || fy < 0.0 || fz < 0.0 || fx > G.Nx || fy > G.Nx || fz > G.Nx) return 0.0;
    int i = std::min(int(fx), G.Nx - 1), j = std::min(int(fy), G.Nx - 1), k = std::min(int(fz), G.Nx - 1);
    double a = fx - i, b = fy - j, c = fz - k;
    const std::size_t np = G.np(), p = G.idx(i, j, k);
    const cplx* d = g.v.data();
    cplx c00 = d[p] * (1 - a) + d[p + 1] * a;
    cplx c10 = d[p + np] * (1 - a) + d[p + np + 1] * a;
    cplx c01 = d[p + np * np] * (1 - a) + d[p + np * np + 1] * a;
    cplx c11 = d[p + np * np + np] * (1 - a) + d[p + np * np + np + 1] * a;
    return (c00 * (1 - b) + c10 * b) * (1 - c) + (c01 * (1 - b) + c11 * b) * c;
}

class PolarQuadrature {
public:
    PolarQuadrature(const ComplexDirection& w, const ComplexField& g, const TransportOptions& opt,
                    double rmax)
        : g_(g), sup_(support_ball(g)), dr_(opt.radial_step * g.grid.h()), rmax_(rmax) {
        w.validate();
        if (opt.angles < 8) throw ConfigError("transport quadrature needs at least 8 angles");
        const double dth = 2.0 * std::numbers::pi / opt.angles;
        for (int l = 0; l < opt.angles; ++l) {
            double th = l * dth;
            Vec3 e;
            for (int a = 0; a < 3; ++a) e[a] = std::cos(th) * w.re[a] + std::sin(th) * w.im[a];
            dirs_.push_back(e);
            phase_.push_back(std::exp(cplx(0.0, -th)) * dth / (2.0 * std::numbers::pi));
        }
    }
    bool empty() const { return sup_.r < 0.0; }
    const Support& support() const { return sup_; }

    cplx eval(const Vec3& x) const {
        if (empty()) return 0.0;
        Vec3 d{x[0] - sup_.c[0], x[1] - sup_.c[1], x[2] - sup_.c[2]};
        double d2 = dot(d, d), r2 = sup_.r * sup_.r;
        cplx total = 0.0;
        for (std::size_t l = 0; l < dirs_.size(); ++l) {
            const Vec3& e = dirs_[l];
            // x - r e in the ball: r^2 - 2 r (e.d) + d^2 - r_s^2 <= 0
            double b = dot(e, d);
            double disc = b * b - d2 + r2;
            if (disc <= 0.0) continue;
            double sq = std::sqrt(disc);
            double lo = std::max(0.0, b - sq), hi = std::min(rmax_, b + sq);
            if (hi <= lo) continue;
            long k0 = long(std::ceil(lo / dr_ - 0.5)), k1 = long(std::floor(hi / dr_ - 0.5));
            cplx acc = 0.0;
            for (long k = std::max(0L, k0); k <= k1; ++k) {
                double r = (k + 0.5) * dr_;
                acc += trilinear(g_, x[0] - r * e[0], x[1] - r * e[1], x[2] - r * e[2]);
            }
            total += acc * dr_ * phase_[l];
        }
        return total;
    }

private:
    const ComplexField& g_;
    Support sup_;
    double dr_, rmax_;
    std::vector<Vec3> dirs_;
    std::vector<cplx> phase_;
};

// padded box [-1/2, 3/2]^3, quadrature disk radius 2 * its diameter
constexpr double kBoxLo = -0.5, kBoxHi = 1.5;
const double kRmax = 2.0 * std::sqrt(3.0) * (kBoxHi - kBoxLo);

void check_support(const PolarQuadrature& q) {
    if (q.empty()) return;
    const Support& s = q.support();
    for (int a = 0; a < 3; ++a)
        if (s.c[a] - s.r < kBoxLo || s.c[a] + s.r > kBoxHi)
            throw ConfigError("transport source support escapes the padded box");
}

} // namespace

double transport_pde_residual(const ComplexDirection& w, const ComplexField& phi, const ComplexField& g) {
    const Grid& G = phi.grid;
    CVec3 o = w.vec();
    double mx = 0.0;
    for (int k = 1; k < G.Nx; ++k)
        for (int j = 1; j < G.Nx; ++j)
            for (int i = 1; i < G.Nx; ++i) {
                cplx s = -g(i, j, k);
                for (int a = 0; a < 3; ++a) s += o[a] * partial(phi, a, i, j, k);
                mx = std::max(mx, std::abs(s));
            }
    return mx;
}

PhaseField n_omega_inverse(const ComplexDirection& w, const ComplexField& g, const TransportOptions& opt) {
    const Grid& G = g.grid;
    PolarQuadrature quad(w, g, opt, kRmax);
    check_support(quad);
    PhaseField out;
    out.source = g;
    out.phi = ComplexField(G);
    if (!quad.empty())
        for (int k = 0; k <= G.Nx; ++k)
            for (int j = 0; j <= G.Nx; ++j)
                for (int i = 0; i <= G.Nx; ++i) out.phi(i, j, k) = quad.eval(G.x(i, j, k));
    out.residual = transport_pde_residual(w, out.phi, g);
    double gi = discrete_norm(g, NormId::Linf);
    out.bound_ratio = gi > 0.0 ? discrete_norm(out.phi, NormId::Linf) / gi : 0.0;
    return out;
}

std::vector<cplx> n_omega_inverse_on(const ComplexDirection& w, const ComplexField& g,
                                     const NodeLattice& lat, const std::vector<unsigned char>* mask,
                                     const TransportOptions& opt) {
    PolarQuadrature quad(w, g, opt, kRmax);
    check_support(quad);
    const std::size_t n = std::size_t(lat.n);
    std::vector<cplx> out(n * n * n, 0.0);
    if (quad.empty()) return out;
    for (int k = 0; k < lat.n; ++k)
        for (int j = 0; j < lat.n; ++j)
            for (int i = 0; i < lat.n; ++i) {
                std::size_t p = i + n * (j + n * k);
                if (mask && !(*mask)[p]) continue;
                out[p] = quad.eval(lat.x(i, j, k));
            }
    return out;
}

double transport_residual(const PhaseField& phi, const VectorField& A, const ComplexDirection& w) {
    const Grid& G = phi.phi.grid;
    CVec3 o = w.vec();
    double mx = 0.0;
    for (int k = 1; k < G.Nx; ++k)
        for (int j = 1; j < G.Nx; ++j)
            for (int i = 1; i < G.Nx; ++i) {
                cplx s = dot(o, A.at(G.idx(i, j, k)));
                for (int a = 0; a < 3; ++a) s += o[a] * partial(phi.phi, a, i, j, k);
                mx = std::max(mx, std::abs(s));
            }
    return mx;
}

PhaseCancellation phase_cancellation_check(const VectorField& A, const ComplexDirection& w,
                                           const Vec3& xi, const TransportOptions& opt) {
    w.validate();
    double tol = 1e-10 * std::max(1.0, norm(xi));
    if (std::abs(dot(xi, w.re)) > tol || std::abs(dot(xi, w.im)) > tol)
        throw ConfigError("phase cancellation needs xi orthogonal to both direction parts");
    const Grid& G = A.grid;
    ComplexField wa = dot_direction(w, A);
    ComplexField src(G);
    for (std::size_t p = 0; p < src.size(); ++p) src[p] = -wa[p];
    PhaseField phi = n_omega_inverse(w, src, opt);
    PhaseCancellation r{0.0, 0.0, 0.0};
    const double vol = std::pow(G.h(), 3);
    for (int k = 0; k <= G.Nx; ++k)
        for (int j = 0; j <= G.Nx; ++j)
            for (int i = 0; i <= G.Nx; ++i) {
                double wt = trap_weight(i, G.Nx) * trap_weight(j, G.Nx) * trap_weight(k, G.Nx) * vol;
                cplx e = std::exp(cplx(0.0, dot(xi, G.x(i, j, k))));
                r.lhs += wt * wa(i, j, k) * std::exp(cplx(0.0, 1.0) * phi.phi(i, j, k)) * e;
                r.rhs += wt * wa(i, j, k) * e;
            }
    r.gap = std::abs(r.lhs - r.rhs);
    return r;
}

} // namespace msr
