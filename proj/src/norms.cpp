#include "msr/norms.hpp"
#include "msr/diffops.hpp"
#include "msr/fft.hpp"

#include <cmath>
#include <numbers>

namespace msr {

NormId parse_norm_id(const std::string& s) {
    if (s == "L2") return NormId::L2;
    if (s == "Linf") return NormId::Linf;
    if (s == "W1inf") return NormId::W1inf;
    if (s == "H-1" || s == "Hminus1") return NormId::Hminus1;
    throw ConfigError("unknown norm id '" + s + "'");
}

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

template <class T>
double l2_sq(const NodeField<T>& f) {
    const Grid& g = f.grid;
    double s = 0.0;
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                s += trap_weight(i, g.Nx) * trap_weight(j, g.Nx) * trap_weight(k, g.Nx) *
                     std::norm(f(i, j, k));
    return s * g.h() * g.h() * g.h();
}

template <class T>
double linf(const NodeField<T>& f) {
    double m = 0.0;
    for (const auto& a : f.v) m = std::max(m, std::abs(a));
    return m;
}

template <class T>
double grad_inf(const NodeField<T>& f) {
    const Grid& g = f.grid;
    double m = 0.0;
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(partial(f, a, i, j, k)));
    return m;
}

// sum_k |f_k|^2 / (1 + |2 pi k|^2) over the periodic unit cell
template <class T>
double hm1_sq(const NodeField<T>& f) {
    const Grid& g = f.grid;
    const int N = g.Nx;
    FftPlan plan({N, N, N});
    cplx* b = plan.data();
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) b[i + N * (j + std::size_t(N) * k)] = f(i, j, k);
    plan.forward();
    const double w = std::pow(g.h(), 3);
    double s = 0.0;
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                double kk = kTwoPi * kTwoPi *
                            (std::pow(fft_freq(i, N), 2) + std::pow(fft_freq(j, N), 2) +
                             std::pow(fft_freq(k, N), 2));
                s += std::norm(b[i + N * (j + std::size_t(N) * k)] * w) / (1.0 + kk);
            }
    return s;
}

template <class T>
double node_norm(const NodeField<T>& f, NormId id) {
    switch (id) {
    case NormId::L2: return std::sqrt(l2_sq(f));
    case NormId::Linf: return linf(f);
    case NormId::W1inf: return std::max(linf(f), grad_inf(f));
    case NormId::Hminus1: return std::sqrt(hm1_sq(f));
    }
    return 0.0;
}

template <class T>
double st_norm(const SpaceTimeField<T>& f, NormId id) {
    const Grid& g = f.grid;
    if (id == NormId::Linf) {
        double m = 0.0;
        for (const auto& a : f.v) m = std::max(m, std::abs(a));
        return m;
    }
    if (id == NormId::L2 || id == NormId::W1inf) {
        double s = 0.0, mx = 0.0;
        for (int m = 0; m <= g.Nt; ++m) {
            NodeField<T> lv(g);
            std::copy(f.level(m), f.level(m) + g.nodes(), lv.v.begin());
            if (id == NormId::L2)
                s += trap_weight(m, g.Nt) * g.dt() * l2_sq(lv);
            else
                mx = std::max(mx, node_norm(lv, NormId::W1inf));
        }
        return id == NormId::L2 ? std::sqrt(s) : mx;
    }
    const int N = g.Nx, M = g.Nt;
    FftPlan plan({M, N, N, N});
    cplx* b = plan.data();
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < N; ++k)
            for (int j = 0; j < N; ++j)
                for (int i = 0; i < N; ++i)
                    b[i + N * (j + std::size_t(N) * (k + std::size_t(N) * m))] = f(i, j, k, m);
    plan.forward();
    const double w = std::pow(g.h(), 3) * g.dt();
    double s = 0.0;
    for (int m = 0; m < M; ++m) {
        double tau = kTwoPi * fft_freq(m, M) / g.T;
        for (int k = 0; k < N; ++k)
            for (int j = 0; j < N; ++j)
                for (int i = 0; i < N; ++i) {
                    double kk = kTwoPi * kTwoPi *
                                (std::pow(fft_freq(i, N), 2) + std::pow(fft_freq(j, N), 2) +
                                 std::pow(fft_freq(k, N), 2));
                    s += std::norm(b[i + N * (j + std::size_t(N) * (k + std::size_t(N) * m))] * w) /
                         (1.0 + kk + tau * tau);
                }
    }
    return std::sqrt(s / g.T);
}

} // namespace

double discrete_norm(const RealField& f, NormId id) { return node_norm(f, id); }
double discrete_norm(const ComplexField& f, NormId id) { return node_norm(f, id); }

double discrete_norm(const VectorField& f, NormId id) {
    if (id == NormId::Linf) return f.max_abs();
    if (id == NormId::W1inf) {
        double m = f.max_abs();
        for (int c = 0; c < 3; ++c) m = std::max(m, grad_inf(f.c[c]));
        return m;
    }
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += std::pow(node_norm(f.c[c], id), 2);
    return std::sqrt(s);
}

double discrete_norm(const CurlField& f, NormId id) {
    if (id == NormId::Linf || id == NormId::W1inf) {
        double m = 0.0;
        for (int c = 0; c < 3; ++c) m = std::max(m, node_norm(f.s[c], id));
        return m;
    }
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += std::pow(node_norm(f.s[c], id), 2);
    return std::sqrt(s);
}

double discrete_norm(const ScalarSpaceTimeField& f, NormId id) { return st_norm(f, id); }
double discrete_norm(const ComplexSpaceTimeField& f, NormId id) { return st_norm(f, id); }

} // namespace msr
