#include "msr/multiplier.hpp"
#include "msr/diffops.hpp"
#include "msr/norms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace msr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double BoxLattice::kx(int a) const { return kTwoPi * (fft_freq(a, M) + twist) / (M * h); }

double BoxLattice::kt(int b) const {
    if (Mt == 1) return 0.0;
    return kTwoPi * (fft_freq(b, Mt) + twist_t) / (Mt * dt);
}

BoxLattice make_box(const Grid& g, bool dynamic) {
    g.validate();
    BoxLattice b;
    b.h = g.h();
    b.dt = g.dt();
    b.M = 2 * g.Nx;
    b.Mt = dynamic ? 2 * g.Nt : 1;
    b.lo = -0.5;
    b.Nx = g.Nx;
    b.Nt = g.Nt;
    return b;
}

MultiplierE::MultiplierE(const BoxLattice& box, const DiscreteCarrier& c, double sigma, const MultiplierOptions& opt)
    : box_(box), car_(c), sigma_(sigma), opt_(opt) {
    if (!(opt.eps >= 0.0)) throw ConfigError("multiplier shift must be >= 0");
    const int M = box.M, Mt = box.Mt;
    std::vector<int> dims = box.is_static() ? std::vector<int>{M, M, M} : std::vector<int>{Mt, M, M, M};
    plan_ = std::make_unique<FftPlan>(dims);
    inv_.resize(box.size());
    twx_.resize(M);
    twt_.resize(Mt);
    for (int i = 0; i < M; ++i) twx_[i] = std::exp(cplx(0.0, kTwoPi * box.twist * i / M));
    for (int m = 0; m < Mt; ++m) twt_[m] = Mt == 1 ? 1.0 : std::exp(cplx(0.0, kTwoPi * box.twist_t * m / Mt));
    const double floor = opt.eps * sigma;
    min_abs_ = 1e300;
    for (int mt = 0; mt < Mt; ++mt)
        for (int c3 = 0; c3 < M; ++c3)
            for (int b = 0; b < M; ++b)
                for (int a = 0; a < M; ++a) {
                    cplx p = symbol(a, b, c3, mt);
                    min_abs_ = std::min(min_abs_, std::abs(p));
                    if (std::abs(p) < floor) {
                        p += cplx(0.0, floor * (p.imag() >= 0.0 ? 1.0 : -1.0));
                        ++n_reg_;
                    }
                    if (std::abs(p) == 0.0)
                        throw ConfigError("multiplier symbol vanishes on the lattice and the shift is zero");
                    inv_[box.idx(a, b, c3, mt)] = 1.0 / p;
                }
}

cplx MultiplierE::symbol(int a, int b, int c, int mt) const {
    const double k[3] = {box_.kx(a), box_.kx(b), box_.kx(c)};
    const double tau = box_.kt(mt);
    if (opt_.kind == SymbolKind::Continuum) {
        cplx p = -tau;
        for (int j = 0; j < 3; ++j) p += -k[j] * k[j] + 2.0 * car_.rho[j] * k[j];
        return p;
    }
    CVec3 d{k[0] - car_.rho[0], k[1] - car_.rho[1], k[2] - car_.rho[2]};
    cplx lam = lambda_h(d, box_.h);
    cplx Ge = car_.G * std::exp(cplx(0.0, tau * box_.dt));
    return cplx(0.0, 1.0) * (Ge - 1.0) / box_.dt - 0.5 * (Ge + 1.0) * lam;
}

void MultiplierE::apply(std::vector<cplx>& f) const {
    if (f.size() != box_.size()) throw ConfigError("multiplier input has the wrong size");
    const int M = box_.M, Mt = box_.Mt;
    cplx* d = plan_->data();
    for (int m = 0; m < Mt; ++m)
        for (int k = 0; k < M; ++k)
            for (int j = 0; j < M; ++j) {
                cplx t = std::conj(twt_[m] * twx_[j] * twx_[k]);
                std::size_t r = box_.idx(0, j, k, m);
                for (int i = 0; i < M; ++i) d[r + i] = f[r + i] * t * std::conj(twx_[i]);
            }
    plan_->forward();
    const double norm = 1.0 / double(box_.size());
    for (std::size_t p = 0; p < box_.size(); ++p) d[p] *= inv_[p] * norm;
    plan_->backward();
    for (int m = 0; m < Mt; ++m)
        for (int k = 0; k < M; ++k)
            for (int j = 0; j < M; ++j) {
                cplx t = twt_[m] * twx_[j] * twx_[k];
                std::size_t r = box_.idx(0, j, k, m);
                for (int i = 0; i < M; ++i) f[r + i] = d[r + i] * t * twx_[i];
            }
}

ConjugatedScheme::ConjugatedScheme(const BoxLattice& box, const DiscreteCarrier& c, const VectorField& A,
                                   const ScalarSpaceTimeField* q)
    : box_(box), car_(c) {
    const Grid& g = A.grid;
    if (g.Nx != box.Nx || g.Nt != box.Nt) throw ConfigError("box and coefficient grids disagree");
    if (q && !(q->grid == g)) throw ConfigError("A and q grids disagree");
    if (q && box.is_static() && !q->is_static())
        throw ConfigError("time-dependent q needs the dynamic box");
    const int o = box.offset(), N = g.Nx;
    const double h = g.h();
    const cplx I(0.0, 1.0);
    auto Aat = [&](int d, int i, int j, int k) -> double {
        if (i < 0 || j < 0 || k < 0 || i > N || j > N || k > N) return 0.0;
        return A.c[d](i, j, k);
    };
    auto qnonzero = [&](int i, int j, int k) {
        if (!q) return false;
        for (int m = 0; m <= g.Nt; ++m)
            if ((*q)(i, j, k, m) != 0.0) return true;
        return false;
    };
    qlevels_ = box.is_static() ? 1 : box.Mt;
    // rows: nodes within one cell of the coefficient support
    for (int k = -1; k <= N + 1; ++k)
        for (int j = -1; j <= N + 1; ++j)
            for (int i = -1; i <= N + 1; ++i) {
                bool inside = i >= 0 && j >= 0 && k >= 0 && i <= N && j <= N && k <= N;
                bool any = inside && qnonzero(i, j, k);
                for (int d = 0; d < 3 && !any; ++d) {
                    int e[3] = {0, 0, 0};
                    e[d] = 1;
                    any = Aat(d, i, j, k) != 0.0 || Aat(d, i + e[0], j + e[1], k + e[2]) != 0.0 ||
                          Aat(d, i - e[0], j - e[1], k - e[2]) != 0.0;
                }
                if (!any) continue;
                std::array<cplx, 7> cf{};
                double a2 = 0.0;
                for (int d = 0; d < 3; ++d) a2 += Aat(d, i, j, k) * Aat(d, i, j, k);
                cf[0] = -a2;
                for (int d = 0; d < 3; ++d) {
                    int e[3] = {0, 0, 0};
                    e[d] = 1;
                    double ap = Aat(d, i, j, k) + Aat(d, i + e[0], j + e[1], k + e[2]);
                    double am = Aat(d, i, j, k) + Aat(d, i - e[0], j - e[1], k - e[2]);
                    cf[1 + 2 * d] = I * ap / (2.0 * h) * std::exp(-I * c.rho[d] * h);
                    cf[2 + 2 * d] = -I * am / (2.0 * h) * std::exp(I * c.rho[d] * h);
                }
                rows_.push_back(box.idx(i + o, j + o, k + o));
                cf_.push_back(cf);
                for (int tm = 0; tm < qlevels_; ++tm) {
                    double v = 0.0;
                    if (q && inside) {
                        if (box.is_static())
                            v = (*q)(i, j, k, 0);
                        else if (tm < g.Nt)
                            v = 0.5 * ((*q)(i, j, k, tm) + (*q)(i, j, k, tm + 1));
                    }
                    qh_.push_back(v);
                }
            }
    for (std::size_t r : rows_) {
        int i = int(r % box.M), j = int((r / box.M) % box.M), k = int(r / (std::size_t(box.M) * box.M));
        if (i < 1 || j < 1 || k < 1 || i > box.M - 2 || j > box.M - 2 || k > box.M - 2)
            throw ConfigError("coefficient support reaches the box faces");
    }
}

cplx ConjugatedScheme::h1_at(const std::vector<cplx>& v, std::size_t r, int tm, int mrow) const {
    const std::size_t base = rows_[r];
    const std::size_t sx = 1, sy = box_.M, sz = std::size_t(box_.M) * box_.M;
    const std::size_t S = box_.space_size();
    // combination c = (G v^{m+1} + v^m)/2 at a spatial index
    auto comb = [&](std::size_t p) -> cplx {
        if (box_.is_static()) return 0.5 * (car_.G + 1.0) * v[p];
        const int m1 = (mrow + 1) % box_.Mt;
        cplx next = v[p + S * m1];
        if (mrow + 1 == box_.Mt) next *= std::exp(cplx(0.0, kTwoPi * box_.twist_t));
        return 0.5 * (car_.G * next + v[p + S * mrow]);
    };
    const auto& cf = cf_[r];
    cplx c0 = comb(base);
    cplx s = (cf[0] + qh_[r * qlevels_ + tm]) * c0;
    s += cf[1] * comb(base + sx) + cf[2] * comb(base - sx);
    s += cf[3] * comb(base + sy) + cf[4] * comb(base - sy);
    s += cf[5] * comb(base + sz) + cf[6] * comb(base - sz);
    return s;
}

void ConjugatedScheme::apply_k1(const std::vector<cplx>& v, std::vector<cplx>& out) const {
    out.assign(box_.size(), 0.0);
    const std::size_t S = box_.space_size();
    for (int m = 0; m < box_.Mt; ++m) {
        const int tm = box_.is_static() ? 0 : m;
        for (std::size_t r = 0; r < rows_.size(); ++r) out[rows_[r] + S * m] = h1_at(v, r, tm, m);
    }
}

void ConjugatedScheme::apply_k0_compact(const std::vector<cplx>& v, std::vector<cplx>& out) const {
    out.assign(box_.size(), 0.0);
    const int M = box_.M;
    const std::size_t S = box_.space_size();
    const double h = box_.h, ih2 = 1.0 / (h * h);
    const cplx I(0.0, 1.0);
    cplx ep[3], em[3];
    for (int d = 0; d < 3; ++d) {
        ep[d] = std::exp(-I * car_.rho[d] * h) * ih2;
        em[d] = std::exp(I * car_.rho[d] * h) * ih2;
    }
    std::vector<cplx> c(S);
    for (int m = 0; m < box_.Mt; ++m) {
        const cplx* vm = v.data() + S * m;
        const cplx* vn = box_.is_static() ? vm : v.data() + S * ((m + 1) % box_.Mt);
        cplx wrap = (!box_.is_static() && m + 1 == box_.Mt) ? std::exp(cplx(0.0, kTwoPi * box_.twist_t)) : 1.0;
        for (std::size_t p = 0; p < S; ++p) c[p] = 0.5 * (car_.G * wrap * vn[p] + vm[p]);
        cplx* o = out.data() + S * m;
        for (int k = 1; k < M - 1; ++k)
            for (int j = 1; j < M - 1; ++j)
                for (int i = 1; i < M - 1; ++i) {
                    std::size_t p = box_.idx(i, j, k);
                    cplx hc = -6.0 * ih2 * c[p] + ep[0] * c[p + 1] + em[0] * c[p - 1] + ep[1] * c[p + M] +
                              em[1] * c[p - M] + ep[2] * c[p + std::size_t(M) * M] + em[2] * c[p - std::size_t(M) * M];
                    o[p] = I * (car_.G * wrap * vn[p] - vm[p]) / box_.dt + hc;
                }
    }
}

namespace {
double l2norm(const std::vector<cplx>& a) {
    double s = 0.0;
    for (const auto& z : a) s += std::norm(z);
    return std::sqrt(s);
}
} // namespace

std::vector<cplx> picard_iterate_G(const MultiplierE& E, const ConjugatedScheme& K, const std::vector<cplx>& S,
                                   const PicardOptions& opt, PicardReport* report) {
    PicardReport rep;
    std::vector<cplx> w(S.size(), 0.0), r(S.size()), k1;
    double prev = 0.0;
    int growth = 0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        if (K.has_coefficients() && it > 1) {
            K.apply_k1(w, k1);
            for (std::size_t p = 0; p < S.size(); ++p) r[p] = S[p] - k1[p];
        } else {
            r = S;
        }
        E.apply(r);
        double dn = 0.0;
        for (std::size_t p = 0; p < S.size(); ++p) dn += std::norm(r[p] - w[p]);
        double nn = l2norm(r);
        double upd = nn > 0.0 ? std::sqrt(dn) / nn : 0.0;
        w.swap(r);
        rep.iterations = it;
        if (prev > 0.0) rep.contraction = upd / prev;
        rep.last_update = upd;
        if (upd < opt.tol || !K.has_coefficients()) {
            rep.converged = true;
            break;
        }
        if (it > 2 && upd > prev) {
            if (++growth >= 3 || upd > 1.0) {
                std::ostringstream os;
                os << "Picard iteration is not contracting (update ratio " << rep.contraction << " at iteration "
                   << it << ")";
                throw StageError(os.str());
            }
        } else {
            growth = 0;
        }
        prev = upd;
    }
    if (report) *report = rep;
    return w;
}

ComplexSpaceTimeField restrict_to_q(const BoxLattice& box, const Grid& g, const std::vector<cplx>& v) {
    if (!box.is_static() && box.Mt < g.Nt + 1) throw ConfigError("box time period shorter than T");
    ComplexSpaceTimeField out(g);
    const int o = box.offset();
    const std::size_t S = box.space_size();
    for (int m = 0; m <= g.Nt; ++m) {
        const cplx* src = v.data() + (box.is_static() ? 0 : S * m);
        cplx* dst = out.level(m);
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) dst[g.idx(i, j, k)] = src[box.idx(i + o, j + o, k + o)];
    }
    return out;
}

namespace {

double hk_sq(const ComplexField& u, int k) {
    const Grid& g = u.grid;
    const double vol = std::pow(g.h(), 3);
    std::array<ComplexField, 3> grad;
    if (k >= 1)
        for (int a = 0; a < 3; ++a) {
            grad[a] = ComplexField(g);
            for (int kk = 0; kk <= g.Nx; ++kk)
                for (int j = 0; j <= g.Nx; ++j)
                    for (int i = 0; i <= g.Nx; ++i) grad[a](i, j, kk) = partial(u, a, i, j, kk);
        }
    double s = 0.0;
    for (int kk = 0; kk <= g.Nx; ++kk)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) {
                double w = trap_weight(i, g.Nx) * trap_weight(j, g.Nx) * trap_weight(kk, g.Nx) * vol;
                double t = std::norm(u(i, j, kk));
                if (k >= 1)
                    for (int a = 0; a < 3; ++a) t += std::norm(grad[a](i, j, kk));
                if (k >= 2)
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) t += std::norm(partial(grad[a], b, i, j, kk));
                s += w * t;
            }
    return s;
}

} // namespace

double l2_hk(const ComplexSpaceTimeField& v, int k) { return l2_hk_dt(v, k, 0); }

double l2_hk_dt(const ComplexSpaceTimeField& v, int k, int j) {
    const Grid& g = v.grid;
    if (j < 0 || j > 2 || k < 0 || k > 2) throw ConfigError("l2_hk_dt supports k, j in 0..2");
    const int L = g.Nt - j;
    ComplexField lv(g);
    double s = 0.0;
    const double idt = 1.0 / g.dt();
    for (int m = 0; m <= L; ++m) {
        for (std::size_t p = 0; p < g.nodes(); ++p) {
            cplx a = v.level(m)[p];
            if (j == 1) a = (v.level(m + 1)[p] - a) * idt;
            if (j == 2) a = (v.level(m + 2)[p] - 2.0 * v.level(m + 1)[p] + a) * idt * idt;
            lv[p] = a;
        }
        s += trap_weight(m, L) * g.dt() * hk_sq(lv, k);
    }
    return std::sqrt(s);
}

} // namespace msr
