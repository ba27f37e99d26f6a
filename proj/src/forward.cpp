#include "msr/forward.hpp"
#include "msr/diffops.hpp"
#include "msr/norms.hpp"

#include <cmath>
#include <sstream>

namespace msr {

std::size_t face_node(const Grid& g, int f, int a, int b, int depth) {
    int axis = f / 2, side = f % 2;
    int c[3];
    int o1 = axis == 0 ? 1 : 0, o2 = axis == 2 ? 1 : 2;
    c[axis] = side ? g.Nx - depth : depth;
    c[o1] = a;
    c[o2] = b;
    return g.idx(c[0], c[1], c[2]);
}

void BoundaryInput::update_compatibility() {
    const Grid& g = u0.grid;
    double scale = 1.0;
    for (const auto& z : f.v) scale = std::max(scale, std::abs(z));
    // d_t f(0) by the one-sided three-point rule, judged against the largest |d_t f| elsewhere:
    // it is O(dt^2) for compatible data and O(1) times that scale otherwise
    double f0 = 0.0, df0 = 0.0, dfmax = 0.0;
    for (int fc = 0; fc < 6; ++fc)
        for (std::size_t p = 0; p < f.face_size(); ++p) {
            f0 = std::max(f0, std::abs(f.face(0, fc)[p]));
            if (f.nlev > 2)
                df0 = std::max(df0, std::abs(-3.0 * f.face(0, fc)[p] + 4.0 * f.face(1, fc)[p] - f.face(2, fc)[p]) /
                                        (2.0 * g.dt()));
            for (int m = 0; m + 1 < f.nlev; ++m)
                dfmax = std::max(dfmax, std::abs(f.face(m + 1, fc)[p] - f.face(m, fc)[p]) / g.dt());
        }
    compat_f0 = f0 <= 1e-10 * scale;
    compat_dtf0 = df0 <= 1e-10 * scale + g.dt() * dfmax;
}

BoundaryInput zero_input(const Grid& g) {
    BoundaryInput in;
    in.u0 = ComplexField(g);
    in.f = FaceSeries(g, g.levels());
    return in;
}

BoundaryInput input_from_levels(const Grid& g, const std::function<const cplx*(int)>& level) {
    BoundaryInput in = zero_input(g);
    const cplx* l0 = level(0);
    std::copy(l0, l0 + g.nodes(), in.u0.v.begin());
    for (int m = 0; m <= g.Nt; ++m) {
        const cplx* lv = m == 0 ? l0 : level(m);
        for (int fc = 0; fc < 6; ++fc)
            for (int b = 0; b <= g.Nx; ++b)
                for (int a = 0; a <= g.Nx; ++a) in.f.at(m, fc, a, b) = lv[face_node(g, fc, a, b)];
    }
    in.update_compatibility();
    return in;
}

namespace {

// Interior part of z -> (i/dt) z + (1/2) H z, or plain H z, with per-node stencil coefficients.
struct Stencil {
    const Grid& g;
    std::array<std::vector<cplx>, 3> cp, cm;
    std::vector<double> c0;  // -6/h^2 - |A|^2, without q
    std::vector<double> qh;  // q at the current half step
    std::ptrdiff_t st[3];

    Stencil(const VectorField& A, const Vec3& wexp) : g(A.grid) {
        const std::size_t n = g.nodes();
        const double h = g.h(), ih2 = 1.0 / (h * h);
        const cplx I(0.0, 1.0);
        st[0] = 1;
        st[1] = g.np();
        st[2] = std::ptrdiff_t(g.np()) * g.np();
        c0.assign(n, 0.0);
        qh.assign(n, 0.0);
        for (int d = 0; d < 3; ++d) {
            cp[d].assign(n, 0.0);
            cm[d].assign(n, 0.0);
        }
        for (int k = 1; k < g.Nx; ++k)
            for (int j = 1; j < g.Nx; ++j)
                for (int i = 1; i < g.Nx; ++i) {
                    std::size_t p = g.idx(i, j, k);
                    Vec3 a = A.at(p);
                    c0[p] = -6.0 * ih2 - dot(a, a);
                    for (int d = 0; d < 3; ++d) {
                        double rp = std::exp(wexp[d] * h), rm = 1.0 / rp;
                        cp[d][p] = (ih2 + I * (a[d] + A.c[d][p + st[d]]) / (2.0 * h)) * rp;
                        cm[d][p] = (ih2 - I * (a[d] + A.c[d][p - st[d]]) / (2.0 * h)) * rm;
                    }
                }
    }

    // out = alpha z + beta H z on interior nodes; boundary entries of out set to zero
    void apply(const cplx* z, cplx* out, cplx alpha, double beta) const {
        const int N = g.Nx;
        for (int k = 0; k <= N; ++k)
            for (int j = 0; j <= N; ++j) {
                std::size_t row = g.idx(0, j, k);
                if (k == 0 || k == N || j == 0 || j == N) {
                    for (int i = 0; i <= N; ++i) out[row + i] = 0.0;
                    continue;
                }
                out[row] = 0.0;
                out[row + N] = 0.0;
                for (int i = 1; i < N; ++i) {
                    std::size_t p = row + i;
                    cplx s = (c0[p] + qh[p]) * z[p];
                    s += cp[0][p] * z[p + 1] + cm[0][p] * z[p - 1];
                    s += cp[1][p] * z[p + st[1]] + cm[1][p] * z[p - st[1]];
                    s += cp[2][p] * z[p + st[2]] + cm[2][p] * z[p - st[2]];
                    out[p] = alpha * z[p] + beta * s;
                }
            }
    }
};

cplx cdot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double vnorm(const std::vector<cplx>& a) { return std::sqrt(std::real(cdot(a, a))); }

// Jacobi-preconditioned BiCGSTAB for (i/dt + H/2) x = b (interior unknowns; boundary kept 0)
struct Krylov {
    const Stencil& S;
    cplx alpha;
    std::vector<cplx> diag_inv, r, rh, p, v, s, t, ph, sh;

    Krylov(const Stencil& st, cplx a) : S(st), alpha(a) {
        std::size_t n = S.g.nodes();
        for (auto* x : {&diag_inv, &r, &rh, &p, &v, &s, &t, &ph, &sh}) x->assign(n, 0.0);
    }
    void refresh_diag() {
        const Grid& g = S.g;
        for (int k = 1; k < g.Nx; ++k)
            for (int j = 1; j < g.Nx; ++j)
                for (int i = 1; i < g.Nx; ++i) {
                    std::size_t q = g.idx(i, j, k);
                    diag_inv[q] = 1.0 / (alpha + 0.5 * (S.c0[q] + S.qh[q]));
                }
    }
    void precond(const std::vector<cplx>& in, std::vector<cplx>& out) const {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = diag_inv[i] * in[i];
    }
    // returns (iterations, relative residual)
    std::pair<int, double> solve(const std::vector<cplx>& b, std::vector<cplx>& x, double tol, int max_iter) {
        const std::size_t n = b.size();
        double bn = vnorm(b);
        if (bn == 0.0) {
            std::fill(x.begin(), x.end(), 0.0);
            return {0, 0.0};
        }
        S.apply(x.data(), t.data(), alpha, 0.5);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
        rh = r;
        cplx rho = 1.0, al = 1.0, om = 1.0;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        double rel = vnorm(r) / bn;
        if (rel <= tol) return {0, rel};
        for (int it = 1; it <= max_iter; ++it) {
            cplx rho1 = cdot(rh, r);
            if (std::abs(rho1) == 0.0) throw StageError("BiCGSTAB breakdown (rho = 0)");
            cplx beta = (rho1 / rho) * (al / om);
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - om * v[i]);
            precond(p, ph);
            S.apply(ph.data(), v.data(), alpha, 0.5);
            cplx den = cdot(rh, v);
            if (std::abs(den) == 0.0) throw StageError("BiCGSTAB breakdown (r^.v = 0)");
            al = rho1 / den;
            for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - al * v[i];
            if (vnorm(s) / bn <= tol) {
                for (std::size_t i = 0; i < n; ++i) x[i] += al * ph[i];
                return {it, vnorm(s) / bn};
            }
            precond(s, sh);
            S.apply(sh.data(), t.data(), alpha, 0.5);
            double tt = std::real(cdot(t, t));
            om = tt > 0.0 ? cdot(t, s) / tt : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += al * ph[i] + om * sh[i];
                r[i] = s[i] - om * t[i];
            }
            rel = vnorm(r) / bn;
            if (rel <= tol) return {it, rel};
            if (std::abs(om) == 0.0) throw StageError("BiCGSTAB breakdown (omega = 0)");
            rho = rho1;
        }
        std::ostringstream os;
        os << "BiCGSTAB did not converge in " << max_iter << " iterations (relative residual " << rel << ")";
        throw StageError(os.str());
    }
};

} // namespace

SolverStats march_ibvp(const VectorField& A, const ScalarSpaceTimeField& q, const BoundaryInput& g,
                       const ComplexSpaceTimeField* F, const SolverOptions& opt,
                       const LevelObserver& observer) {
    const Grid& G = A.grid;
    G.validate();
    if (!(q.grid == G) || !(g.u0.grid == G) || g.f.nlev != G.levels())
        throw ConfigError("solve_ibvp: coefficient/data grids disagree");
    const std::size_t n = G.nodes();
    const double dt = G.dt();
    const cplx I(0.0, 1.0);
    const bool weighted = opt.weight[0] != 0.0 || opt.weight[1] != 0.0 || opt.weight[2] != 0.0;

    std::vector<double> W(n, 1.0);
    if (weighted)
        for (int k = 0; k <= G.Nx; ++k)
            for (int j = 0; j <= G.Nx; ++j)
                for (int i = 0; i <= G.Nx; ++i) {
                    Vec3 x = G.x(i, j, k);
                    W[G.idx(i, j, k)] = std::exp(opt.weight[0] * (x[0] - 0.5) + opt.weight[1] * (x[1] - 0.5) +
                                                 opt.weight[2] * (x[2] - 0.5));
                }

    Stencil S(A, opt.weight);
    Krylov K(S, I / dt);
    const bool static_q = q.is_static();

    std::vector<cplx> z(n), zb(n), rhs(n), x(n), hz(n);
    ComplexField phys(G);
    for (std::size_t p = 0; p < n; ++p) z[p] = g.u0[p] / W[p];
    // boundary entries of level 0 come from f
    auto load_boundary = [&](int m, std::vector<cplx>& dst) {
        for (int fc = 0; fc < 6; ++fc)
            for (int b = 0; b <= G.Nx; ++b)
                for (int a = 0; a <= G.Nx; ++a) {
                    std::size_t p = face_node(G, fc, a, b);
                    dst[p] = g.f.at(m, fc, a, b) / W[p];
                }
    };
    load_boundary(0, z);
    auto emit = [&](int m) {
        for (std::size_t p = 0; p < n; ++p) phys[p] = z[p] * W[p];
        if (observer) observer(m, phys);
    };
    emit(0);

    SolverStats stats;
    for (int m = 0; m < G.Nt; ++m) {
        if (m == 0 || !static_q) {
            const double* qa = q.level(m);
            const double* qb = q.level(m + 1);
            for (std::size_t p = 0; p < n; ++p) S.qh[p] = 0.5 * (qa[p] + qb[p]);
            K.refresh_diag();
        }
        std::fill(zb.begin(), zb.end(), 0.0);
        load_boundary(m + 1, zb);
        // rhs = (i/dt) z^m - H(z^m + zb^{m+1})/2 + F^{m+1/2}
        for (std::size_t p = 0; p < n; ++p) hz[p] = z[p] + zb[p];
        S.apply(hz.data(), rhs.data(), 0.0, -0.5);
        for (int k = 1; k < G.Nx; ++k)
            for (int j = 1; j < G.Nx; ++j)
                for (int i = 1; i < G.Nx; ++i) {
                    std::size_t p = G.idx(i, j, k);
                    rhs[p] += I / dt * z[p];
                    if (F) rhs[p] += 0.5 * (F->level(m)[p] + F->level(m + 1)[p]) / W[p];
                }
        std::fill(x.begin(), x.end(), 0.0);
        // warm start from the previous interior values
        for (int k = 1; k < G.Nx; ++k)
            for (int j = 1; j < G.Nx; ++j)
                for (int i = 1; i < G.Nx; ++i) {
                    std::size_t p = G.idx(i, j, k);
                    x[p] = z[p];
                }
        auto [its, res] = K.solve(rhs, x, opt.tol, opt.max_iter);
        stats.steps++;
        stats.max_iterations = std::max(stats.max_iterations, its);
        stats.total_iterations += its;
        stats.worst_residual = std::max(stats.worst_residual, res);
        for (std::size_t p = 0; p < n; ++p) z[p] = x[p] + zb[p];
        emit(m + 1);
    }
    return stats;
}

SpaceTimeSolution solve_ibvp(const VectorField& A, const ScalarSpaceTimeField& q, const BoundaryInput& g,
                             const ComplexSpaceTimeField* F, const SolverOptions& opt) {
    const Grid& G = A.grid;
    SpaceTimeSolution sol;
    sol.grid = G;
    sol.u = ComplexSpaceTimeField(G);
    sol.l2.assign(G.levels(), 0.0);
    sol.h1.assign(G.levels(), 0.0);
    sol.stats = march_ibvp(A, q, g, F, opt, [&](int m, const ComplexField& u) {
        std::copy(u.v.begin(), u.v.end(), sol.u.level(m));
        sol.l2[m] = l2_omega(u);
        double gsq = 0.0;
        for (int k = 0; k <= G.Nx; ++k)
            for (int j = 0; j <= G.Nx; ++j)
                for (int i = 0; i <= G.Nx; ++i) {
                    double wt = trap_weight(i, G.Nx) * trap_weight(j, G.Nx) * trap_weight(k, G.Nx);
                    for (int a = 0; a < 3; ++a) gsq += wt * std::norm(partial(u, a, i, j, k));
                }
        gsq *= std::pow(G.h(), 3);
        sol.h1[m] = std::sqrt(sol.l2[m] * sol.l2[m] + gsq);
    });
    return sol;
}

std::string to_string(TraceStencil s) { return s == TraceStencil::FirstOrder ? "first_order" : "second_order"; }

TraceStencil parse_trace_stencil(const std::string& s) {
    if (s == "first_order") return TraceStencil::FirstOrder;
    if (s == "second_order") return TraceStencil::SecondOrder;
    throw ConfigError("unknown trace stencil '" + s + "'");
}

void neumann_trace_level(const ComplexField& u, const VectorField& A, TraceStencil st, FaceSeries& out, int m) {
    const Grid& g = u.grid;
    const double h = g.h();
    const cplx I(0.0, 1.0);
    for (int fc = 0; fc < 6; ++fc) {
        int axis = fc / 2;
        double nu = (fc % 2) ? 1.0 : -1.0;
        for (int b = 0; b <= g.Nx; ++b)
            for (int a = 0; a <= g.Nx; ++a) {
                std::size_t p0 = face_node(g, fc, a, b, 0), p1 = face_node(g, fc, a, b, 1);
                cplx d;
                if (st == TraceStencil::FirstOrder) {
                    d = (u[p0] - u[p1]) / h;
                } else {
                    std::size_t p2 = face_node(g, fc, a, b, 2);
                    d = (3.0 * u[p0] - 4.0 * u[p1] + u[p2]) / (2.0 * h);
                }
                out.at(m, fc, a, b) = d + I * A.c[axis][p0] * nu * u[p0];
            }
    }
}

FaceSeries magnetic_neumann_trace(const SpaceTimeSolution& u, const VectorField& A, TraceStencil st) {
    const Grid& g = u.grid;
    FaceSeries out(g, g.levels());
    ComplexField lv(g);
    for (int m = 0; m <= g.Nt; ++m) {
        std::copy(u.u.level(m), u.u.level(m) + g.nodes(), lv.v.begin());
        neumann_trace_level(lv, A, st, out, m);
    }
    return out;
}

DtnRecord dtn_apply(const VectorField& A, const ScalarSpaceTimeField& q, const BoundaryInput& g,
                    const DtnOptions& opt, SolverStats* stats) {
    const Grid& G = A.grid;
    DtnRecord rec;
    rec.grid = G;
    rec.stencil = opt.stencil;
    rec.trace = FaceSeries(G, G.levels());
    rec.final_state = ComplexField(G);
    SolverStats s = march_ibvp(A, q, g, nullptr, opt.solver, [&](int m, const ComplexField& u) {
        neumann_trace_level(u, A, opt.stencil, rec.trace, m);
        if (m == G.Nt) rec.final_state = u;
    });
    if (stats) *stats = s;
    return rec;
}

DtnRecord record_difference(const DtnRecord& a, const DtnRecord& b) {
    if (!(a.grid == b.grid) || a.stencil != b.stencil)
        throw ConfigError("record difference needs matching grids and trace stencils");
    DtnRecord d = a;
    for (std::size_t p = 0; p < d.final_state.size(); ++p) d.final_state[p] -= b.final_state[p];
    for (std::size_t p = 0; p < d.trace.v.size(); ++p) d.trace.v[p] -= b.trace.v[p];
    return d;
}

double l2_omega(const ComplexField& u) { return discrete_norm(u, NormId::L2); }

double l2_sigma(const FaceSeries& f) {
    const Grid& g = f.grid;
    double s = 0.0;
    for (int m = 0; m < f.nlev; ++m) {
        double wt = (f.nlev > 1) ? trap_weight(m, f.nlev - 1) * g.dt() : 1.0;
        for (int fc = 0; fc < 6; ++fc)
            for (int b = 0; b <= g.Nx; ++b)
                for (int a = 0; a <= g.Nx; ++a)
                    s += wt * trap_weight(a, g.Nx) * trap_weight(b, g.Nx) * g.h() * g.h() *
                         std::norm(f.at(m, fc, a, b));
    }
    return std::sqrt(s);
}

EnergyReport energy_report(const SpaceTimeSolution& u, const BoundaryInput& g) {
    const Grid& G = u.grid;
    EnergyReport r;
    double h1max = 0.0;
    for (double v : u.h1) h1max = std::max(h1max, v);
    VectorField zeroA(G);
    FaceSeries tr = magnetic_neumann_trace(u, zeroA, TraceStencil::SecondOrder);
    r.lhs = h1max + l2_sigma(tr);

    // |u0|_{H2}: values, first and second differences on the node set
    const double h = G.h();
    double s = 0.0;
    for (int k = 1; k < G.Nx; ++k)
        for (int j = 1; j < G.Nx; ++j)
            for (int i = 1; i < G.Nx; ++i) {
                const auto& w = g.u0;
                cplx c = w(i, j, k);
                s += std::norm(c);
                for (int a = 0; a < 3; ++a) s += std::norm(partial(w, a, i, j, k));
                int di[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
                for (int a = 0; a < 3; ++a) {
                    cplx d2 = (w(i + di[a][0], j + di[a][1], k + di[a][2]) - 2.0 * c +
                               w(i - di[a][0], j - di[a][1], k - di[a][2])) /
                              (h * h);
                    s += std::norm(d2);
                }
            }
    double u0h2 = std::sqrt(s * h * h * h);
    // f: L2, d_t and tangential second differences on each face
    double fs = 0.0;
    for (int m = 0; m <= G.Nt; ++m)
        for (int fc = 0; fc < 6; ++fc)
            for (int b = 0; b <= G.Nx; ++b)
                for (int a = 0; a <= G.Nx; ++a) {
                    cplx c = g.f.at(m, fc, a, b);
                    double t = std::norm(c);
                    if (m < G.Nt) t += std::norm((g.f.at(m + 1, fc, a, b) - c) / G.dt());
                    if (a > 0 && a < G.Nx)
                        t += std::norm((g.f.at(m, fc, a + 1, b) - 2.0 * c + g.f.at(m, fc, a - 1, b)) / (h * h));
                    if (b > 0 && b < G.Nx)
                        t += std::norm((g.f.at(m, fc, a, b + 1) - 2.0 * c + g.f.at(m, fc, a, b - 1)) / (h * h));
                    fs += t * trap_weight(m, G.Nt) * G.dt() * h * h;
                }
    r.rhs = u0h2 + std::sqrt(fs);
    if (r.rhs == 0.0) {
        r.ratio_defined = false;
        r.ratio = std::nan("");
    } else {
        r.ratio = r.lhs / r.rhs;
    }
    double n0 = u.l2.empty() ? 0.0 : u.l2[0];
    for (double v : u.l2) r.l2_drift = std::max(r.l2_drift, n0 > 0.0 ? std::abs(v - n0) / n0 : std::abs(v));
    return r;
}

} // namespace msr
