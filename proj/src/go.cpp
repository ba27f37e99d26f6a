#include "msr/go.hpp"
#include "msr/diffops.hpp"

#include <cmath>
#include <sstream>

namespace msr {

ComplexDirection side_direction(const FrequencyFrame& f) {
    const double s = f.sigma;
    const double r = std::sqrt(1.0 - rdot(f.xi, f.xi) / (4.0 * s * s));
    const double sg = f.side == 1 ? 1.0 : -1.0;
    ComplexDirection w;
    for (int j = 0; j < 3; ++j) {
        w.re[j] = r * f.wR[j] - sg * f.xi[j] / (2.0 * s);
        w.im[j] = sg * f.wI[j];
    }
    // renormalise against roundoff
    double nr = norm(w.re), ni = norm(w.im);
    for (int j = 0; j < 3; ++j) {
        w.re[j] /= nr;
        w.im[j] /= ni;
    }
    return w;
}

cplx GoSolution::carrier_at(int i, int j, int k, int m) const {
    Vec3 x = grid.x(i, j, k);
    cplx ph = 0.0;
    for (int a = 0; a < 3; ++a) ph += (x[a] - 0.5) * carrier.rho[a];
    return std::exp(cplx(0.0, -1.0) * ph) * std::pow(carrier.G, double(m - grid.Nt / 2));
}

cplx GoSolution::value(int i, int j, int k, int m) const {
    std::size_t p = grid.idx(i, j, k);
    return carrier_at(i, j, k, m) * (v0[p] + w.level(m)[p]);
}

void GoSolution::level(int m, ComplexField& out) const {
    if (!(out.grid == grid)) out = ComplexField(grid);
    const cplx Gm = std::pow(carrier.G, double(m - grid.Nt / 2));
    const cplx* wl = w.level(m);
    for (int k = 0; k <= grid.Nx; ++k)
        for (int j = 0; j <= grid.Nx; ++j)
            for (int i = 0; i <= grid.Nx; ++i) {
                Vec3 x = grid.x(i, j, k);
                cplx ph = 0.0;
                for (int a = 0; a < 3; ++a) ph += (x[a] - 0.5) * carrier.rho[a];
                std::size_t p = grid.idx(i, j, k);
                out[p] = std::exp(cplx(0.0, -1.0) * ph) * Gm * (v0[p] + wl[p]);
            }
}

ComplexSpaceTimeField GoSolution::field() const {
    ComplexSpaceTimeField u(grid);
    ComplexField lv(grid);
    for (int m = 0; m <= grid.Nt; ++m) {
        level(m, lv);
        std::copy(lv.v.begin(), lv.v.end(), u.level(m));
    }
    return u;
}

namespace {

double smootherstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double cutoff1(double x, double inner, double outer) {
    double d = x < 0.0 ? -x : (x > 1.0 ? x - 1.0 : 0.0);
    if (d <= inner) return 1.0;
    return smootherstep((outer - d) / (outer - inner));
}

double time_taper(int m, int Nt, int Mt) {
    if (m <= Nt) return 1.0;
    int d = std::min(m - Nt, Mt - m);
    double t1 = Nt / 8.0, t0 = (Mt - Nt) / 2.0;
    if (d <= t1) return 1.0;
    return smootherstep((t0 - d) / (t0 - t1));
}

bool all_zero(const ScalarSpaceTimeField& q) { return q.is_zero(); }

} // namespace

GoSolution build_go_solution(const VectorField& A, const ScalarSpaceTimeField& q, const FrequencyFrame& frame,
                             const DiscreteCarrier& carrier, const GoOptions& opt) {
    const Grid& g = A.grid;
    g.validate();
    frame.validate();
    if (!(q.grid == g)) throw ConfigError("A and q grids disagree");
    if (frame.sigma < opt.sigma0) {
        std::ostringstream os;
        os << "GO construction needs sigma >= sigma0 = " << opt.sigma0 << " (got " << frame.sigma << ")";
        throw ConfigError(os.str());
    }
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                if (g.on_boundary(i, j, k)) {
                    std::size_t p = g.idx(i, j, k);
                    if (A.c[0][p] != 0.0 || A.c[1][p] != 0.0 || A.c[2][p] != 0.0)
                        throw ConfigError("GO construction needs A = 0 on the boundary");
                }

    GoSolution sol;
    sol.grid = g;
    sol.frame = frame;
    sol.carrier = carrier;
    sol.omega = side_direction(frame);
    sol.v0 = ComplexField(g, 1.0);
    sol.w = ComplexSpaceTimeField(g);
    sol.phase.phi = ComplexField(g);
    sol.phase.source = ComplexField(g);

    const bool have_A = !A.is_zero();
    const bool have_q = !all_zero(q);
    if (!have_A && !have_q) return sol; // pure carrier, exact

    const bool dynamic = opt.force_dynamic || !q.is_static();
    sol.static_path = !dynamic;
    BoxLattice box = make_box(g, dynamic);
    const int M = box.M, o = box.offset();
    const std::size_t S3 = box.space_size();

    // v0 - 1 = chi (e^{i phi} - 1) on the box
    std::vector<cplx> v0m1(S3, 0.0);
    if (have_A) {
        ComplexField src = dot_direction(sol.omega, A);
        for (auto& z : src.v) z = -z;
        sol.phase.source = src;
        std::vector<double> chi(S3);
        std::vector<unsigned char> mask(S3);
        for (int k = 0; k < M; ++k)
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < M; ++i) {
                    Vec3 x = box.x(i, j, k);
                    double c = 1.0;
                    for (int a = 0; a < 3; ++a) c *= cutoff1(x[a], opt.cutoff_inner, opt.cutoff_outer);
                    std::size_t p = box.idx(i, j, k);
                    chi[p] = c;
                    mask[p] = c > 0.0;
                }
        NodeLattice lat{{box.lo, box.lo, box.lo}, box.h, M};
        std::vector<cplx> phi = n_omega_inverse_on(sol.omega, src, lat, &mask, opt.transport);
        for (std::size_t p = 0; p < S3; ++p) v0m1[p] = chi[p] * (std::exp(cplx(0.0, 1.0) * phi[p]) - 1.0);
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) {
                    std::size_t b = box.idx(i + o, j + o, k + o), p = g.idx(i, j, k);
                    sol.phase.phi[p] = phi[b];
                    sol.v0[p] = 1.0 + v0m1[b];
                }
        sol.phase.residual = transport_pde_residual(sol.omega, sol.phase.phi, src);
        double gi = 0.0, pi = 0.0;
        for (std::size_t p = 0; p < src.size(); ++p) {
            gi = std::max(gi, std::abs(src[p]));
            pi = std::max(pi, std::abs(sol.phase.phi[p]));
        }
        sol.phase.bound_ratio = gi > 0.0 ? pi / gi : 0.0;
        sol.transport_residual = transport_residual(sol.phase, A, sol.omega);
    }

    // source S = -K v0, with K0(1) = 0 exactly
    ConjugatedScheme K(box, carrier, A, have_q ? &q : nullptr);
    std::vector<cplx> v0box(box.size()), S(box.size()), tmp;
    for (int m = 0; m < box.Mt; ++m)
        for (std::size_t p = 0; p < S3; ++p) v0box[p + S3 * m] = 1.0 + v0m1[p];
    {
        std::vector<cplx> d(box.size());
        for (int m = 0; m < box.Mt; ++m)
            for (std::size_t p = 0; p < S3; ++p) d[p + S3 * m] = v0m1[p];
        std::vector<cplx> k0;
        K.apply_k0_compact(d, k0);
        if (dynamic) {
            // static part (free operator and magnetic terms) tapered in the time padding
            ConjugatedScheme Kmag(box, carrier, A, nullptr);
            std::vector<cplx> km, kall;
            if (Kmag.has_coefficients()) Kmag.apply_k1(v0box, km);
            K.apply_k1(v0box, kall);
            for (int m = 0; m < box.Mt; ++m) {
                double th = time_taper(m, g.Nt, box.Mt);
                for (std::size_t p = 0; p < S3; ++p) {
                    std::size_t r = p + S3 * m;
                    cplx st = k0[r] + (km.empty() ? 0.0 : km[r]);
                    S[r] = -(th * st + (kall[r] - (km.empty() ? 0.0 : km[r])));
                }
            }
        } else {
            K.apply_k1(v0box, tmp);
            for (std::size_t r = 0; r < box.size(); ++r) S[r] = -(k0[r] + tmp[r]);
        }
    }
    for (const auto& z : S) sol.source_inf = std::max(sol.source_inf, std::abs(z));

    MultiplierE E(box, carrier, frame.sigma, opt.mult);
    sol.regularized_modes = E.regularized();
    std::vector<cplx> wbox = picard_iterate_G(E, K, S, opt.picard, &sol.picard);
    if (!sol.picard.converged) sol.warnings.push_back("Picard iteration hit max_iter");
    if (sol.picard.contraction > 0.5) {
        std::ostringstream os;
        os << "measured contraction factor " << sol.picard.contraction << " exceeds 1/2";
        sol.warnings.push_back(os.str());
    }
    sol.w = restrict_to_q(box, g, wbox);

    sol.w_l2h1 = l2_hk(sol.w, 1);
    sol.w_l2h2 = l2_hk(sol.w, 2);
    sol.w_dt1_l2h1 = l2_hk_dt(sol.w, 1, 1);
    sol.w_dt2_l2h1 = l2_hk_dt(sol.w, 1, 2);

    // residual of the Crank-Nicolson scheme on Q, carrier divided out
    ComplexField ua(g), ub(g), sum(g);
    sol.level(0, ua);
    double res = 0.0;
    const cplx I(0.0, 1.0);
    for (int m = 0; m < g.Nt; ++m) {
        sol.level(m + 1, ub);
        for (std::size_t p = 0; p < g.nodes(); ++p) sum[p] = ua[p] + ub[p];
        ComplexField Hs = magnetic_laplacian(A, sum);
        for (int k = 1; k < g.Nx; ++k)
            for (int j = 1; j < g.Nx; ++j)
                for (int i = 1; i < g.Nx; ++i) {
                    std::size_t p = g.idx(i, j, k);
                    double qh = 0.5 * (q.level(m)[p] + q.level(m + 1)[p]);
                    cplx r = I * (ub[p] - ua[p]) / g.dt() + 0.5 * (Hs[p] + qh * sum[p]);
                    res = std::max(res, std::abs(r / sol.carrier_at(i, j, k, m)));
                }
        std::swap(ua, ub);
    }
    sol.residual = sol.source_inf > 0.0 ? res / sol.source_inf : res;
    if (sol.residual > opt.residual_tol) {
        std::ostringstream os;
        os << "GO residual " << sol.residual << " exceeds tolerance " << opt.residual_tol;
        if (!sol.warnings.empty()) os << " (" << sol.warnings.front() << ")";
        throw StageError(os.str());
    }
    return sol;
}

BoundaryInput go_probe(const GoSolution& u) {
    const Grid& g = u.grid;
    ComplexField lv(g);
    return input_from_levels(g, [&](int m) -> const cplx* {
        u.level(m, lv);
        return lv.v.data();
    });
}

} // namespace msr
