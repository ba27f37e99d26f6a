#include "msr/functional.hpp"
#include "msr/diffops.hpp"
#include "msr/norms.hpp"

#include <cmath>

namespace msr {

ProbeMeta probe_meta(const GoSolution& u) {
    ProbeMeta m;
    m.sigma = u.frame.sigma;
    m.xi = to_vec3(u.frame.xi);
    m.y = to_vec3(u.frame.y);
    m.side = u.frame.side;
    return m;
}

namespace {

void face_values(const ComplexField& u, FaceSeries& out) {
    const Grid& g = u.grid;
    for (int fc = 0; fc < 6; ++fc)
        for (int b = 0; b <= g.Nx; ++b)
            for (int a = 0; a <= g.Nx; ++a) out.at(0, fc, a, b) = u[face_node(g, fc, a, b)];
}

} // namespace

cplx boundary_functional(const DtnRecord& diff, const ComplexField& u1_final,
                         const std::function<void(int, FaceSeries&)>& u1_faces) {
    const Grid& g = diff.grid;
    if (!(u1_final.grid == g)) throw ConfigError("functional: record and GO grids disagree");
    const double h = g.h(), dt = g.dt();
    cplx fT = 0.0;
    for (std::size_t p = 0; p < g.nodes(); ++p) fT += diff.final_state[p] * std::conj(u1_final[p]);
    fT *= h * h * h;

    FaceSeries a(g, 1), b(g, 1);
    u1_faces(0, a);
    cplx fS = 0.0;
    for (int m = 0; m < g.Nt; ++m) {
        u1_faces(m + 1, b);
        for (int fc = 0; fc < 6; ++fc)
            for (int bb = 0; bb <= g.Nx; ++bb)
                for (int aa = 0; aa <= g.Nx; ++aa) {
                    double w = trap_weight(aa, g.Nx) * trap_weight(bb, g.Nx);
                    cplx d = 0.5 * (diff.trace.at(m, fc, aa, bb) + diff.trace.at(m + 1, fc, aa, bb));
                    cplx uu = 0.5 * (a.at(0, fc, aa, bb) + b.at(0, fc, aa, bb));
                    fS += w * d * std::conj(uu);
                }
        std::swap(a, b);
    }
    fS *= dt * h * h;
    return cplx(0.0, -1.0) * fT - fS;
}

cplx boundary_functional(const DtnRecord& diff, const GoSolution& u1) {
    if (diff.meta.sigma != 0.0 && std::abs(diff.meta.sigma - u1.frame.sigma) > 1e-12)
        throw ConfigError("functional: probe sigma does not match the GO solution");
    if (diff.meta.sigma != 0.0)
        for (int j = 0; j < 3; ++j)
            if (std::abs(diff.meta.xi[j] - u1.frame.xi[j]) > 1e-12)
                throw ConfigError("functional: probe xi does not match the GO solution");
    const Grid& g = u1.grid;
    ComplexField lv(g), fin(g);
    u1.level(g.Nt, fin);
    return boundary_functional(diff, fin, [&](int m, FaceSeries& out) {
        u1.level(m, lv);
        face_values(lv, out);
    });
}

cplx boundary_functional(const DtnRecord& diff, const ComplexSpaceTimeField& u1) {
    const Grid& g = u1.grid;
    ComplexField lv(g), fin(g);
    std::copy(u1.level(g.Nt), u1.level(g.Nt) + g.nodes(), fin.v.begin());
    return boundary_functional(diff, fin, [&](int m, FaceSeries& out) {
        std::copy(u1.level(m), u1.level(m) + g.nodes(), lv.v.begin());
        face_values(lv, out);
    });
}

cplx volume_pairing(const VectorField& A1, const ScalarSpaceTimeField& q1, const VectorField& A2,
                    const ScalarSpaceTimeField& q2, const ComplexSpaceTimeField& u2,
                    const ComplexSpaceTimeField& u1) {
    const Grid& g = u1.grid;
    ComplexField a(g), b(g);
    cplx s = 0.0;
    for (int m = 0; m < g.Nt; ++m) {
        for (std::size_t p = 0; p < g.nodes(); ++p) {
            a[p] = 0.5 * (u2.level(m)[p] + u2.level(m + 1)[p]);
            b[p] = 0.5 * (u1.level(m)[p] + u1.level(m + 1)[p]);
        }
        ComplexField h1 = magnetic_laplacian(A1, a), h2 = magnetic_laplacian(A2, a);
        for (int k = 1; k < g.Nx; ++k)
            for (int j = 1; j < g.Nx; ++j)
                for (int i = 1; i < g.Nx; ++i) {
                    std::size_t p = g.idx(i, j, k);
                    double dq = 0.5 * (q1.level(m)[p] + q1.level(m + 1)[p] - q2.level(m)[p] - q2.level(m + 1)[p]);
                    s += (h1[p] - h2[p] + dq * a[p]) * std::conj(b[p]);
                }
    }
    return s * g.dt() * std::pow(g.h(), 3);
}

} // namespace msr
