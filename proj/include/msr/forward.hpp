#pragma once

#include "msr/fields.hpp"

#include <functional>
#include <optional>
#include <string>

namespace msr {

// Per-face boundary arrays for each time level. Face f has normal axis f/2 and
// sits at x_axis = 0 (f even) or 1 (f odd); (a, b) run over the other two axes
// in increasing order, a fastest.
struct FaceSeries {
    Grid grid;
    int nlev = 0;
    std::vector<cplx> v;

    FaceSeries() = default;
    FaceSeries(const Grid& g, int levels)
        : grid(g), nlev(levels), v(std::size_t(levels) * 6 * g.np() * g.np(), 0.0) {}

    std::size_t face_size() const { return std::size_t(grid.np()) * grid.np(); }
    cplx* face(int m, int f) { return v.data() + (std::size_t(m) * 6 + f) * face_size(); }
    const cplx* face(int m, int f) const { return v.data() + (std::size_t(m) * 6 + f) * face_size(); }
    cplx& at(int m, int f, int a, int b) { return face(m, f)[a + std::size_t(grid.np()) * b]; }
    const cplx& at(int m, int f, int a, int b) const { return face(m, f)[a + std::size_t(grid.np()) * b]; }
};

// volume index of face node (a, b) on face f, and of the node `depth` cells inward
std::size_t face_node(const Grid& g, int f, int a, int b, int depth = 0);

struct BoundaryInput {
    ComplexField u0;
    FaceSeries f;
    bool compat_f0 = true;   // f(., 0) = 0
    bool compat_dtf0 = true; // d_t f(., 0) = 0
    void update_compatibility();
};

BoundaryInput zero_input(const Grid& g);
// u0 from level 0 and f from the boundary nodes of every level of a space-time field
BoundaryInput input_from_levels(const Grid& g, const std::function<const cplx*(int)>& level);

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 1000;
    // solve for z = u e^{-b.(x - x_c)} with b = weight; pure diagonal scaling
    Vec3 weight{0.0, 0.0, 0.0};
};

struct SolverStats {
    int steps = 0;
    int max_iterations = 0;
    double total_iterations = 0;
    double worst_residual = 0.0;
};

struct SpaceTimeSolution {
    Grid grid;
    ComplexSpaceTimeField u;
    std::vector<double> l2, h1; // per level
    SolverStats stats;
};

// Crank-Nicolson: i(u^{m+1}-u^m)/dt + H^{m+1/2}(u^{m+1}+u^m)/2 = (F^m + F^{m+1})/2, with
// H^{m+1/2} = D_A + (q^m + q^{m+1})/2 and D_A the Hermitian magnetic Laplacian.
// The observer receives every physical level u^m (m = 0..Nt) as it is produced.
using LevelObserver = std::function<void(int, const ComplexField&)>;
SolverStats march_ibvp(const VectorField& A, const ScalarSpaceTimeField& q, const BoundaryInput& g,
                       const ComplexSpaceTimeField* F, const SolverOptions& opt,
                       const LevelObserver& observer);

SpaceTimeSolution solve_ibvp(const VectorField& A, const ScalarSpaceTimeField& q, const BoundaryInput& g,
                             const ComplexSpaceTimeField* F = nullptr, const SolverOptions& opt = {});

enum class TraceStencil { SecondOrder, FirstOrder };
std::string to_string(TraceStencil s);
TraceStencil parse_trace_stencil(const std::string& s);

// (d_nu + i A.nu) u on every face node of one level. FirstOrder is (u_b - u_{b-1})/h,
// the difference that makes the discrete Green identity exact.
void neumann_trace_level(const ComplexField& u, const VectorField& A, TraceStencil st, FaceSeries& out, int m);
FaceSeries magnetic_neumann_trace(const SpaceTimeSolution& u, const VectorField& A,
                                  TraceStencil st = TraceStencil::SecondOrder);

struct ProbeMeta {
    double sigma = 0.0;
    Vec3 xi{0, 0, 0};
    Vec3 y{0, 0, 0};
    int side = 2;
    std::string label;
};

struct DtnRecord {
    Grid grid;
    ComplexField final_state;
    FaceSeries trace;
    TraceStencil stencil = TraceStencil::SecondOrder;
    ProbeMeta meta;
};

struct DtnOptions {
    SolverOptions solver;
    TraceStencil stencil = TraceStencil::SecondOrder;
};

DtnRecord dtn_apply(const VectorField& A, const ScalarSpaceTimeField& q, const BoundaryInput& g,
                    const DtnOptions& opt = {}, SolverStats* stats = nullptr);

// a - b, componentwise (metadata from a)
DtnRecord record_difference(const DtnRecord& a, const DtnRecord& b);

struct EnergyReport {
    double lhs = 0.0; // max_t |u|_{H1} + |d_nu u|_{L2(Sigma)}
    double rhs = 0.0; // |u0|_{H2} + |f|_{H^{2,1}(Sigma)} surrogate
    double ratio = 0.0;
    bool ratio_defined = true;
    double l2_drift = 0.0; // max_m | |u^m| - |u^0| | / |u^0|
};

EnergyReport energy_report(const SpaceTimeSolution& u, const BoundaryInput& g);

// discrete L2 norm on Omega (trapezoid) and on Sigma (trapezoid per face, all levels)
double l2_omega(const ComplexField& u);
double l2_sigma(const FaceSeries& f);

} // namespace msr
