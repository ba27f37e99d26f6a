#pragma once

#include "msr/fields.hpp"

#include <vector>

namespace msr {

struct ComplexDirection {
    Vec3 re{1, 0, 0};
    Vec3 im{0, 1, 0};
    void validate() const;
    CVec3 vec() const { return {cplx(re[0], im[0]), cplx(re[1], im[1]), cplx(re[2], im[2])}; }
};

struct TransportOptions {
    int angles = 64;
    double radial_step = 0.5; // in units of h
};

// Cubic lattice of n^3 nodes at origin + h*(i,j,k); used for the padded box.
struct NodeLattice {
    Vec3 origin{0, 0, 0};
    double h = 1.0;
    int n = 1;
    Vec3 x(int i, int j, int k) const {
        return {origin[0] + i * h, origin[1] + j * h, origin[2] + k * h};
    }
};

struct PhaseField {
    ComplexField phi;
    ComplexField source;
    double residual = 0.0;    // max |omega.grad phi - g| on interior nodes
    double bound_ratio = 0.0; // |phi|_inf / |g|_inf
};

// phi(x) = (1/2pi) int int g(x - y1 w_R - y2 w_I) / (y1 + i y2) dy1 dy2 in polar form,
// with g extended by zero and interpolated trilinearly.
PhaseField n_omega_inverse(const ComplexDirection& w, const ComplexField& g,
                           const TransportOptions& opt = {});

// Same integral evaluated on an arbitrary lattice (for example the padded box).
// Nodes with mask[p] == 0 are skipped and left at zero.
std::vector<cplx> n_omega_inverse_on(const ComplexDirection& w, const ComplexField& g,
                                     const NodeLattice& lat, const std::vector<unsigned char>* mask,
                                     const TransportOptions& opt = {});

// max over interior nodes of |(w_R + i w_I).grad phi - g|
double transport_pde_residual(const ComplexDirection& w, const ComplexField& phi, const ComplexField& g);

// max over interior nodes of |w_R.grad phi + i w_I.grad phi + w.A|
double transport_residual(const PhaseField& phi, const VectorField& A, const ComplexDirection& w);

struct PhaseCancellation {
    cplx lhs, rhs;
    double gap = 0.0;
};

// lhs = int w.A e^{i phi} e^{i xi.x}, rhs = int w.A e^{i xi.x}, phi = N_w^{-1}(-w.A)
PhaseCancellation phase_cancellation_check(const VectorField& A, const ComplexDirection& w,
                                           const Vec3& xi, const TransportOptions& opt = {});

ComplexField dot_direction(const ComplexDirection& w, const VectorField& A);

} // namespace msr
