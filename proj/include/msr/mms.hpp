#pragma once

#include "msr/forward.hpp"
#include "msr/potentials.hpp"

namespace msr {

// Manufactured solutions for the Crank-Nicolson solver, both built on the plane wave
// e^{i k.x} with a bump potential A (not divergence-free, so the div A term is exercised)
// and a time-dependent bump q.
struct MmsCase {
    std::vector<Bump> A_bumps{Bump{{0.5, 0.5, 0.5}, 0.3, 0.5, {1.0, -0.5, 0.25}}};
    ScalarRecipe q{{Bump{{0.45, 0.5, 0.55}, 0.3, 2.0, {0, 0, 1}}}, TimeProfile::Cos2Pi, 0.5, 0.15};
    Vec3 k{1.0, 2.0, 1.5};
    double omega = 3.0;
    double T = 1.0;
};

struct MmsError {
    int Nx = 0, Nt = 0;
    double error = 0.0; // max over levels of |u_h - u|_Omega / |u|_Omega
};

// Static u = e^{i k.x} with the continuum source (Delta + 2iA.grad + i div A - |A|^2 + q) u.
// Crank-Nicolson reproduces a static solution exactly in time (the midpoint q matches the
// averaged source), so the error is purely spatial.
MmsError mms_space_error(const MmsCase& c, int Nx, int Nt, const SolverOptions& opt = {});

// u = e^{-i omega t} e^{i k.x} with the source i u_t + H_h u built from the discrete
// operator: exact in space, so the error is purely temporal.
MmsError mms_time_error(const MmsCase& c, int Nx, int Nt, const SolverOptions& opt = {});

struct DriftReport {
    double per_step = 0.0;   // max_m | |u^{m+1}| - |u^m| | / |u^0|
    double cumulative = 0.0; // max_m | |u^m| - |u^0| | / |u^0|
};

// f = 0, real A and q, initial state a bump-modulated plane wave.
DriftReport l2_drift(const MmsCase& c, int Nx, int Nt, const SolverOptions& opt = {});

} // namespace msr
