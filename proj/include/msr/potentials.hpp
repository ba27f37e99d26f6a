#pragma once

#include "msr/fields.hpp"

#include <string>
#include <vector>

namespace msr {

// Compactly supported polynomial bump a * d * (1 - |x-c|^2/r^2)^4.
struct Bump {
    Vec3 center{0.5, 0.5, 0.5};
    double radius = 0.25;
    double amplitude = 0.1;
    Vec3 direction{0.0, 0.0, 1.0};
};

double bump_profile(double s);

// In divergence-free mode each bump is a vector potential psi scaled so that
// |curl psi| <= amplitude, and A is the central-difference curl of psi, which
// makes the central divergence of A vanish to roundoff.
VectorField make_admissible_potential(const Grid& g, const std::vector<Bump>& recipe,
                                      bool divergence_free);

// Continuum version of the same recipe (curl taken analytically).
Vec3 potential_value(const std::vector<Bump>& recipe, bool divergence_free, const Vec3& x);

// max over the support of |d^3 A_j / dx_j^3|, from the analytic field
double recipe_third_derivative_bound(const std::vector<Bump>& recipe, bool divergence_free);

enum class TimeProfile { Constant, SinSquared, Cos2Pi, Gaussian };

TimeProfile parse_time_profile(const std::string& s);
std::string to_string(TimeProfile p);

struct ScalarRecipe {
    std::vector<Bump> bumps;  // direction unused
    TimeProfile profile = TimeProfile::Constant;
    double t0 = 0.5;     // Gaussian centre, in units of T
    double width = 0.15; // Gaussian width, in units of T
};

double time_profile(const ScalarRecipe& r, double t, double T);
double scalar_value(const ScalarRecipe& r, const Vec3& x, double t, double T);
ScalarSpaceTimeField make_scalar_potential(const Grid& g, const ScalarRecipe& r);

} // namespace msr
