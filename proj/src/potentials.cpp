#include "msr/potentials.hpp"
#include "msr/diffops.hpp"

#include <cmath>
#include <numbers>

namespace msr {

namespace {

// max_s s (1-s^2)^3 d/ds-scale of the profile: |grad beta| <= kGradMax / r
const double kGradMax = 8.0 / std::sqrt(7.0) * std::pow(6.0 / 7.0, 3);

Vec3 unit(const Vec3& d) {
    double nd = norm(d);
    if (!(nd > 0.0)) throw ConfigError("bump direction must be nonzero");
    return {d[0] / nd, d[1] / nd, d[2] / nd};
}

void check_interior(const Bump& b, double margin) {
    if (!(b.radius > 0.0) || !std::isfinite(b.amplitude))
        throw ConfigError("bump radius must be positive and amplitude finite");
    for (int j = 0; j < 3; ++j)
        if (b.center[j] - b.radius < margin || b.center[j] + b.radius > 1.0 - margin)
            throw ConfigError("bump support touches the boundary");
}

double psi_scale(const Bump& b) { return b.amplitude * b.radius / kGradMax; }

} // namespace

double bump_profile(double s) {
    if (s >= 1.0) return 0.0;
    double u = 1.0 - s * s;
    return u * u * u * u;
}

Vec3 potential_value(const std::vector<Bump>& recipe, bool divergence_free, const Vec3& x) {
    Vec3 a{0, 0, 0};
    for (const auto& b : recipe) {
        Vec3 d = unit(b.direction);
        Vec3 y{x[0] - b.center[0], x[1] - b.center[1], x[2] - b.center[2]};
        double s2 = dot(y, y) / (b.radius * b.radius);
        if (s2 >= 1.0) continue;
        double u = 1.0 - s2;
        if (!divergence_free) {
            double v = b.amplitude * u * u * u * u;
            for (int j = 0; j < 3; ++j) a[j] += v * d[j];
        } else {
            double gscale = -8.0 * u * u * u / (b.radius * b.radius) * psi_scale(b);
            Vec3 g{gscale * y[0], gscale * y[1], gscale * y[2]};
            a[0] += g[1] * d[2] - g[2] * d[1];
            a[1] += g[2] * d[0] - g[0] * d[2];
            a[2] += g[0] * d[1] - g[1] * d[0];
        }
    }
    return a;
}

VectorField make_admissible_potential(const Grid& g, const std::vector<Bump>& recipe,
                                      bool divergence_free) {
    g.validate();
    for (const auto& b : recipe) check_interior(b, g.h());
    VectorField out(g);
    if (recipe.empty()) return out;
    if (!divergence_free) {
        for (int k = 0; k <= g.Nx; ++k)
            for (int j = 0; j <= g.Nx; ++j)
                for (int i = 0; i <= g.Nx; ++i) {
                    Vec3 a = potential_value(recipe, false, g.x(i, j, k));
                    for (int c = 0; c < 3; ++c) out.c[c](i, j, k) = a[c];
                }
        return out;
    }
    VectorField psi(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) {
                Vec3 x = g.x(i, j, k);
                for (const auto& b : recipe) {
                    Vec3 d = unit(b.direction);
                    Vec3 y{x[0] - b.center[0], x[1] - b.center[1], x[2] - b.center[2]};
                    double v = psi_scale(b) * bump_profile(norm(y) / b.radius);
                    for (int c = 0; c < 3; ++c) psi.c[c](i, j, k) += v * d[c];
                }
            }
    return vector_curl(psi);
}

double recipe_third_derivative_bound(const std::vector<Bump>& recipe, bool divergence_free) {
    double mx = 0.0;
    const double d = 1e-3;
    const int M = 40;
    for (const auto& b : recipe) {
        for (int k = 0; k <= M; ++k)
            for (int j = 0; j <= M; ++j)
                for (int i = 0; i <= M; ++i) {
                    Vec3 x{b.center[0] + b.radius * (2.0 * i / M - 1.0),
                           b.center[1] + b.radius * (2.0 * j / M - 1.0),
                           b.center[2] + b.radius * (2.0 * k / M - 1.0)};
                    for (int c = 0; c < 3; ++c) {
                        auto f = [&](double s) {
                            Vec3 y = x;
                            y[c] += s;
                            return potential_value(recipe, divergence_free, y)[c];
                        };
                        double t3 = (f(2 * d) - 2 * f(d) + 2 * f(-d) - f(-2 * d)) / (2 * d * d * d);
                        mx = std::max(mx, std::abs(t3));
                    }
                }
    }
    return mx;
}

TimeProfile parse_time_profile(const std::string& s) {
    if (s == "constant") return TimeProfile::Constant;
    if (s == "sin2") return TimeProfile::SinSquared;
    if (s == "cos2pi") return TimeProfile::Cos2Pi;
    if (s == "gauss") return TimeProfile::Gaussian;
    throw ConfigError("unknown time profile '" + s + "'");
}

std::string to_string(TimeProfile p) {
    switch (p) {
    case TimeProfile::Constant: return "constant";
    case TimeProfile::SinSquared: return "sin2";
    case TimeProfile::Cos2Pi: return "cos2pi";
    case TimeProfile::Gaussian: return "gauss";
    }
    return "constant";
}

double time_profile(const ScalarRecipe& r, double t, double T) {
    using std::numbers::pi;
    switch (r.profile) {
    case TimeProfile::Constant: return 1.0;
    case TimeProfile::SinSquared: {
        double s = std::sin(pi * t / T);
        return s * s;
    }
    case TimeProfile::Cos2Pi: return std::cos(2.0 * pi * t);
    case TimeProfile::Gaussian: {
        double z = (t / T - r.t0) / r.width;
        return std::exp(-0.5 * z * z);
    }
    }
    return 1.0;
}

double scalar_value(const ScalarRecipe& r, const Vec3& x, double t, double T) {
    double s = 0.0;
    for (const auto& b : r.bumps) {
        Vec3 y{x[0] - b.center[0], x[1] - b.center[1], x[2] - b.center[2]};
        s += b.amplitude * bump_profile(norm(y) / b.radius);
    }
    return s * time_profile(r, t, T);
}

ScalarSpaceTimeField make_scalar_potential(const Grid& g, const ScalarRecipe& r) {
    g.validate();
    for (const auto& b : r.bumps) check_interior(b, g.h());
    ScalarSpaceTimeField q(g);
    RealField base(g);
    for (int k = 0; k <= g.Nx; ++k)
        for (int j = 0; j <= g.Nx; ++j)
            for (int i = 0; i <= g.Nx; ++i) {
                Vec3 x = g.x(i, j, k);
                double s = 0.0;
                for (const auto& b : r.bumps) {
                    Vec3 y{x[0] - b.center[0], x[1] - b.center[1], x[2] - b.center[2]};
                    s += b.amplitude * bump_profile(norm(y) / b.radius);
                }
                base(i, j, k) = s;
            }
    for (int m = 0; m <= g.Nt; ++m) {
        double th = time_profile(r, m * g.dt(), g.T);
        double* lv = q.level(m);
        for (std::size_t p = 0; p < g.nodes(); ++p) lv[p] = base[p] * th;
    }
    return q;
}

} // namespace msr
