#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace msr {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Space-time grid on (0,1)^n x (0,T). Grid-backed fields are three-dimensional;
// the frequency algebra in frame.hpp works for any n >= 3.
struct Grid {
    int n = 3;
    int Nx = 16;
    int Nt = 64;
    double T = 1.0;

    double h() const { return 1.0 / Nx; }
    double dt() const { return T / Nt; }
    int np() const { return Nx + 1; }
    std::size_t nodes() const { return std::size_t(np()) * np() * np(); }
    int levels() const { return Nt + 1; }
    std::size_t idx(int i, int j, int k) const {
        return std::size_t(i) + std::size_t(np()) * (std::size_t(j) + std::size_t(np()) * k);
    }
    Vec3 x(int i, int j, int k) const { return {i * h(), j * h(), k * h()}; }
    bool on_boundary(int i, int j, int k) const {
        return i == 0 || j == 0 || k == 0 || i == Nx || j == Nx || k == Nx;
    }
    // nodes whose distance (in cells) to the boundary is at least d
    bool depth_at_least(int i, int j, int k, int d) const {
        return i >= d && j >= d && k >= d && i <= Nx - d && j <= Nx - d && k <= Nx - d;
    }
    void validate() const;
    bool operator==(const Grid& o) const {
        return n == o.n && Nx == o.Nx && Nt == o.Nt && T == o.T;
    }
};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline cplx dot(const CVec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline cplx dotc(const CVec3& a, const CVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

} // namespace msr
