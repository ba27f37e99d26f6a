#pragma once

#include "msr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace msr {

template <class T>
struct NodeField {
    Grid grid;
    std::vector<T> v;

    NodeField() = default;
    explicit NodeField(const Grid& g, T fill = T{}) : grid(g), v(g.nodes(), fill) {}

    T& operator()(int i, int j, int k) { return v[grid.idx(i, j, k)]; }
    const T& operator()(int i, int j, int k) const { return v[grid.idx(i, j, k)]; }
    T& operator[](std::size_t p) { return v[p]; }
    const T& operator[](std::size_t p) const { return v[p]; }
    std::size_t size() const { return v.size(); }
};

using RealField = NodeField<double>;
using ComplexField = NodeField<cplx>;

struct VectorField {
    Grid grid;
    std::array<RealField, 3> c;

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g), c{RealField(g), RealField(g), RealField(g)} {}

    Vec3 at(std::size_t p) const { return {c[0][p], c[1][p], c[2][p]}; }
    bool is_zero() const {
        for (const auto& f : c)
            for (double a : f.v)
                if (a != 0.0) return false;
        return true;
    }
    // nodes where any component is nonzero
    std::vector<unsigned char> support_mask() const;
    double max_abs() const;
};

// Values at time levels t_m = m dt, m = 0..Nt.
template <class T>
struct SpaceTimeField {
    Grid grid;
    std::vector<T> v;

    SpaceTimeField() = default;
    explicit SpaceTimeField(const Grid& g, T fill = T{})
        : grid(g), v(g.nodes() * g.levels(), fill) {}

    T* level(int m) { return v.data() + std::size_t(m) * grid.nodes(); }
    const T* level(int m) const { return v.data() + std::size_t(m) * grid.nodes(); }
    T& operator()(int i, int j, int k, int m) { return level(m)[grid.idx(i, j, k)]; }
    const T& operator()(int i, int j, int k, int m) const { return level(m)[grid.idx(i, j, k)]; }
    bool is_zero() const {
        return std::all_of(v.begin(), v.end(), [](const T& a) { return a == T{}; });
    }
    bool is_static() const;
};

using ScalarSpaceTimeField = SpaceTimeField<double>;
using ComplexSpaceTimeField = SpaceTimeField<cplx>;

template <class T>
bool SpaceTimeField<T>::is_static() const {
    const std::size_t nn = grid.nodes();
    for (int m = 1; m <= grid.Nt; ++m)
        for (std::size_t p = 0; p < nn; ++p)
            if (level(m)[p] != level(0)[p]) return false;
    return true;
}

// Antisymmetric 2-form; stores the (0,1), (0,2), (1,2) components.
struct CurlField {
    Grid grid;
    std::array<RealField, 3> s;

    CurlField() = default;
    explicit CurlField(const Grid& g) : grid(g), s{RealField(g), RealField(g), RealField(g)} {}

    static int slot(int j, int k) { return (j == 0) ? (k == 1 ? 0 : 1) : 2; }
    double operator()(int j, int k, std::size_t p) const {
        if (j == k) return 0.0;
        return j < k ? s[slot(j, k)][p] : -s[slot(k, j)][p];
    }
};

} // namespace msr
