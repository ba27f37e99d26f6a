#include "msr/noise.hpp"

#include <cmath>
#include <random>

namespace msr {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t job, std::uint64_t sub) {
    return splitmix64(splitmix64(splitmix64(master) ^ job) ^ (sub * 0xd1b54a32d192ed03ULL));
}

double probe_norm(const BoundaryInput& g) {
    double a = l2_omega(g.u0), b = l2_sigma(g.f);
    return std::sqrt(a * a + b * b);
}

double record_norm(const DtnRecord& r) {
    double a = l2_omega(r.final_state), b = l2_sigma(r.trace);
    return std::sqrt(a * a + b * b);
}

DtnRecord noise_record(const Grid& g, double probe, double eta, std::uint64_t seed) {
    if (eta < 0.0) throw ConfigError("noise level must be >= 0");
    DtnRecord n;
    n.grid = g;
    n.final_state = ComplexField(g);
    n.trace = FaceSeries(g, g.levels());
    n.stencil = TraceStencil::FirstOrder;
    if (eta == 0.0 || probe == 0.0) return n;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    for (auto& z : n.final_state.v) z = cplx(nd(rng), nd(rng));
    for (auto& z : n.trace.v) z = cplx(nd(rng), nd(rng));
    const double s = eta * probe / record_norm(n);
    for (auto& z : n.final_state.v) z *= s;
    for (auto& z : n.trace.v) z *= s;
    return n;
}

DtnRecord inject_noise(const DtnRecord& r, double probe, double eta, std::uint64_t seed) {
    DtnRecord out = r;
    if (eta == 0.0) return out;
    DtnRecord n = noise_record(r.grid, probe, eta, seed);
    for (std::size_t p = 0; p < out.final_state.size(); ++p) out.final_state[p] += n.final_state[p];
    for (std::size_t p = 0; p < out.trace.v.size(); ++p) out.trace.v[p] += n.trace.v[p];
    return out;
}

} // namespace msr
