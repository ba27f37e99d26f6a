#pragma once

#include "msr/forward.hpp"

#include <cstdint>

namespace msr {

std::uint64_t splitmix64(std::uint64_t x);
// independent stream seed for (master, job, sub)
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t job, std::uint64_t sub = 0);

// sqrt(|u0|^2_Omega + |f|^2_Sigma)
double probe_norm(const BoundaryInput& g);
// sqrt(|final|^2_Omega + |trace|^2_Sigma)
double record_norm(const DtnRecord& r);
// operational-norm surrogate of a record difference for one probe
inline double operational_norm(const DtnRecord& diff, double probe) {
    return probe > 0.0 ? record_norm(diff) / probe : 0.0;
}

// Pure perturbation with record_norm = eta * probe: complex Gaussian entries on both
// components, rescaled exactly. Zero when eta == 0.
DtnRecord noise_record(const Grid& g, double probe, double eta, std::uint64_t seed);
// record + noise_record(...)
DtnRecord inject_noise(const DtnRecord& r, double probe, double eta, std::uint64_t seed);

} // namespace msr
