#pragma once

#include "msr/functional.hpp"
#include "msr/noise.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace msr {

struct CoefficientPair {
    VectorField A1, A2;
    ScalarSpaceTimeField q1, q2;
    const Grid& grid() const { return A1.grid; }
    void validate() const;
};

// Supplies D = Lambda_1(g) - Lambda_2(g) for a probe g.
class DtnDifferenceOracle {
public:
    virtual ~DtnDifferenceOracle() = default;
    virtual DtnRecord difference(const BoundaryInput& g, const ProbeMeta& meta) const = 0;
};

// Both maps by forward simulation, with first-order traces.
class SimulatedOracle : public DtnDifferenceOracle {
public:
    explicit SimulatedOracle(const CoefficientPair& c, SolverOptions solver = {});
    DtnRecord difference(const BoundaryInput& g, const ProbeMeta& meta) const override;

private:
    const CoefficientPair& c_;
    DtnOptions opt_;
};

// How u_1 is built: from (A_1, q_1) as a GO solution, or as the bare carrier (no
// knowledge of medium 1). u_2 is always the GO solution of (A_2, q_2).
enum class U1Mode { Go, Carrier };

struct ProbeOptions {
    GoOptions go;
    U1Mode u1 = U1Mode::Go;
    bool subtract_volume = false; // remove the (|A_2|^2 - |A_1|^2 + q_1 - q_2) u_2 conj(u_1) term
};

// Noise levels evaluated on top of the clean record; the functional is linear in the
// record, so each level only costs one extra pairing. All levels share one realisation
// per probe (seeded by (seed, job)), so a sweep differs only in scale.
struct NoisePlan {
    std::vector<double> etas;
    std::uint64_t seed = 0;
    std::uint64_t job = 0;
};

struct ProbeResult {
    MatchedPair pair;
    cplx functional = 0.0;
    std::vector<cplx> noisy; // functional + pairing with the noise record, per eta
    cplx volume_term = 0.0;  // only filled when subtract_volume is set
    double probe_norm = 0.0;
    double dtn_opnorm = 0.0; // |D| / |g|
    double carrier_norm = 0.0; // |u_1|_Sigma
    double u1_residual = 0.0, u2_residual = 0.0;
    double u1_w = 0.0, u2_w = 0.0; // |w|_{L2 H1}
    int picard_iterations = 0;
};

// One side-2 frame (side 1 is the same frame with side = 1): match dispersion, build
// u_1, u_2, simulate, pair.
ProbeResult run_probe(const DtnDifferenceOracle& oracle, const CoefficientPair& model, const FrequencyFrame& frame2,
                      double tau, const ProbeOptions& opt, const NoisePlan& noise);

// sum_m dt <(|A_2|^2 - |A_1|^2 + q_1 - q_2)^{m+1/2} u_2^{m+1/2}, u_1^{m+1/2}> on interior nodes
cplx volume_potential_term(const CoefficientPair& c, const ComplexSpaceTimeField& u2,
                           const ComplexSpaceTimeField& u1);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be written by index;
// the first exception is rethrown after all workers stop.
inline void parallel_for_indexed(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs && std::size_t(t) < n; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next++;
                if (i >= n) return;
                {
                    std::lock_guard<std::mutex> lk(mu);
                    if (err) return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace msr
