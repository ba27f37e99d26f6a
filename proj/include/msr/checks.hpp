#pragma once

#include "msr/config.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace msr {

struct CheckResult {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail; // measured values, one line
    std::vector<std::pair<std::string, double>> metrics;
    void metric(const std::string& k, double v) { metrics.emplace_back(k, v); }
};

// quick: smaller grids and no probes, for the `check` subcommand. The full versions
// are the acceptance runs; criteria 7 and 9 have no quick form.
struct CheckOptions {
    bool quick = false;
    int jobs = 1;
    std::uint64_t seed = 1;
};

// one per acceptance criterion, in order
CheckResult check_forward(const CheckOptions& o);
CheckResult check_transport(const CheckOptions& o);
CheckResult check_frequency_algebra(const CheckOptions& o);
CheckResult check_go_decay(const CheckOptions& o);
CheckResult check_multiplier(const CheckOptions& o);
CheckResult check_magnetic_recon(const CheckOptions& o);
CheckResult check_magnetic_stability(const CheckOptions& o);
CheckResult check_electric_recon(const CheckOptions& o);
CheckResult check_electric_stability(const CheckOptions& o);
CheckResult check_hodge_gauge(const CheckOptions& o);

CheckResult run_check(int criterion, const CheckOptions& o);
// criteria the `check` subcommand runs
std::vector<int> quick_criteria();

// fixtures shared by the checks and the run modes
CoefficientPair magnetic_pair(const ExperimentConfig& c);
CoefficientPair electric_pair(const ExperimentConfig& c);
// A = 0 and a static bump q of radius 0.4375: the GO remainder fixture
CoefficientPair go_fixture(const Grid& g);

} // namespace msr
