#pragma once

#include "msr/config.hpp"
#include "msr/curves.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace msr {

enum class Task { Check, Forward, GoScan, ReconCurl, ReconQ, Sweep };
std::string to_string(Task t);

struct RunReport {
    std::string dir;
    bool ok = true;
    std::string failure;
    std::vector<CurveTable> tables; // tables[0] goes to curves.csv, the rest to curves-<name>.csv
    nlohmann::json summary;
};

// Runs one task and writes out_dir/run_id/{curves.csv, summary.json, config-echo.toml}.
// ConfigError propagates before anything is written. Any other failure is caught: the
// tables finished so far are flushed and summary.json carries the failure record.
RunReport run_task(Task t, const ExperimentConfig& c);

// the run without writing anything (tables and summary only)
RunReport compute_task(Task t, const ExperimentConfig& c);
void write_report(const RunReport& r, const ExperimentConfig& c, Task t);

CoefficientPair coupled_pair(const ExperimentConfig& c);

} // namespace msr
