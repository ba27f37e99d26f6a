#pragma once

#include "msr/potentials.hpp"
#include "msr/recon_electric.hpp"
#include "msr/recon_magnetic.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace msr {

// Values of the TOML subset we read: strings, numbers, booleans and (nested) arrays.
struct TomlValue {
    std::variant<std::monostate, double, bool, std::string, std::vector<TomlValue>> v;
    bool is_number() const { return std::holds_alternative<double>(v); }
    bool is_array() const { return std::holds_alternative<std::vector<TomlValue>>(v); }
    double number(const std::string& key) const;
    bool boolean(const std::string& key) const;
    const std::string& string(const std::string& key) const;
    const std::vector<TomlValue>& array(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
};

// key = value lines, [table] headers, # comments; keys are stored as "table.key".
std::map<std::string, TomlValue> parse_toml(const std::string& text);

enum class RunMode { UnitChecks, Forward, GoScan, Magnetic, Electric, Coupled };
std::string to_string(RunMode m);
RunMode parse_run_mode(const std::string& s);

struct MagneticFixture {
    std::vector<Bump> bumps{Bump{{0.5, 0.5, 0.5}, 0.35, 0.1, {1.0, 1.0, 1.0}}};
    bool divergence_free = true;
    std::string file; // .fld vector field for A_1; overrides the bumps
};

struct ElectricFixture {
    ScalarRecipe recipe{{Bump{{0.5, 0.5, 0.5}, 0.3, 1.0, {0, 0, 1}}}, TimeProfile::SinSquared, 0.5, 0.15};
    std::string file; // .fld space-time field for q_1
};

struct ExperimentConfig {
    RunMode mode = RunMode::Magnetic;
    std::string run_id;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int jobs = 1;
    Grid grid;

    MagneticFixture magnetic_fixture;
    ElectricFixture electric_fixture;

    MagneticSweepConfig magnetic;
    double magnetic_sigma = 8.0; // single-sigma runs (recon-curl)
    ElectricSweepConfig electric;
    double electric_alpha = 5.0; // single-alpha runs (recon-q)
    double electric_sigma = 8.0;

    std::vector<double> go_sigmas{4, 6, 8, 12};
    Vec3 go_xi{6.283185307179586, 0.0, 0.0};

    std::string source_text;
    void validate() const;
    // the seed also derives the per-experiment streams
    void set_seed(std::uint64_t s);
    void set_jobs(int j);
};

// Throws ConfigError on syntax errors, unknown keys, bad values or missing fixture files.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_text(const std::string& text);

// Effective configuration as TOML that config_from_text reads back to the same values.
std::string echo_toml(const ExperimentConfig& c);

// FNV-1a of the config text, as 16 hex digits
std::string config_hash(const std::string& text);

} // namespace msr
