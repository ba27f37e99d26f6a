#include "doctest.h"

#include "msr/config.hpp"
#include "msr/curves.hpp"
#include "msr/experiments.hpp"
#include "msr/fit.hpp"
#include "msr/noise.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace msr;
namespace fs = std::filesystem;

namespace {

Grid grid(int Nx, int Nt) {
    Grid g;
    g.Nx = Nx;
    g.Nt = Nt;
    g.validate();
    return g;
}

DtnRecord some_record(const Grid& g) {
    DtnRecord r;
    r.grid = g;
    r.final_state = ComplexField(g, cplx(0.5, -0.25));
    r.trace = FaceSeries(g, g.levels());
    for (std::size_t p = 0; p < r.trace.v.size(); ++p) r.trace.v[p] = cplx(std::sin(0.1 * p), 0.3);
    return r;
}

DtnRecord minus(const DtnRecord& a, const DtnRecord& b) { return record_difference(a, b); }

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("msr_harness_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(MSR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const char* kSmallSweep = R"(mode = "magnetic"
run_id = "tiny"
seed = 9

[grid]
Nx = 8
Nt = 16

[magnetic]
etas = [1e-2]
sigma_cap = 6
sigma_min = 4
sigma = 5
c_R = 4.5
)";

} // namespace

TEST_CASE("noise calibration over four decades") {
    Grid g = grid(8, 16);
    DtnRecord r = some_record(g);
    const double probe = 2.5;
    for (double eta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        DtnRecord n = inject_noise(r, probe, eta, 42);
        double measured = operational_norm(minus(n, r), probe);
        CHECK(std::abs(measured - eta) <= 0.01 * eta);
    }
}

TEST_CASE("zero noise leaves the record unchanged") {
    Grid g = grid(8, 16);
    DtnRecord r = some_record(g);
    DtnRecord n = inject_noise(r, 2.0, 0.0, 7);
    CHECK(n.final_state.v == r.final_state.v);
    CHECK(n.trace.v == r.trace.v);
    CHECK_THROWS_AS(noise_record(g, 1.0, -1e-3, 1), ConfigError);
}

TEST_CASE("different seeds give different perturbations of equal size") {
    Grid g = grid(8, 16);
    DtnRecord a = noise_record(g, 1.0, 1e-2, stream_seed(1, 0)), b = noise_record(g, 1.0, 1e-2, stream_seed(2, 0));
    CHECK(a.trace.v != b.trace.v);
    CHECK(record_norm(a) == doctest::Approx(record_norm(b)).epsilon(1e-12));
    DtnRecord a2 = noise_record(g, 1.0, 1e-2, stream_seed(1, 0));
    CHECK(a2.trace.v == a.trace.v);
    CHECK(stream_seed(1, 0) != stream_seed(1, 1));
    CHECK(stream_seed(1, 0, 0) != stream_seed(1, 0, 1));
}

TEST_CASE("log-log fits") {
    std::vector<double> x{1, 2, 4, 8, 16};
    std::vector<double> inv, sq;
    for (double v : x) {
        inv.push_back(1.0 / v);
        sq.push_back(3.0 * v * v);
    }
    LineFit a = fit_log_slope(x, inv);
    CHECK(std::abs(a.slope + 1.0) <= 1e-12);
    CHECK(a.r2 == doctest::Approx(1.0).epsilon(1e-12));
    LineFit b = fit_log_slope(x, sq);
    CHECK(std::abs(b.slope - 2.0) <= 1e-12);
    CHECK(std::abs(b.intercept - std::log(3.0)) <= 1e-12);

    std::mt19937_64 rng(123);
    std::normal_distribution<double> N(0.0, 0.05);
    std::vector<double> xs, ys;
    for (int i = 0; i < 20; ++i) {
        double v = std::pow(10.0, 0.1 * i);
        xs.push_back(v);
        ys.push_back(2.0 * std::pow(v, -0.7) * std::exp(N(rng)));
    }
    CHECK(std::abs(fit_log_slope(xs, ys).slope + 0.7) <= 0.1);

    CHECK_THROWS_AS(fit_log_slope({1, 2, 0}, {1, 2, 3}), ConfigError);
    CHECK_THROWS_AS(fit_log_slope({1, 2, 3}, {1, -2, 3}), ConfigError);
    CHECK_THROWS_AS(fit_log_slope({1, 2}, {1, 2}), ConfigError);
}

TEST_CASE("log-stability fit recovers a synthetic curve") {
    std::vector<double> eta, err;
    for (double e : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
        eta.push_back(e);
        err.push_back(0.5 * std::sqrt(e) + 0.8 * std::pow(std::abs(std::log(e)), -1.5));
    }
    LogStabilityFit f = fit_log_stability(eta, err);
    CHECK(f.r2 >= 0.999);
    CHECK(f.c == doctest::Approx(1.5).epsilon(0.02));
    CHECK(non_increasing_as_x_decreases(eta, err));
}

TEST_CASE("config parsing: defaults, errors and unknown keys") {
    ExperimentConfig d = config_from_text("");
    CHECK(d.mode == RunMode::Magnetic);
    CHECK(d.grid.Nx == 16);
    CHECK_FALSE(d.run_id.empty());

    CHECK_THROWS_AS(config_from_text("mode = \"nope\""), ConfigError);
    CHECK_THROWS_AS(config_from_text("[grid]\nNx = 4\n"), ConfigError);
    CHECK_THROWS_AS(config_from_text("[grid]\nNy = 16\n"), ConfigError);
    CHECK_THROWS_AS(config_from_text("seed = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(config_from_text("[magnetic]\netas = [0.1, -1]\n"), ConfigError);
    CHECK_THROWS_AS(config_from_text("[magnetic]\netas = [0.1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_text("jobs = 0\n"), ConfigError);
    CHECK_THROWS_AS(config_from_text("[magnetic_fixture]\nfile = \"/nonexistent/a.fld\"\n"), ConfigError);

    ExperimentConfig c = config_from_text(kSmallSweep);
    CHECK(c.run_id == "tiny");
    CHECK(c.magnetic.seed == 9);
    CHECK(c.electric.seed != 9);
    CHECK(c.magnetic.etas == std::vector<double>{1e-2});
    c.set_jobs(3);
    CHECK(c.magnetic.jobs == 3);
    CHECK(c.electric.jobs == 3);
}

TEST_CASE("echoed config reads back to the same effective values") {
    std::string text = std::string(kSmallSweep) +
                       "\n[electric_fixture]\ncenters = [[0.5, 0.5, 0.45]]\nradii = [0.3]\namplitudes = [0.7]\n"
                       "profile = \"gauss\"\nt0 = 0.4\nwidth = 0.1\n\n[electric]\netas = [0.1, 0.01, 0.001]\n";
    ExperimentConfig a = config_from_text(text);
    std::string e1 = echo_toml(a);
    ExperimentConfig b = config_from_text(e1);
    CHECK(echo_toml(b) == e1);
    CHECK(b.electric_fixture.recipe.bumps[0].amplitude == 0.7);
    CHECK(b.electric_fixture.recipe.profile == TimeProfile::Gaussian);
    CHECK(b.magnetic.c_R == 4.5);
    CHECK(config_hash(e1) == config_hash(echo_toml(b)));
    CHECK(config_hash("a = 1") != config_hash("a = 2"));
}

TEST_CASE("curve tables validate their shape") {
    CurveTable t;
    t.name = "x";
    t.columns = {"a", "b"};
    t.provenance = {{"seed", "1"}};
    t.add_row({1.0, 2.0});
    CHECK_THROWS(t.add_row({1.0}));
    CHECK(t.column("b") == std::vector<double>{2.0});
    std::string csv = to_csv(t);
    CHECK(csv.rfind("# seed: 1\n", 0) == 0);
    CHECK(csv_body(csv) == "a,b\n1,2\n");
}

TEST_CASE("one-point magnetic sweep: single row, deterministic bodies, output layout") {
    ExperimentConfig c = config_from_text(kSmallSweep);
    fs::path root = scratch("sweep");
    c.out_dir = root.string();
    RunReport r1 = run_task(Task::Sweep, c);
    REQUIRE(r1.ok);
    REQUIRE(r1.tables.size() == 1);
    CHECK(r1.tables[0].rows.size() == 1);
    fs::path dir = root / "tiny";
    CHECK(fs::exists(dir / "curves.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "config-echo.toml"));
    std::string first = slurp(dir / "curves.csv");
    CHECK(config_from_text(slurp(dir / "config-echo.toml")).run_id == "tiny");

    RunReport r2 = run_task(Task::Sweep, c);
    REQUIRE(r2.ok);
    CHECK(csv_body(slurp(dir / "curves.csv")) == csv_body(first));
    CHECK(csv_body(first).find("err_Hminus1") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("command-line exit codes") {
    fs::path root = scratch("cli");
    fs::path good = root / "good.toml", bad = root / "bad.toml", failing = root / "fail.toml",
             wrong_mode = root / "mode.toml";
    std::ofstream(good) << "mode = \"forward\"\nrun_id = \"f\"\n[grid]\nNx = 8\nNt = 16\n";
    std::ofstream(bad) << "mode = \"forward\"\nbogus_key = 1\n";
    // an alpha below the first lattice shell is valid input but leaves the cone empty
    std::ofstream(failing) << "mode = \"electric\"\nrun_id = \"e\"\n[grid]\nNx = 8\nNt = 16\n[electric]\nalpha = 0.5\n";
    std::ofstream(wrong_mode) << "mode = \"unit-checks\"\n[grid]\nNx = 8\nNt = 16\n";
    const std::string out = " --out " + root.string();

    CHECK(run_cli("forward --config " + good.string() + out) == 0);
    CHECK(fs::exists(root / "f" / "curves.csv"));
    CHECK(run_cli("forward --config " + bad.string() + out) == 2);
    CHECK(run_cli("forward --config " + (root / "missing.toml").string() + out) == 2);
    CHECK(run_cli("sweep" + out) == 2);
    CHECK(run_cli("forward --jobs 0 --config " + good.string() + out) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("sweep --config " + wrong_mode.string() + out) == 2);
    CHECK(run_cli("recon-q --config " + failing.string() + out) == 1);
    std::string summary = slurp(root / "e" / "summary.json");
    CHECK(summary.find("\"failed\"") != std::string::npos);
    fs::remove_all(root);
}
