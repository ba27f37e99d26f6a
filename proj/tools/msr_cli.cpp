#include "msr/experiments.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

using namespace msr;

namespace {

struct Flags {
    std::string config, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
};

void add_flags(CLI::App* sub, Flags& f, bool config_required) {
    auto* c = sub->add_option("--config", f.config, "TOML experiment config");
    if (config_required) c->required();
    sub->add_option("--out", f.out, "output root (overrides out_dir)");
    sub->add_option("--seed", f.seed, "master seed (overrides seed)");
    sub->add_option("--jobs", f.jobs, "concurrent probe jobs")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Flags& f) {
    ExperimentConfig c = f.config.empty() ? config_from_text("") : load_config(f.config);
    if (!f.out.empty()) c.out_dir = f.out;
    if (f.seed) c.set_seed(*f.seed);
    if (f.jobs) c.set_jobs(*f.jobs);
    c.validate();
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnetic Schroedinger DtN simulation and reconstruction"};
    app.require_subcommand(1);
    Flags f;
    struct Sub {
        const char* name;
        const char* help;
        Task task;
        bool needs_config;
    };
    const Sub subs[] = {
        {"check", "quick invariant suites of every module", Task::Check, false},
        {"forward", "manufactured-solution convergence and L2 drift of the solver", Task::Forward, false},
        {"go-scan", "GO remainder and multiplier norms over the go.sigmas list", Task::GoScan, false},
        {"recon-curl", "magnetic Fourier samples and low-pass curl at magnetic.sigma", Task::ReconCurl, false},
        {"recon-q", "electric cone samples, extension and inversion at electric.alpha", Task::ReconQ, false},
        {"sweep", "stability sweep over the eta list of the config mode", Task::Sweep, true},
    };
    std::vector<std::pair<CLI::App*, Task>> cmds;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_flags(sub, f, s.needs_config);
        cmds.emplace_back(sub, s.task);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    Task task = Task::Check;
    for (const auto& [sub, t] : cmds)
        if (sub->parsed()) task = t;

    try {
        ExperimentConfig c = resolve(f);
        RunReport r = run_task(task, c);
        std::printf("%s %s -> %s\n", to_string(task).c_str(), r.ok ? "ok" : "FAILED", r.dir.c_str());
        if (!r.ok) {
            std::fprintf(stderr, "stage failure: %s\n", r.failure.c_str());
            return 1;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 1;
    }
}
