#include "msr/experiments.hpp"
#include "msr/checks.hpp"
#include "msr/fit.hpp"
#include "msr/fld_io.hpp"
#include "msr/go.hpp"
#include "msr/mms.hpp"
#include "msr/multiplier.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

namespace msr {

using nlohmann::json;

std::string to_string(Task t) {
    switch (t) {
    case Task::Check: return "check";
    case Task::Forward: return "forward";
    case Task::GoScan: return "go-scan";
    case Task::ReconCurl: return "recon-curl";
    case Task::ReconQ: return "recon-q";
    case Task::Sweep: return "sweep";
    }
    return "?";
}

CoefficientPair coupled_pair(const ExperimentConfig& c) {
    CoefficientPair p = magnetic_pair(c);
    p.q1 = electric_pair(c).q1;
    p.validate();
    return p;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CurveTable table(const std::string& name, std::vector<std::string> cols, const ExperimentConfig& c, Task t) {
    CurveTable tb;
    tb.name = name;
    tb.columns = std::move(cols);
    tb.provenance = {{"config_hash", config_hash(echo_toml(c))},
                     {"seed", std::to_string(c.seed)},
                     {"grid", "Nx=" + std::to_string(c.grid.Nx) + " Nt=" + std::to_string(c.grid.Nt) +
                                  " T=" + json(c.grid.T).dump()},
                     {"run_id", c.run_id},
                     {"task", to_string(t)},
                     {"table", name}};
    return tb;
}

json sweep_json(const MagneticSweepConfig& m) {
    return {{"c_sigma", m.c_sigma}, {"sigma_min", m.sigma_min}, {"sigma_cap", m.sigma_cap}, {"c_R", m.c_R},
            {"xi_margin", m.xi_margin}};
}

// clamp a refinement ladder to the grid minimums
std::vector<int> ladder(int base, int minimum, std::initializer_list<double> f) {
    std::vector<int> out;
    for (double s : f) {
        int n = std::max(minimum, int(std::lround(base * s)));
        if (out.empty() || n != out.back()) out.push_back(n);
    }
    return out;
}

void run_checks(const ExperimentConfig& c, RunReport& rep) {
    CheckOptions o;
    o.quick = true;
    o.jobs = c.jobs;
    o.seed = c.seed;
    CurveTable tb = table("checks", {"criterion", "pass"}, c, Task::Check);
    json list = json::array();
    std::string failed;
    for (int id : quick_criteria()) {
        auto t0 = std::chrono::steady_clock::now();
        CheckResult r = run_check(id, o);
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        tb.add_row({double(id), r.pass ? 1.0 : 0.0});
        json m = json::object();
        for (const auto& [k, v] : r.metrics) m[k] = v;
        list.push_back({{"criterion", id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail},
                        {"metrics", m}, {"seconds", sec}});
        if (!r.pass) failed += (failed.empty() ? "" : ", ") + std::to_string(id);
    }
    rep.tables.push_back(tb);
    rep.summary["checks"] = list;
    if (!failed.empty()) throw StageError("invariant checks failed: " + failed);
}

void run_forward(const ExperimentConfig& c, RunReport& rep) {
    MmsCase mc;
    mc.T = c.grid.T;
    const std::vector<int> nx = ladder(c.grid.Nx, 8, {0.5, 1.0, 2.0});
    const std::vector<int> nt = ladder(c.grid.Nt, 16, {0.25, 0.5, 1.0, 2.0});
    CurveTable tb = table("forward", {"study", "Nx", "Nt", "h", "dt", "error"}, c, Task::Forward);
    std::vector<double> es, et;
    for (int n : nx) {
        MmsError e = mms_space_error(mc, n, 16);
        tb.add_row({0, double(n), 16, 1.0 / n, mc.T / 16, e.error});
        es.push_back(e.error);
    }
    for (int n : nt) {
        MmsError e = mms_time_error(mc, 8, n);
        tb.add_row({1, 8, double(n), 1.0 / 8, mc.T / n, e.error});
        et.push_back(e.error);
    }
    rep.tables.push_back(tb);
    std::vector<double> hx, ht;
    for (int n : nx) hx.push_back(1.0 / n);
    for (int n : nt) ht.push_back(mc.T / n);
    SolverOptions tight;
    tight.tol = 1e-13;
    DriftReport d = l2_drift(mc, c.grid.Nx, c.grid.Nt, tight);
    rep.summary["study_codes"] = {{"0", "space: static plane wave, continuum source"},
                                  {"1", "time: oscillating plane wave, discrete-operator source"}};
    // small grids leave only two rungs above the floor: fall back to the two-point slope
    auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
        if (y.size() >= 3) return fit_log_slope(x, y).slope;
        if (y.size() == 2 && y[0] > 0.0 && y[1] > 0.0) return std::log(y[0] / y[1]) / std::log(x[0] / x[1]);
        return kNaN;
    };
    rep.summary["slope_h"] = slope(hx, es);
    rep.summary["slope_dt"] = slope(ht, et);
    rep.summary["slope_points"] = {es.size(), et.size()};
    rep.summary["drift"] = {{"per_step", d.per_step}, {"cumulative", d.cumulative}, {"solver_tol", tight.tol}};

    // energy of the fixture solve driven by a smooth initial state
    CoefficientPair p = coupled_pair(c);
    BoundaryInput in = zero_input(c.grid);
    for (int k = 1; k < c.grid.Nx; ++k)
        for (int j = 1; j < c.grid.Nx; ++j)
            for (int i = 1; i < c.grid.Nx; ++i) {
                Vec3 x = c.grid.x(i, j, k);
                Vec3 y{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
                in.u0(i, j, k) = bump_profile(norm(y) / 0.4);
            }
    in.update_compatibility();
    SpaceTimeSolution s = solve_ibvp(p.A1, p.q1, in);
    EnergyReport er = energy_report(s, in);
    rep.summary["fixture_energy"] = {{"lhs", er.lhs}, {"rhs", er.rhs}, {"ratio", er.ratio},
                                     {"l2_drift", er.l2_drift}, {"max_iterations", s.stats.max_iterations},
                                     {"worst_residual", s.stats.worst_residual}};
}

void run_go_scan(const ExperimentConfig& c, RunReport& rep) {
    const Grid& g = c.grid;
    VectorField A = magnetic_pair(c).A1;
    ScalarRecipe r = c.electric_fixture.recipe;
    r.profile = TimeProfile::Constant;
    ScalarSpaceTimeField q = make_scalar_potential(g, r);
    const RVec xi{c.go_xi[0], c.go_xi[1], c.go_xi[2]};
    CurveTable tb = table("go-scan",
                          {"sigma", "w_L2H1", "w_L2H2", "residual", "transport_residual", "picard_iterations",
                           "multiplier_L2H1"},
                          c, Task::GoScan);
    BoxLattice box = make_box(g, false);
    std::vector<double> ws, ms;
    for (double s : c.go_sigmas) {
        FrequencyFrame f = build_frame(xi, {0, 0, 0}, s, 2);
        MatchedPair mp = match_dispersion(f, g, 0.0);
        GoSolution u = build_go_solution(A, q, f, mp.c2);
        MultiplierE E(box, mp.c2, s);
        std::vector<cplx> v(box.size());
        for (int k = 0; k < box.M; ++k)
            for (int j = 0; j < box.M; ++j)
                for (int i = 0; i < box.M; ++i) {
                    Vec3 x = box.x(i, j, k);
                    Vec3 y{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
                    v[box.idx(i, j, k)] = bump_profile(norm(y) / 0.8);
                }
        E.apply(v);
        double en = l2_hk(restrict_to_q(box, g, v), 1);
        tb.add_row({s, u.w_l2h1, u.w_l2h2, u.residual, u.transport_residual, double(u.picard.iterations), en});
        ws.push_back(u.w_l2h1);
        ms.push_back(en);
    }
    rep.tables.push_back(tb);
    if (c.go_sigmas.size() >= 3) {
        LineFit fw = fit_log_slope(c.go_sigmas, ws), fm = fit_log_slope(c.go_sigmas, ms);
        rep.summary["w_slope"] = {{"slope", fw.slope}, {"r2", fw.r2}};
        rep.summary["multiplier_slope"] = {{"slope", fm.slope}, {"r2", fm.r2}};
    }
}

void run_recon_curl(const ExperimentConfig& c, RunReport& rep, const std::string& dir) {
    CoefficientPair p = magnetic_pair(c);
    SimulatedOracle oracle(p);
    const double sigma = c.magnetic_sigma;
    const double R = sweep_radius(c.magnetic, sigma);
    LatticeSampleOptions lo;
    lo.jobs = c.jobs;
    lo.sample = c.magnetic.sample;
    FourierSampleSet set = sample_curl_lattice(oracle, p, sigma, R, lo);
    const CurlField truth = curl_difference(p);
    CurveTable tb = table("recon-curl",
                          {"k0", "k1", "k2", "xi_norm", "s01_re", "s01_im", "s02_re", "s02_im", "s12_re", "s12_im",
                           "oracle01_re", "oracle01_im", "oracle02_re", "oracle02_im", "oracle12_re", "oracle12_im",
                           "rel_err"},
                          c, Task::ReconCurl);
    for (const auto& s : set.samples) {
        CurlHat o = curl_oracle(truth, s.xi);
        double d = 0.0, n = 0.0;
        std::vector<double> row{double(s.k[0]), double(s.k[1]), double(s.k[2]), norm(s.xi)};
        for (int j = 0; j < 3; ++j) row.insert(row.end(), {s.value[j].real(), s.value[j].imag()});
        for (int j = 0; j < 3; ++j) {
            row.insert(row.end(), {o[j].real(), o[j].imag()});
            d += std::norm(s.value[j] - o[j]);
            n += std::norm(o[j]);
        }
        row.push_back(n > 0 ? std::sqrt(d / n) : kNaN);
        tb.add_row(row);
    }
    rep.tables.push_back(tb);
    CurlField rec = invert_lowpass(set, R, p.grid());
    CurlErrors er = curl_errors(rec, truth);
    rep.summary["sigma"] = sigma;
    rep.summary["R"] = R;
    rep.summary["n_samples"] = set.samples.size();
    rep.summary["spectral_error"] = spectral_error(set, truth);
    rep.summary["err_Hminus1"] = er.hminus1;
    rep.summary["err_Linf"] = er.linf;
    write_fld(dir + "/recon-curl.fld", rec);
}

void run_recon_q(const ExperimentConfig& c, RunReport& rep, const std::string& dir) {
    CoefficientPair p = electric_pair(c);
    SimulatedOracle oracle(p);
    const double alpha = c.electric_alpha, sigma = c.electric_sigma;
    auto pts = half_cone(alpha, c.electric.fit_radius * alpha, p.grid());
    QSampleSet set = sample_cone(oracle, p, pts, sigma, c.electric.probe, c.jobs);
    CurveTable tb = table("recon-q",
                          {"k0", "k1", "k2", "m", "xi_norm", "tau", "re", "im", "oracle_re", "oracle_im", "rel_err"},
                          c, Task::ReconQ);
    double worst = 0.0, scale = 0.0;
    std::vector<cplx> orc;
    for (const auto& s : set.samples) {
        orc.push_back(q_oracle(p.q1, s.pt.xi, s.pt.tau));
        scale = std::max(scale, std::abs(orc.back()));
    }
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        const auto& s = set.samples[i];
        double e = scale > 0 ? std::abs(s.value - orc[i]) / scale : kNaN;
        worst = std::max(worst, e);
        tb.add_row({double(s.pt.k[0]), double(s.pt.k[1]), double(s.pt.k[2]), double(s.pt.m), norm(s.pt.xi),
                    s.pt.tau, s.value.real(), s.value.imag(), orc[i].real(), orc[i].imag(), e});
    }
    rep.tables.push_back(tb);
    rep.summary["sigma"] = sigma;
    rep.summary["alpha"] = alpha;
    rep.summary["n_samples"] = set.samples.size();
    rep.summary["max_sample_error"] = worst;
    if (set.samples.empty()) throw StageError("no cone samples for alpha " + json(alpha).dump());
    Extension ext = extend_to_ball(set, alpha, c.electric.degree, p.grid(), c.electric.max_degree);
    ScalarSpaceTimeField dq(p.grid());
    for (std::size_t i = 0; i < dq.v.size(); ++i) dq.v[i] = p.q1.v[i] - p.q2.v[i];
    QSpectrum spec(dq);
    rep.summary["extension"] = {{"degree", ext.degree},
                                {"requested_degree", ext.requested_degree},
                                {"fit_residual", ext.fit_residual},
                                {"condition", ext.condition},
                                {"warnings", ext.warnings},
                                {"ball_points", ext.ball.size()}};
    rep.summary["err_Hminus1"] = spec.hminus1_error(ext.ball);
    rep.summary["err_band_Hminus1"] = spec.band_error(ext.ball);
    write_fld(dir + "/recon-q.fld", invert_q(ext.ball, p.grid()));
}

void magnetic_sweep(const ExperimentConfig& c, const CoefficientPair& p, RunReport& rep, const std::string& key) {
    SimulatedOracle oracle(p);
    auto rows = stability_sweep_magnetic(oracle, p, c.magnetic);
    CurveTable tb = table(key, {"eta", "sigma", "R", "err_Hminus1", "err_Linf", "floor_flag"}, c, Task::Sweep);
    std::vector<double> eta, err;
    for (const auto& r : rows) {
        tb.add_row({r.eta, r.sigma, r.R, r.err_hminus1, r.err_linf, r.floor_flag ? 1.0 : 0.0});
        if (r.eta > 0.0) {
            eta.push_back(r.eta);
            err.push_back(r.err_hminus1);
        }
    }
    rep.tables.push_back(tb);
    json s = {{"rule", sweep_json(c.magnetic)},
              {"non_increasing", non_increasing_as_x_decreases(eta, err)}};
    if (eta.size() >= 3) {
        LogStabilityFit f = fit_log_stability(eta, err);
        s["fit"] = {{"model", "a eta^(1/2) + b |log eta|^(-c)"}, {"a", f.a}, {"b", f.b}, {"c", f.c}, {"r2", f.r2}};
    }
    rep.summary[key] = s;
}

void electric_sweep(const ExperimentConfig& c, const CoefficientPair& p, RunReport& rep, const std::string& key) {
    SimulatedOracle oracle(p);
    auto rows = stability_sweep_electric(oracle, p, c.electric);
    std::size_t positive = 0;
    for (const auto& r : rows) positive += r.eta > 0.0 && r.eta < 1.0;
    ShapeFits f;
    f.tripleLog_R2 = f.logPower_R2 = kNaN;
    if (positive >= 3) f = fit_electric_shapes(rows);
    CurveTable tb = table(key,
                          {"eta", "alpha", "sigma", "n_samples", "fit_degree", "err_Hminus1", "fit_tripleLog_R2",
                           "fit_logPower_R2"},
                          c, Task::Sweep);
    std::vector<double> eta, err, band;
    for (const auto& r : rows) {
        tb.add_row({r.eta, r.alpha, r.sigma, double(r.n_samples), double(r.fit_degree), r.err_hminus1, f.tripleLog_R2,
                    f.logPower_R2});
        band.push_back(r.err_band);
        if (r.eta > 0.0) {
            eta.push_back(r.eta);
            err.push_back(r.err_hminus1);
        }
    }
    rep.tables.push_back(tb);
    rep.summary[key] = {{"sigma", c.electric.sigma},
                        {"alpha_rule", {{"a", c.electric.a}, {"alpha_cap", c.electric.alpha_cap}}},
                        {"err_band_Hminus1", band},
                        {"non_increasing", non_increasing_as_x_decreases(eta, err)},
                        {"fits",
                         {{"tripleLog", {{"model", "a + b / |log|log|log eta|||"}, {"a", f.tripleLog_a},
                                         {"b", f.tripleLog_b}, {"r2", f.tripleLog_R2}}},
                          {"logPower", {{"model", "a |log eta|^(-c)"}, {"a", f.logPower_a}, {"c", f.logPower_c},
                                        {"r2", f.logPower_R2}}}}}};
}

void run_sweep(const ExperimentConfig& c, RunReport& rep) {
    switch (c.mode) {
    case RunMode::Magnetic: magnetic_sweep(c, magnetic_pair(c), rep, "magnetic"); break;
    case RunMode::Electric: electric_sweep(c, electric_pair(c), rep, "electric"); break;
    case RunMode::Coupled: {
        // unequal A: the electric error now carries the magnetic term as well
        CoefficientPair p = coupled_pair(c);
        electric_sweep(c, p, rep, "electric");
        magnetic_sweep(c, p, rep, "magnetic");
        break;
    }
    default: throw ConfigError("sweep needs mode magnetic, electric or coupled, got " + to_string(c.mode));
    }
}

std::string run_dir(const ExperimentConfig& c) { return c.out_dir + "/" + c.run_id; }

void write_text(const std::string& path, const std::string& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << s;
}

RunReport compute_into(Task t, const ExperimentConfig& c, const std::string& dir) {
    RunReport rep;
    rep.dir = dir;
    rep.summary = {{"task", to_string(t)}, {"mode", to_string(c.mode)}, {"run_id", c.run_id},
                   {"seed", c.seed},      {"jobs", c.jobs},           {"config_hash", config_hash(echo_toml(c))},
                   {"grid", {{"Nx", c.grid.Nx}, {"Nt", c.grid.Nt}, {"T", c.grid.T}}}};
    auto t0 = std::chrono::steady_clock::now();
    try {
        switch (t) {
        case Task::Check: run_checks(c, rep); break;
        case Task::Forward: run_forward(c, rep); break;
        case Task::GoScan: run_go_scan(c, rep); break;
        case Task::ReconCurl: run_recon_curl(c, rep, dir); break;
        case Task::ReconQ: run_recon_q(c, rep, dir); break;
        case Task::Sweep: run_sweep(c, rep); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.failure = e.what();
    }
    rep.summary["status"] = rep.ok ? "ok" : "failed";
    if (!rep.ok) rep.summary["failure"] = {{"message", rep.failure}, {"tables_flushed", rep.tables.size()}};
    rep.summary["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace

RunReport compute_task(Task t, const ExperimentConfig& c) { return compute_into(t, c, run_dir(c)); }

void write_report(const RunReport& r, const ExperimentConfig& c, Task t) {
    namespace fs = std::filesystem;
    fs::create_directories(r.dir);
    for (std::size_t i = 0; i < r.tables.size(); ++i)
        write_csv(r.dir + (i == 0 ? "/curves.csv" : "/curves-" + r.tables[i].name + ".csv"), r.tables[i]);
    if (r.tables.empty()) {
        CurveTable empty = table(to_string(t), {}, c, t);
        write_csv(r.dir + "/curves.csv", empty);
    }
    write_text(r.dir + "/summary.json", r.summary.dump(2) + "\n");
}

RunReport run_task(Task t, const ExperimentConfig& c) {
    c.validate();
    const std::string dir = run_dir(c);
    std::filesystem::create_directories(dir);
    write_text(dir + "/config-echo.toml", echo_toml(c));
    RunReport r = compute_into(t, c, dir);
    write_report(r, c, t);
    return r;
}

} // namespace msr
