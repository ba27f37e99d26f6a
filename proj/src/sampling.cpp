#include "msr/sampling.hpp"

#include <cmath>

namespace msr {

void CoefficientPair::validate() const {
    const Grid& g = A1.grid;
    if (!(A2.grid == g) || !(q1.grid == g) || !(q2.grid == g))
        throw ConfigError("coefficient pair: grids disagree");
}

SimulatedOracle::SimulatedOracle(const CoefficientPair& c, SolverOptions solver) : c_(c) {
    c_.validate();
    opt_.solver = solver;
    opt_.stencil = TraceStencil::FirstOrder;
}

DtnRecord SimulatedOracle::difference(const BoundaryInput& g, const ProbeMeta& meta) const {
    DtnRecord d = record_difference(dtn_apply(c_.A1, c_.q1, g, opt_), dtn_apply(c_.A2, c_.q2, g, opt_));
    d.meta = meta;
    return d;
}

cplx volume_potential_term(const CoefficientPair& c, const ComplexSpaceTimeField& u2,
                           const ComplexSpaceTimeField& u1) {
    const Grid& g = u1.grid;
    cplx s = 0.0;
    for (int m = 0; m < g.Nt; ++m)
        for (int k = 1; k < g.Nx; ++k)
            for (int j = 1; j < g.Nx; ++j)
                for (int i = 1; i < g.Nx; ++i) {
                    std::size_t p = g.idx(i, j, k);
                    Vec3 a1 = c.A1.at(p), a2 = c.A2.at(p);
                    double v = dot(a2, a2) - dot(a1, a1) +
                               0.5 * (c.q1.level(m)[p] + c.q1.level(m + 1)[p] - c.q2.level(m)[p] - c.q2.level(m + 1)[p]);
                    cplx a = 0.5 * (u2.level(m)[p] + u2.level(m + 1)[p]);
                    cplx b = 0.5 * (u1.level(m)[p] + u1.level(m + 1)[p]);
                    s += v * a * std::conj(b);
                }
    return s * g.dt() * std::pow(g.h(), 3);
}

ProbeResult run_probe(const DtnDifferenceOracle& oracle, const CoefficientPair& model, const FrequencyFrame& frame2,
                      double tau, const ProbeOptions& opt, const NoisePlan& noise) {
    const Grid& g = model.grid();
    ProbeResult r;
    r.pair = match_dispersion(frame2, g, tau);
    FrequencyFrame frame1 = frame2;
    frame1.side = 1;

    GoSolution u1 = opt.u1 == U1Mode::Go
                        ? build_go_solution(model.A1, model.q1, frame1, r.pair.c1, opt.go)
                        : build_go_solution(VectorField(g), ScalarSpaceTimeField(g), frame1, r.pair.c1, opt.go);
    GoSolution u2 = build_go_solution(model.A2, model.q2, frame2, r.pair.c2, opt.go);
    r.u1_residual = u1.residual;
    r.u2_residual = u2.residual;
    r.u1_w = u1.w_l2h1;
    r.u2_w = u2.w_l2h1;
    r.picard_iterations = std::max(u1.picard.iterations, u2.picard.iterations);

    BoundaryInput probe = go_probe(u2);
    r.probe_norm = probe_norm(probe);
    r.carrier_norm = probe_norm(go_probe(u1));

    DtnRecord d = oracle.difference(probe, probe_meta(u2));
    r.dtn_opnorm = operational_norm(d, r.probe_norm);
    r.functional = boundary_functional(d, u1);
    if (opt.subtract_volume) {
        r.volume_term = volume_potential_term(model, u2.field(), u1.field());
        r.functional -= r.volume_term;
    }
    // one realisation per probe, scaled to each level
    r.noisy.reserve(noise.etas.size());
    for (std::size_t e = 0; e < noise.etas.size(); ++e) {
        if (noise.etas[e] == 0.0) {
            r.noisy.push_back(r.functional);
            continue;
        }
        DtnRecord n = noise_record(g, r.probe_norm, noise.etas[e], stream_seed(noise.seed, noise.job));
        r.noisy.push_back(r.functional + boundary_functional(n, u1));
    }
    return r;
}

} // namespace msr
