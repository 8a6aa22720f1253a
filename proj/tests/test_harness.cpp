#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "erl/harness.hpp"

using namespace erl;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.n = {16, 16};
    c.hi = {8.0, 8.0};
    c.t_end = 0.05;
    c.snapshots = 5;
    c.eps_list = {0.2, 0.1};
    c.ref_refine = 2;
    return c;
}

}  // namespace

TEST_CASE("well-prepared initial data") {
    ExperimentConfig cfg = small_config();
    const GridSpec g = cfg.grid();
    LimitSolver aux(g, cfg.limit_config());

    // constant profiles: zero momenta
    FluidState s0 = well_prepared_init(aux, ScalarField(g, 1.0), ScalarField(g, 1.0));
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < g.cells(); ++i) {
            CHECK(s0.m.comp(a)[i] == 0.0);
            CHECK(s0.w.comp(a)[i] == 0.0);
        }

    // identical discrete fields as the reference: psi(0) vanishes
    auto rho0 = cfg.rho0.realize(g);
    auto n0 = cfg.n0.realize(g);
    FluidState s = well_prepared_init(aux, rho0, n0);
    AuxVelocities av = aux.aux_velocities(rho0, n0);
    RefSnapshot ref;
    ref.t = 0.0;
    ref.rho = rho0;
    ref.n = n0;
    ref.u = av.u;
    ref.v = av.v;
    RelEnergyContext ctx;
    ctx.sigma = 0.0;  // skip the interaction to avoid building an operator
    ctx.eps = 0.1;
    CHECK(psi_report(s, ref, ctx).psi == 0.0);
}

TEST_CASE("psi(0) decreases at second order under reference refinement") {
    // analytic initial data sampled on the run grid versus restricted from
    // refined grids: the mismatch is pure discretization, O(h^2)
    ExperimentConfig cfg = small_config();
    double p0[2];
    int idx = 0;
    for (int N : {16, 32}) {
        ExperimentConfig c = cfg;
        c.n = {N, N};
        const GridSpec g = c.grid();
        const GridSpec fine = c.ref_grid();
        LimitSolver aux(g, c.limit_config());
        LimitSolver aux_f(fine, c.limit_config());
        FluidState s = well_prepared_init(aux, c.rho0.realize(g), c.n0.realize(g));
        auto rf = c.rho0.realize(fine);
        auto nf = c.n0.realize(fine);
        AuxVelocities av = aux_f.aux_velocities(rf, nf);
        RefSnapshot ref;
        ref.rho = restrict_average(rf, g);
        ref.n = restrict_average(nf, g);
        ref.u = restrict_average(av.u, g);
        ref.v = restrict_average(av.v, g);
        RelEnergyContext ctx;
        ctx.sigma = c.sigma;
        RieszOperator op(g, RieszParams::make(c.alpha, 2));
        ctx.op = &op;
        ctx.eps = 0.1;
        p0[idx++] = psi_report(s, ref, ctx).psi;
    }
    CHECK(p0[1] > 0.0);
    CHECK(p0[0] / p0[1] >= std::pow(2.0, 1.8));
}

TEST_CASE("diffusive rescaling") {
    ExperimentConfig cfg = small_config();
    cfg.sigma = 0.05;
    const GridSpec g = cfg.grid();
    EulerSolver unscaled(g, [&] {
        SolverConfig c = cfg.solver_config(1.0);
        c.mode = FrictionMode::unscaled;
        c.zeta = 2.0;
        return c;
    }());
    LimitSolver aux(g, cfg.limit_config());
    FluidState init = well_prepared_init(aux, cfg.rho0.realize(g), cfg.n0.realize(g));

    std::vector<double> times{0.0, 0.05, 0.1};
    Trajectory src = unscaled.run(init, times);

    // eps = 1: identity on trajectories
    Trajectory same = rescale_diffusive(src, 1.0, times);
    for (std::size_t k = 0; k < times.size(); ++k)
        for (int i = 0; i < g.cells(); ++i) {
            CHECK(same[k].state.rho[i] == src[k].state.rho[i]);
            CHECK(same[k].state.m.comp(0)[i] == src[k].state.m.comp(0)[i]);
        }

    // snapshot time mapping: eps = 0.25 sends t to t/0.5 = 2t
    std::vector<double> want{0.05};
    Trajectory scaled = rescale_diffusive(src, 0.25, want);
    for (int i = 0; i < g.cells(); ++i) {
        CHECK(scaled[0].state.rho[i] == src[2].state.rho[i]);  // source t = 0.1
        CHECK(scaled[0].state.m.comp(0)[i] ==
              doctest::Approx(src[2].state.m.comp(0)[i] / 0.5).epsilon(1e-15));
    }

    std::vector<double> beyond{0.2};
    CHECK_THROWS_AS(rescale_diffusive(src, 0.25, beyond), std::invalid_argument);
}

TEST_CASE("rate fitting") {
    std::vector<double> eps{0.1, 0.01};
    std::vector<double> psi{1e-2, 1e-4};
    RateFit f = fit_rate(eps, psi);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.residual == doctest::Approx(0.0).epsilon(1e-10));

    std::vector<double> single{0.1};
    CHECK_THROWS_AS(fit_rate(single, single), std::invalid_argument);
    std::vector<double> bad{0.1, -0.2};
    CHECK_THROWS_AS(fit_rate(bad, psi), std::invalid_argument);
}

TEST_CASE("tiny sweep completes with rate and diagnostics") {
    ExperimentConfig cfg = small_config();
    SweepResult res = run_sweep(cfg);
    CHECK(res.runs.size() == 2);
    for (const EpsRun& r : res.runs) {
        CHECK(r.ok);
        CHECK(r.psi0 >= 0.0);
        CHECK(r.sup_psi > 0.0);
        CHECK(r.series.size() == static_cast<std::size_t>(cfg.snapshots) + 1);
    }
    CHECK(res.regime);  // gamma = 2, alpha = 1.5 sits in case I

    // single-eps sweep: no slope, flagged as insufficient
    ExperimentConfig one = cfg;
    one.eps_list = {0.1};
    SweepResult res1 = run_sweep(one);
    CHECK(!res1.slope_valid);
}

TEST_CASE("config regime flags") {
    ExperimentConfig cfg = small_config();
    CHECK(cfg.theorem_regime());
    cfg.gamma1 = 1.8;
    cfg.gamma2 = 2.2;
    cfg.alpha = 1.6;  // case II threshold: 2 - 0.6/2 = 1.7 <= 1.8
    std::string which;
    CHECK(cfg.theorem_regime(&which));
    CHECK(which.find("case II") != std::string::npos);
    cfg.gamma1 = 1.5;
    cfg.alpha = 1.2;  // threshold 1.9 > 1.5
    CHECK(!cfg.theorem_regime());
    CHECK(cfg.coupling_admissible() == (1.5 >= 2.0 * 2 / (2 + 1.2 - 1.0)));
}
