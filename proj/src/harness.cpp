#include "erl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "erl/common.hpp"

namespace erl {

double InitProfile::eval(std::array<double, 2> x, const GridSpec& box) const {
    constexpr double tau = 2.0 * std::numbers::pi;
    double prod = amp;
    for (int a = 0; a < box.dim; ++a) {
        const double t = (x[a] - box.lo[a]) / box.extent(a);
        prod *= std::cos(tau * (mode[a] * t - shift[a]));
    }
    return base + prod;
}

ScalarField InitProfile::realize(const GridSpec& g) const {
    ScalarField out(g);
    for (int i = 0; i < g.cells(); ++i) out[i] = eval(g.cell_center(i), g);
    return out;
}

GridSpec ExperimentConfig::grid() const { return GridSpec::make(dim, n, lo, hi, boundary); }

GridSpec ExperimentConfig::ref_grid() const {
    require(ref_refine >= 1, "config: reference refinement factor must be >= 1");
    std::array<int, 2> nn{n[0] * ref_refine, n[1] * ref_refine};
    return GridSpec::make(dim, nn, lo, hi, boundary);
}

LimitConfig ExperimentConfig::limit_config() const {
    LimitConfig c;
    c.law1 = PressureLaw::make(gamma1);
    c.law2 = PressureLaw::make(gamma2);
    c.sigma = sigma;
    c.alpha = alpha;
    c.cfl = cfl_limit;
    return c;
}

SolverConfig ExperimentConfig::solver_config(double eps_value) const {
    SolverConfig c;
    c.mode = FrictionMode::scaled;
    c.eps = eps_value;
    c.sigma = sigma;
    c.law1 = PressureLaw::make(gamma1);
    c.law2 = PressureLaw::make(gamma2);
    c.alpha = alpha;
    c.cfl = cfl;
    c.rho_min = rho_min;
    return c;
}

std::vector<double> ExperimentConfig::snapshot_times() const {
    require(snapshots >= 2, "config: need at least 2 snapshots");
    require(t_end > 0.0, "config: t_end must be positive");
    std::vector<double> ts(static_cast<std::size_t>(snapshots) + 1);
    for (int k = 0; k <= snapshots; ++k) ts[static_cast<std::size_t>(k)] = t_end * k / snapshots;
    return ts;
}

bool ExperimentConfig::theorem_regime(std::string* which) const {
    const PressureLaw g = PressureLaw::make(gamma_min());
    if (g.case1(alpha, dim)) {
        if (which) *which = "case I (gamma >= 2, 1 < alpha < d/2+1)";
        return true;
    }
    if (g.case2(alpha, dim)) {
        if (which) *which = "case II (2-(alpha-1)/d <= gamma < 2, 1 < alpha <= d/2+1)";
        return true;
    }
    if (which) *which = "outside both exponent hypotheses";
    return false;
}

bool ExperimentConfig::coupling_admissible() const {
    return gamma_min() >= 2.0 * dim / (dim + alpha - 1.0);
}

FluidState well_prepared_init(const LimitSolver& aux_solver, const ScalarField& rho0,
                              const ScalarField& n0) {
    require(min_value(rho0) > 0.0 && min_value(n0) > 0.0,
            "well-prepared init: densities must be positive");
    AuxVelocities aux = aux_solver.aux_velocities(rho0, n0);
    const GridSpec& g = rho0.grid();
    VectorField m(g), w(g);
    for (int a = 0; a < g.dim; ++a)
        for (int i = 0; i < g.cells(); ++i) {
            m.comp(a)[i] = rho0[i] * aux.u.comp(a)[i];
            w.comp(a)[i] = n0[i] * aux.v.comp(a)[i];
        }
    return FluidState{rho0, m, n0, w, 0.0};
}

Trajectory rescale_diffusive(const Trajectory& source, double eps,
                             std::span<const double> times) {
    require(eps > 0.0, "rescale: eps must be positive");
    require(source.size() >= 1, "rescale: empty source trajectory");
    const double root = std::sqrt(eps);
    Trajectory out;
    for (double t : times) {
        const double tau = t / root;
        require(tau <= source.back().t * (1.0 + 1e-12) + 1e-300,
                "rescale: requested time beyond the source horizon");
        // bracketing snapshots
        std::size_t hi = 0;
        while (hi + 1 < source.size() && source[hi].t < tau * (1.0 - 1e-14) - 1e-300) ++hi;
        std::size_t lo = hi > 0 ? hi - 1 : 0;
        double w1 = 1.0;
        if (std::abs(source[hi].t - tau) <= 1e-12 * std::max(1.0, std::abs(tau))) {
            lo = hi;
        } else if (hi > 0) {
            w1 = (tau - source[lo].t) / (source[hi].t - source[lo].t);
        }
        const FluidState& a = source[lo].state;
        const FluidState& b = source[hi].state;
        const GridSpec& g = a.rho.grid();
        FluidState s;
        s.t = t;
        s.rho = ScalarField(g);
        s.n = ScalarField(g);
        s.m = VectorField(g);
        s.w = VectorField(g);
        const double w0 = 1.0 - w1;
        for (int i = 0; i < g.cells(); ++i) {
            s.rho[i] = lo == hi ? a.rho[i] : w0 * a.rho[i] + w1 * b.rho[i];
            s.n[i] = lo == hi ? a.n[i] : w0 * a.n[i] + w1 * b.n[i];
        }
        for (int c = 0; c < g.dim; ++c)
            for (int i = 0; i < g.cells(); ++i) {
                const double ma =
                    lo == hi ? a.m.comp(c)[i] : w0 * a.m.comp(c)[i] + w1 * b.m.comp(c)[i];
                const double wa =
                    lo == hi ? a.w.comp(c)[i] : w0 * a.w.comp(c)[i] + w1 * b.w.comp(c)[i];
                s.m.comp(c)[i] = ma / root;
                s.w.comp(c)[i] = wa / root;
            }
        out.push_back(Snapshot{t, s, EnergyReport{}});
    }
    return out;
}

RateFit fit_rate(std::span<const double> eps, std::span<const double> psi) {
    require(eps.size() == psi.size(), "fit_rate: length mismatch");
    require(eps.size() >= 2, "fit_rate: need at least 2 points");
    for (std::size_t k = 0; k < eps.size(); ++k)
        require(eps[k] > 0.0 && psi[k] > 0.0, "fit_rate: values must be positive");
    const std::size_t n = eps.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> X(n), Y(n);
    for (std::size_t k = 0; k < n; ++k) {
        X[k] = std::log(eps[k]);
        Y[k] = std::log(psi[k]);
        sx += X[k];
        sy += Y[k];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (X[k] - mx) * (X[k] - mx);
        sxy += (X[k] - mx) * (Y[k] - my);
    }
    require(sxx > 0.0, "fit_rate: degenerate abscissae");
    RateFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = Y[k] - (f.intercept + f.slope * X[k]);
        rss += r * r;
    }
    f.residual = std::sqrt(rss / n);
    return f;
}

namespace {

EpsRun run_one_eps(const ExperimentConfig& cfg, double eps_value, const GridSpec& g,
                   const LimitSolver& aux_solver, const ReferenceSolution& ref,
                   std::span<const double> ts, std::ostream* log) {
    EpsRun run;
    run.eps = eps_value;
    try {
        EulerSolver solver(g, cfg.solver_config(eps_value));
        FluidState init =
            well_prepared_init(aux_solver, cfg.rho0.realize(g), cfg.n0.realize(g));
        Trajectory traj = solver.run(init, ts);
        RelEnergyContext ctx;
        ctx.law1 = PressureLaw::make(cfg.gamma1);
        ctx.law2 = PressureLaw::make(cfg.gamma2);
        ctx.sigma = cfg.sigma;
        ctx.eps = eps_value;
        ctx.rho_min = cfg.rho_min;
        ctx.op = solver.riesz();
        run.series = relative_energy_series(traj, ref, ctx);
        run.psi0 = run.series.front().psi;
        run.sup_psi = 0.0;
        for (const RelEnergyRow& r : run.series) run.sup_psi = std::max(run.sup_psi, r.psi);
        run.envelope_C = fit_envelope_C(run.series, eps_value);
        run.ok = true;
    } catch (const std::exception& e) {
        run.ok = false;
        run.diagnostic = e.what();
        if (log) *log << "eps=" << eps_value << " failed: " << e.what() << "\n";
    }
    return run;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, std::ostream* log) {
    require(!cfg.eps_list.empty(), "sweep: empty eps list");
    for (double e : cfg.eps_list) require(e > 0.0, "sweep: eps values must be positive");

    SweepResult result;
    result.regime = cfg.theorem_regime(&result.regime_note);
    if (!result.regime && log)
        *log << "warning: experiment leaves the theorem regime (" << result.regime_note
             << "); continuing\n";
    if (!cfg.coupling_admissible() && log)
        *log << "warning: gamma below the coupling admissibility threshold 2d/(d+alpha-1)\n";

    const GridSpec g = cfg.grid();
    const GridSpec fine = cfg.ref_grid();
    const auto ts = cfg.snapshot_times();

    // one fine reference solve shared by every eps
    LimitSolver fine_solver(fine, cfg.limit_config());
    auto fine_traj = fine_solver.run(
        AdState{cfg.rho0.realize(fine), cfg.n0.realize(fine), 0.0}, ts);
    ReferenceSolution ref = assemble_reference(fine_solver, fine_traj, g);
    if (log)
        *log << "reference: delta_bar=" << ref.delta_bar << " M_bar=" << ref.M_bar << "\n";

    LimitSolver aux_solver(g, cfg.limit_config());
    for (double e : cfg.eps_list) {
        result.runs.push_back(run_one_eps(cfg, e, g, aux_solver, ref, ts, log));
        if (log && result.runs.back().ok)
            *log << "eps=" << e << " psi0=" << result.runs.back().psi0
                 << " sup_psi=" << result.runs.back().sup_psi << "\n";
    }

    // discretization floor: rerun the smallest eps at half resolution
    double eps_min = cfg.eps_list.front();
    for (double e : cfg.eps_list) eps_min = std::min(eps_min, e);
    const EpsRun* finest = nullptr;
    for (const EpsRun& r : result.runs)
        if (r.ok && r.eps == eps_min) finest = &r;
    if (finest != nullptr && g.n[0] % 2 == 0 && (g.dim == 1 || g.n[1] % 2 == 0) &&
        g.n[0] / 2 >= 4) {
        try {
            std::array<int, 2> nh{g.n[0] / 2, std::max(g.n[1] / 2, 1)};
            const GridSpec gh = GridSpec::make(g.dim, nh, cfg.lo, cfg.hi, cfg.boundary);
            ReferenceSolution ref_h = assemble_reference(fine_solver, fine_traj, gh);
            LimitSolver aux_h(gh, cfg.limit_config());
            EpsRun half = run_one_eps(cfg, eps_min, gh, aux_h, ref_h, ts, log);
            if (half.ok) {
                result.coarse_sup_psi = half.sup_psi;
                // Richardson with first-order fields: Psi floor scales like h^2
                result.floor_estimate =
                    std::max(0.0, (half.sup_psi - finest->sup_psi) / 3.0);
            }
        } catch (const std::exception& e) {
            if (log) *log << "floor estimate failed: " << e.what() << "\n";
        }
    }

    for (EpsRun& r : result.runs)
        if (r.ok) r.adjusted = r.sup_psi - result.floor_estimate;

    // monotonicity in eps (sorted descending), with 5% noise allowance
    std::vector<const EpsRun*> ok_desc;
    for (const EpsRun& r : result.runs)
        if (r.ok) ok_desc.push_back(&r);
    std::sort(ok_desc.begin(), ok_desc.end(),
              [](const EpsRun* a, const EpsRun* b) { return a->eps > b->eps; });
    result.monotone = ok_desc.size() >= 2;
    for (std::size_t k = 1; k < ok_desc.size(); ++k)
        if (ok_desc[k]->sup_psi > ok_desc[k - 1]->sup_psi * 1.05) result.monotone = false;

    // rate fits
    std::vector<double> es, ps, es_adj, ps_adj;
    for (const EpsRun* r : ok_desc) {
        if (r->sup_psi > 0.0) {
            es.push_back(r->eps);
            ps.push_back(r->sup_psi);
        }
        if (r->adjusted > 0.0) {
            es_adj.push_back(r->eps);
            ps_adj.push_back(r->adjusted);
        }
    }
    if (es.size() >= 2) result.fit_raw = fit_rate(es, ps);
    if (es_adj.size() >= 2) {
        result.fit = fit_rate(es_adj, ps_adj);
        result.slope_valid = true;
    } else if (log) {
        *log << "insufficient points for rate\n";
    }

    // envelope uniformity: C fitted on the largest eps dominates all runs
    if (!ok_desc.empty()) {
        result.envelope_C = fit_envelope_C(ok_desc.front()->series, ok_desc.front()->eps);
        result.envelope_uniform = true;
        for (const EpsRun* r : ok_desc) {
            const double base = r->series.front().psi + r->eps * r->eps;
            for (const RelEnergyRow& row : r->series) {
                const double env = std::exp(result.envelope_C * (row.t - r->series.front().t)) * base;
                if (row.psi > env * (1.0 + 1e-9)) result.envelope_uniform = false;
            }
        }
    }
    return result;
}

}  // namespace erl
