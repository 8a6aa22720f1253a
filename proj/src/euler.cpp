#include "erl/euler.hpp"

#include <algorithm>
#include <cmath>

#include "erl/common.hpp"

namespace erl {

void friction_update(VectorField& m, const VectorField& phi, double rate, double dt) {
    const double decay = std::exp(-rate * dt);
    for (int c = 0; c < m.grid().dim; ++c) {
        auto mc = m.comp(c).data();
        auto pc = phi.comp(c).data();
        for (std::size_t i = 0; i < mc.size(); ++i) mc[i] = -pc[i] + (mc[i] + pc[i]) * decay;
    }
}

namespace {

// Rusanov flux sweep along one axis for one species; subtracts dt/h times the
// flux differences from (rho_new, m_new). Periodic wrap or reflecting ghosts
// (density mirrored, normal momentum flipped). The wrap face is computed once
// and reused so the discrete mass telescopes exactly.
void species_axis_sweep(const GridSpec& g, int axis, const ScalarField& rho,
                        const VectorField& m, const PressureLaw& law, double pscale,
                        double floor, double dt, ScalarField& rho_new, VectorField& m_new) {
    const int dim = g.dim;
    const int na = g.n[axis];
    const int nperp = g.cells() / na;
    const int stride = (dim == 2 && axis == 0) ? g.n[1] : 1;
    const bool periodic = g.boundary == Boundary::periodic;
    const double coef = dt / g.h[axis];

    std::vector<double> frho(static_cast<std::size_t>(na + 1));
    std::vector<std::array<double, 2>> fm(static_cast<std::size_t>(na + 1));

    for (int p = 0; p < nperp; ++p) {
        const int base = (dim == 1) ? 0 : (axis == 0 ? p : p * g.n[1]);

        auto load = [&](int j, double& r, std::array<double, 2>& mv) {
            bool flip = false;
            int jj = j;
            if (periodic) {
                jj = (j % na + na) % na;
            } else if (j < 0) {
                jj = -j - 1;
                flip = true;
            } else if (j >= na) {
                jj = 2 * na - j - 1;
                flip = true;
            }
            const int idx = base + jj * stride;
            r = rho[idx];
            mv[0] = m.comp(0)[idx];
            mv[1] = dim == 2 ? m.comp(1)[idx] : 0.0;
            if (flip) mv[axis] = -mv[axis];
        };

        auto face = [&](int f) {
            double rL, rR;
            std::array<double, 2> mL, mR;
            load(f - 1, rL, mL);
            load(f, rR, mR);
            const double uL = mL[axis] / std::max(rL, floor);
            const double uR = mR[axis] / std::max(rR, floor);
            const double cL = std::sqrt(pscale * law.dpressure(rL));
            const double cR = std::sqrt(pscale * law.dpressure(rR));
            const double s = std::max(std::abs(uL) + cL, std::abs(uR) + cR);
            frho[static_cast<std::size_t>(f)] =
                0.5 * (mL[axis] + mR[axis]) - 0.5 * s * (rR - rL);
            for (int b = 0; b < dim; ++b)
                fm[static_cast<std::size_t>(f)][b] =
                    0.5 * (mL[b] * uL + mR[b] * uR) - 0.5 * s * (mR[b] - mL[b]);
            fm[static_cast<std::size_t>(f)][axis] +=
                0.5 * pscale * (law.pressure(rL) + law.pressure(rR));
        };

        for (int f = 0; f < na; ++f) face(f);
        if (periodic) {
            frho[static_cast<std::size_t>(na)] = frho[0];
            fm[static_cast<std::size_t>(na)] = fm[0];
        } else {
            face(na);
        }

        for (int k = 0; k < na; ++k) {
            const int idx = base + k * stride;
            const std::size_t f0 = static_cast<std::size_t>(k);
            rho_new[idx] -= coef * (frho[f0 + 1] - frho[f0]);
            for (int b = 0; b < dim; ++b)
                m_new.comp(b)[idx] -= coef * (fm[f0 + 1][b] - fm[f0][b]);
        }
    }
}

void species_hyperbolic(const GridSpec& g, const ScalarField& rho, const VectorField& m,
                        const PressureLaw& law, double pscale, double floor, double dt,
                        ScalarField& rho_new, VectorField& m_new) {
    rho_new = rho;
    m_new = m;
    for (int a = 0; a < g.dim; ++a)
        species_axis_sweep(g, a, rho, m, law, pscale, floor, dt, rho_new, m_new);
}

double species_max_signal(const GridSpec& g, const ScalarField& rho, const VectorField& m,
                          const PressureLaw& law, double pscale, double floor) {
    // sum over axes of (|u_a| + c)/h_a, maximized over cells
    double worst = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const double r = rho[i];
        const double c = std::sqrt(pscale * law.dpressure(r));
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a)
            s += (std::abs(m.comp(a)[i] / std::max(r, floor)) + c) / g.h[a];
        worst = std::max(worst, s);
    }
    return worst;
}

}  // namespace

EulerSolver::EulerSolver(const GridSpec& grid, SolverConfig cfg) : grid_(grid), cfg_(cfg) {
    require(cfg_.cfl > 0.0 && cfg_.cfl < 1.0, "euler: CFL must lie in (0,1)");
    require(cfg_.rho_min > 0.0, "euler: density floor must be positive");
    if (cfg_.mode == FrictionMode::scaled)
        require(cfg_.eps > 0.0, "euler: eps must be positive");
    else
        require(cfg_.zeta > 0.0, "euler: zeta must be positive");
    require(cfg_.sigma >= 0.0, "euler: sigma must be nonnegative");
    if (cfg_.sigma != 0.0) {
        auto rp = RieszParams::make(cfg_.alpha, grid_.dim);
        require(rp.gradient_admissible() && grid_.boundary == Boundary::periodic,
                "euler: nonlocal coupling needs a periodic grid and 1 < alpha < d");
        op_ = std::make_shared<const RieszOperator>(grid_, rp);
    }
}

FluidState EulerSolver::make_state(const ScalarField& rho, const VectorField& m,
                                   const ScalarField& n, const VectorField& w) const {
    require(rho.grid() == grid_ && n.grid() == grid_, "euler: field grid mismatch");
    require(min_value(rho) >= 0.0 && min_value(n) >= 0.0, "euler: densities must be nonnegative");
    require(all_finite(rho.data()) && all_finite(n.data()), "euler: non-finite density");
    return FluidState{rho, m, n, w, 0.0};
}

double EulerSolver::stable_dt(const FluidState& s) const {
    const double pscale = cfg_.pressure_scale();
    double smax = species_max_signal(grid_, s.rho, s.m, cfg_.law1, pscale, cfg_.rho_min);
    smax = std::max(smax, species_max_signal(grid_, s.n, s.w, cfg_.law2, pscale, cfg_.rho_min));
    return cfg_.cfl / std::max(smax, 1e-300);
}

FluidState EulerSolver::step(const FluidState& s, double dt) const {
    require(dt > 0.0, "euler: dt must be positive");
    check_state(dt <= stable_dt(s) * (1.0 + 1e-9), "euler: CFL violation");

    FluidState out;
    out.t = s.t + dt;
    const double pscale = cfg_.pressure_scale();
    species_hyperbolic(grid_, s.rho, s.m, cfg_.law1, pscale, cfg_.rho_min, dt, out.rho, out.m);
    species_hyperbolic(grid_, s.n, s.w, cfg_.law2, pscale, cfg_.rho_min, dt, out.n, out.w);
    check_state(min_value(out.rho) >= 0.0 && min_value(out.n) >= 0.0,
                "euler: negative density after hyperbolic substep (dt too large)");

    const double rate = cfg_.friction_rate();
    if (cfg_.sigma != 0.0) {
        VectorField G = op_->conv_grad(out.rho - out.n);
        const double ab = cfg_.pressure_scale() / rate;
        VectorField phi1(grid_), phi2(grid_);
        for (int c = 0; c < grid_.dim; ++c)
            for (int i = 0; i < grid_.cells(); ++i) {
                phi1.comp(c)[i] = ab * cfg_.sigma * out.rho[i] * G.comp(c)[i];
                phi2.comp(c)[i] = -ab * cfg_.sigma * out.n[i] * G.comp(c)[i];
            }
        friction_update(out.m, phi1, rate, dt);
        friction_update(out.w, phi2, rate, dt);
    } else {
        const double decay = std::exp(-rate * dt);
        for (int c = 0; c < grid_.dim; ++c) {
            for (double& x : out.m.comp(c).data()) x *= decay;
            for (double& x : out.w.comp(c).data()) x *= decay;
        }
    }
    check_state(all_finite(out.rho.data()) && all_finite(out.n.data()) &&
                    all_finite(out.m.comp(0).data()) && all_finite(out.w.comp(0).data()),
                "euler: non-finite state");
    return out;
}

EnergyReport EulerSolver::total_energy(const FluidState& s) const {
    EnergyReport rep;
    const double kw = cfg_.kinetic_weight();
    ScalarField kin(grid_), diss(grid_), h1(grid_), h2(grid_);
    for (int i = 0; i < grid_.cells(); ++i) {
        double ke = 0.0;
        for (int a = 0; a < grid_.dim; ++a) {
            const double u = s.m.comp(a)[i] / std::max(s.rho[i], cfg_.rho_min);
            const double v = s.w.comp(a)[i] / std::max(s.n[i], cfg_.rho_min);
            ke += s.rho[i] * u * u + s.n[i] * v * v;
        }
        kin[i] = 0.5 * kw * ke;
        diss[i] = ke;
        h1[i] = cfg_.law1.internal_energy(std::max(s.rho[i], 0.0));
        h2[i] = cfg_.law2.internal_energy(std::max(s.n[i], 0.0));
    }
    rep.kinetic = integrate(kin);
    rep.dissipation = integrate(diss);
    rep.internal1 = integrate(h1);
    rep.internal2 = integrate(h2);
    rep.interaction = (cfg_.sigma != 0.0) ? op_->interaction_energy(s.rho - s.n, cfg_.sigma) : 0.0;
    rep.total = rep.kinetic + rep.internal1 + rep.internal2 + rep.interaction;
    rep.mass1 = integrate(s.rho);
    rep.mass2 = integrate(s.n);
    return rep;
}

Trajectory EulerSolver::run(const FluidState& initial, std::span<const double> times) const {
    require(!times.empty(), "euler run: no snapshot times");
    for (std::size_t k = 1; k < times.size(); ++k)
        require(times[k] > times[k - 1], "euler run: snapshot times must increase");
    require(times[0] >= initial.t, "euler run: first snapshot precedes the initial time");

    Trajectory traj;
    FluidState cur = initial;
    const double H0 = total_energy(cur).total;
    const double blow = cfg_.blowup_factor * std::max(std::abs(H0), 1e-300);

    for (double target : times) {
        while (cur.t < target * (1.0 - 1e-14) - 1e-300) {
            const double dt = std::min(stable_dt(cur), target - cur.t);
            cur = step(cur, dt);
            if (std::abs(cur.t - target) <= 1e-12 * std::max(1.0, std::abs(target)))
                cur.t = target;
        }
        EnergyReport e = total_energy(cur);
        check_state(e.total <= blow, "euler run: energy blow-up detected");
        traj.push_back(Snapshot{cur.t, cur, e});
    }
    return traj;
}

// ---- weak-form diagnostics ----------------------------------------------------

namespace {

double trapezoid(std::span<const double> t, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (v[k] + v[k - 1]);
    return s;
}

}  // namespace

WeakResiduals weak_form_residual(const Trajectory& traj, const EulerSolver& solver,
                                 const ScalarTestFn& phi, const VectorTestFn& phi_t,
                                 const ScalarTestFn& psi, const VectorTestFn& psi_t) {
    require(traj.size() >= 2, "weak form: need at least two snapshots");
    const GridSpec& g = solver.grid();
    const SolverConfig& cfg = solver.config();
    require(cfg.mode == FrictionMode::scaled, "weak form: defined for the scaled system");
    const double eps = cfg.eps;
    const double T = traj.back().t;

    // compact support in time
    for (int i = 0; i < g.cells(); i += std::max(1, g.cells() / 7)) {
        const auto x = g.cell_center(i);
        require(std::abs(phi.value(T, x)) < 1e-12 && std::abs(psi.value(T, x)) < 1e-12,
                "weak form: scalar test not compactly supported in time");
        const auto pv = phi_t.value(T, x);
        const auto qv = psi_t.value(T, x);
        require(std::abs(pv[0]) + std::abs(pv[1]) < 1e-12 &&
                    std::abs(qv[0]) + std::abs(qv[1]) < 1e-12,
                "weak form: vector test not compactly supported in time");
    }
    if (g.boundary == Boundary::noflux) {
        for (double xb : {g.lo[0], g.hi[0]}) {
            require(std::abs(phi_t.value(0.0, {xb, 0.0})[0]) < 1e-12 &&
                        std::abs(psi_t.value(0.0, {xb, 0.0})[0]) < 1e-12,
                    "weak form: vector test must be tangential at the boundary");
        }
    }

    const std::size_t K = traj.size();
    std::vector<double> ts(K), a1(K), a2(K), a3(K), a4(K);
    const double meas = g.cell_measure();

    for (std::size_t k = 0; k < K; ++k) {
        const Snapshot& snap = traj[k];
        const FluidState& s = snap.state;
        ts[k] = snap.t;
        VectorField G(g);
        if (cfg.sigma != 0.0) G = solver.riesz()->conv_grad(s.rho - s.n);

        std::vector<double> c1(static_cast<std::size_t>(g.cells())), m1(c1.size()), c2(c1.size()),
            m2(c1.size());
        for (int i = 0; i < g.cells(); ++i) {
            const auto x = g.cell_center(i);
            const double rho = s.rho[i], nn = s.n[i];
            std::array<double, 2> u{0.0, 0.0}, v{0.0, 0.0};
            for (int a = 0; a < g.dim; ++a) {
                u[a] = s.m.comp(a)[i] / std::max(rho, cfg.rho_min);
                v[a] = s.w.comp(a)[i] / std::max(nn, cfg.rho_min);
            }
            // continuity forms
            const auto gp = phi.grad(snap.t, x);
            const auto gq = psi.grad(snap.t, x);
            double adv1 = 0.0, adv2 = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                adv1 += s.m.comp(a)[i] * gp[a];
                adv2 += s.w.comp(a)[i] * gq[a];
            }
            c1[static_cast<std::size_t>(i)] = rho * phi.dt(snap.t, x) + adv1;
            c2[static_cast<std::size_t>(i)] = nn * psi.dt(snap.t, x) + adv2;

            // momentum forms
            const auto pt = phi_t.value(snap.t, x);
            const auto ptd = phi_t.dt(snap.t, x);
            const auto pj = phi_t.jac(snap.t, x);
            const auto qt = psi_t.value(snap.t, x);
            const auto qtd = psi_t.dt(snap.t, x);
            const auto qj = psi_t.jac(snap.t, x);
            double s1 = 0.0, s2 = 0.0;
            double div_p = 0.0, div_q = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                s1 += eps * s.m.comp(a)[i] * ptd[a];
                s2 += eps * s.w.comp(a)[i] * qtd[a];
                div_p += pj[a][a];
                div_q += qj[a][a];
                for (int b = 0; b < g.dim; ++b) {
                    s1 += eps * rho * u[a] * u[b] * pj[a][b];
                    s2 += eps * nn * v[a] * v[b] * qj[a][b];
                }
                s1 -= cfg.sigma * rho * G.comp(a)[i] * pt[a];
                s2 += cfg.sigma * nn * G.comp(a)[i] * qt[a];  // coupling enters with n - rho
                s1 -= s.m.comp(a)[i] * pt[a];
                s2 -= s.w.comp(a)[i] * qt[a];
            }
            s1 += cfg.law1.pressure(std::max(rho, 0.0)) * div_p;
            s2 += cfg.law2.pressure(std::max(nn, 0.0)) * div_q;
            m1[static_cast<std::size_t>(i)] = s1;
            m2[static_cast<std::size_t>(i)] = s2;
        }
        a1[k] = compensated_sum(c1) * meas;
        a2[k] = compensated_sum(m1) * meas;
        a3[k] = compensated_sum(c2) * meas;
        a4[k] = compensated_sum(m2) * meas;
    }

    // initial-data terms
    const FluidState& s0 = traj.front().state;
    const double t0 = traj.front().t;
    std::vector<double> i1(static_cast<std::size_t>(g.cells())), i2(i1.size()), i3(i1.size()),
        i4(i1.size());
    for (int i = 0; i < g.cells(); ++i) {
        const auto x = g.cell_center(i);
        i1[static_cast<std::size_t>(i)] = s0.rho[i] * phi.value(t0, x);
        i3[static_cast<std::size_t>(i)] = s0.n[i] * psi.value(t0, x);
        const auto pt = phi_t.value(t0, x);
        const auto qt = psi_t.value(t0, x);
        double sm = 0.0, sw = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            sm += eps * s0.m.comp(a)[i] * pt[a];
            sw += eps * s0.w.comp(a)[i] * qt[a];
        }
        i2[static_cast<std::size_t>(i)] = sm;
        i4[static_cast<std::size_t>(i)] = sw;
    }

    WeakResiduals r;
    r.continuity1 = trapezoid(ts, a1) + compensated_sum(i1) * meas;
    r.momentum1 = trapezoid(ts, a2) + compensated_sum(i2) * meas;
    r.continuity2 = trapezoid(ts, a3) + compensated_sum(i3) * meas;
    r.momentum2 = trapezoid(ts, a4) + compensated_sum(i4) * meas;
    return r;
}

double dissipation_form_residual(const Trajectory& traj, const TimeTestFn& theta) {
    require(traj.size() >= 2, "dissipation form: need at least two snapshots");
    const double T = traj.back().t;
    require(std::abs(theta.value(T)) < 1e-12, "dissipation form: theta must vanish at the end");
    std::vector<double> ts(traj.size()), v(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        ts[k] = traj[k].t;
        v[k] = -theta.dt(traj[k].t) * traj[k].energy.total +
               theta.value(traj[k].t) * traj[k].energy.dissipation;
    }
    return trapezoid(ts, v) - traj.front().energy.total * theta.value(traj.front().t);
}

}  // namespace erl
