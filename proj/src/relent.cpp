#include "erl/relent.hpp"

#include <algorithm>
#include <cmath>

#include "erl/common.hpp"

namespace erl {

namespace {

// velocity difference fields u - ubar, v - vbar with floored division
void velocity_defects(const FluidState& s, const RefSnapshot& ref, double rho_min,
                      VectorField& du, VectorField& dv) {
    const GridSpec& g = s.rho.grid();
    du = VectorField(g);
    dv = VectorField(g);
    for (int a = 0; a < g.dim; ++a)
        for (int i = 0; i < g.cells(); ++i) {
            du.comp(a)[i] = s.m.comp(a)[i] / std::max(s.rho[i], rho_min) - ref.u.comp(a)[i];
            dv.comp(a)[i] = s.w.comp(a)[i] / std::max(s.n[i], rho_min) - ref.v.comp(a)[i];
        }
}

ScalarField xi_field(const FluidState& s, const RefSnapshot& ref) {
    const GridSpec& g = s.rho.grid();
    ScalarField xi(g);
    for (int i = 0; i < g.cells(); ++i) xi[i] = s.rho[i] - ref.rho[i] - s.n[i] + ref.n[i];
    return xi;
}

}  // namespace

double rel_kinetic(const FluidState& s, const RefSnapshot& ref, double rho_min) {
    const GridSpec& g = s.rho.grid();
    require(ref.rho.grid() == g, "rel_kinetic: reference not on the state grid");
    VectorField du, dv;
    velocity_defects(s, ref, rho_min, du, dv);
    ScalarField integrand(g);
    for (int i = 0; i < g.cells(); ++i) {
        double a2 = 0.0, b2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            a2 += du.comp(a)[i] * du.comp(a)[i];
            b2 += dv.comp(a)[i] * dv.comp(a)[i];
        }
        integrand[i] = 0.5 * (s.rho[i] * a2 + s.n[i] * b2);
    }
    return integrate(integrand);
}

RelPotential rel_potential(const FluidState& s, const RefSnapshot& ref,
                           const RelEnergyContext& ctx) {
    const GridSpec& g = s.rho.grid();
    require(ref.rho.grid() == g, "rel_potential: reference not on the state grid");
    require(min_value(ref.rho) > 0.0 && min_value(ref.n) > 0.0,
            "rel_potential: reference densities must be positive");
    ScalarField breg(g);
    for (int i = 0; i < g.cells(); ++i)
        breg[i] = ctx.law1.rel_internal(std::max(s.rho[i], 0.0), ref.rho[i]) +
                  ctx.law2.rel_internal(std::max(s.n[i], 0.0), ref.n[i]);
    RelPotential out;
    out.bregman = integrate(breg);
    if (ctx.sigma != 0.0) {
        require(ctx.op != nullptr, "rel_potential: Riesz operator required when sigma != 0");
        out.interaction = ctx.op->interaction_energy(xi_field(s, ref), ctx.sigma);
    }
    out.total = out.bregman + out.interaction;
    return out;
}

RelEnergyRow psi_report(const FluidState& s, const RefSnapshot& ref,
                        const RelEnergyContext& ctx) {
    RelEnergyRow row;
    row.t = s.t;
    row.rel_kin = rel_kinetic(s, ref, ctx.rho_min);
    RelPotential pot = rel_potential(s, ref, ctx);
    row.bregman = pot.bregman;
    row.interaction = pot.interaction;
    row.psi = ctx.eps * row.rel_kin + pot.total;
    return row;
}

IneqTerms inequality_terms(const FluidState& s, const RefSnapshot& ref,
                           const RelEnergyContext& ctx) {
    const GridSpec& g = s.rho.grid();
    require(ref.rho.grid() == g, "inequality terms: reference not on the state grid");
    require(!ref.jac_u.empty() && !ref.jac_v.empty(),
            "inequality terms: reference gradients missing");
    require(min_value(ref.rho) > 0.0 && min_value(ref.n) > 0.0,
            "inequality terms: reference densities must be positive");

    VectorField du, dv;
    velocity_defects(s, ref, ctx.rho_min, du, dv);

    ScalarField f1(g), f2(g), f4(g), fd(g);
    for (int i = 0; i < g.cells(); ++i) {
        double c1 = 0.0;
        double c4 = 0.0;
        double cd = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            for (int b = 0; b < g.dim; ++b) {
                const std::size_t e = static_cast<std::size_t>(a * g.dim + b);
                c1 += ref.jac_u[e][i] * s.rho[i] * du.comp(a)[i] * du.comp(b)[i] +
                      ref.jac_v[e][i] * s.n[i] * dv.comp(a)[i] * dv.comp(b)[i];
            }
            c4 += (s.rho[i] / ref.rho[i]) * ref.e1.comp(a)[i] * du.comp(a)[i] +
                  (s.n[i] / ref.n[i]) * ref.e2.comp(a)[i] * dv.comp(a)[i];
            cd += s.rho[i] * du.comp(a)[i] * du.comp(a)[i] +
                  s.n[i] * dv.comp(a)[i] * dv.comp(a)[i];
        }
        f1[i] = -ctx.eps * c1;
        f2[i] = -(ref.div_u[i] * ctx.law1.rel_pressure(std::max(s.rho[i], 0.0), ref.rho[i]) +
                  ref.div_v[i] * ctx.law2.rel_pressure(std::max(s.n[i], 0.0), ref.n[i]));
        f4[i] = -ctx.eps * c4;
        fd[i] = cd;
    }

    IneqTerms out;
    out.i1 = integrate(f1);
    out.i2 = integrate(f2);
    out.i4 = integrate(f4);
    out.dissipation = integrate(fd);

    if (ctx.sigma != 0.0) {
        require(ctx.op != nullptr, "inequality terms: Riesz operator required when sigma != 0");
        VectorField gk = ctx.op->conv_grad(xi_field(s, ref));
        ScalarField fj(g);
        for (int i = 0; i < g.cells(); ++i) {
            double c3 = 0.0;
            for (int a = 0; a < g.dim; ++a)
                c3 += ((s.rho[i] - ref.rho[i]) * ref.u.comp(a)[i] -
                       (s.n[i] - ref.n[i]) * ref.v.comp(a)[i]) *
                      gk.comp(a)[i];
            fj[i] = c3;
        }
        out.J = integrate(fj);
        out.i3 = ctx.sigma * out.J;
    }
    return out;
}

std::vector<RelEnergyRow> relative_energy_series(const Trajectory& traj,
                                                 const ReferenceSolution& ref,
                                                 const RelEnergyContext& ctx) {
    require(traj.size() == ref.snapshots.size(), "relative energy: trajectory/reference length mismatch");
    std::vector<RelEnergyRow> rows(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        require(std::abs(traj[k].t - ref.snapshots[k].t) <=
                    1e-9 * std::max(1.0, std::abs(traj[k].t)),
                "relative energy: time grids misaligned");
        rows[k] = psi_report(traj[k].state, ref.snapshots[k], ctx);
        IneqTerms it = inequality_terms(traj[k].state, ref.snapshots[k], ctx);
        rows[k].I1 = it.i1;  // instantaneous for now; accumulated below
        rows[k].I2 = it.i2;
        rows[k].I3 = it.i3;
        rows[k].I4 = it.i4;
        rows[k].J = it.J;
        rows[k].dissipation = it.dissipation;
    }
    // cumulative trapezoid over the snapshot cadence
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, cd = 0.0;
    std::vector<double> inst1(rows.size()), inst2(rows.size()), inst3(rows.size()),
        inst4(rows.size()), instd(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        inst1[k] = rows[k].I1;
        inst2[k] = rows[k].I2;
        inst3[k] = rows[k].I3;
        inst4[k] = rows[k].I4;
        instd[k] = rows[k].dissipation;
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k > 0) {
            const double hdt = 0.5 * (rows[k].t - rows[k - 1].t);
            c1 += hdt * (inst1[k] + inst1[k - 1]);
            c2 += hdt * (inst2[k] + inst2[k - 1]);
            c3 += hdt * (inst3[k] + inst3[k - 1]);
            c4 += hdt * (inst4[k] + inst4[k - 1]);
            cd += hdt * (instd[k] + instd[k - 1]);
        }
        rows[k].I1 = c1;
        rows[k].I2 = c2;
        rows[k].I3 = c3;
        rows[k].I4 = c4;
        rows[k].cum_dissipation = cd;
    }
    const double C = fit_envelope_C(rows, ctx.eps);
    for (RelEnergyRow& r : rows)
        r.envelope = gronwall_envelope(rows.front().psi, C, r.t - rows.front().t, ctx.eps);
    return rows;
}

std::vector<double> rel_inequality_residual(std::span<const RelEnergyRow> series) {
    require(!series.empty(), "inequality residual: empty series");
    std::vector<double> res(series.size());
    const double psi0 = series.front().psi;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const RelEnergyRow& r = series[k];
        res[k] = (r.I1 + r.I2 + r.I3 + r.I4) - (r.psi - psi0 + r.cum_dissipation);
    }
    return res;
}

double gronwall_envelope(double psi0, double C, double T, double eps) {
    require(C >= 0.0 && T >= 0.0 && eps >= 0.0, "gronwall: nonnegative arguments required");
    return std::exp(C * T) * (psi0 + eps * eps);
}

double fit_envelope_C(std::span<const RelEnergyRow> series, double eps) {
    require(!series.empty(), "envelope fit: empty series");
    const double base = series.front().psi + eps * eps;
    double C = 0.0;
    for (const RelEnergyRow& r : series) {
        const double dt = r.t - series.front().t;
        if (dt <= 0.0 || r.psi <= base) continue;
        C = std::max(C, std::log(r.psi / base) / dt);
    }
    return C;
}

double lemma52_ratio(const ScalarField& r, const ScalarField& rbar, const PressureLaw& law,
                     double alpha, Lemma52Branch branch) {
    const GridSpec& g = r.grid();
    require(rbar.grid() == g, "lemma52: grid mismatch");
    require(min_value(rbar) > 0.0, "lemma52: reference must be bounded away from zero");
    const int d = g.dim;
    double q = 0.0;
    if (branch == Lemma52Branch::p_branch) {
        require(law.gamma >= 2.0 - alpha / d, "lemma52: p-branch needs gamma >= 2 - alpha/d");
        require(alpha > 0.0 && alpha <= d, "lemma52: p-branch needs 0 < alpha <= d");
        q = 2.0 * d / (d + alpha);
    } else {
        require(law.gamma > 1.0 && law.gamma < 2.0, "lemma52: q-branch needs 1 < gamma < 2");
        q = 2.0 / (3.0 - law.gamma);
    }
    ScalarField diff = r - rbar;
    ScalarField breg(g);
    for (int i = 0; i < g.cells(); ++i)
        breg[i] = law.rel_internal(std::max(r[i], 0.0), rbar[i]);
    const double denom = integrate(breg);
    require(denom > 0.0, "lemma52: r coincides with rbar (0/0)");
    const double num = lp_norm(diff, q);
    return num * num / denom;
}

SigmaThreshold sigma_threshold(std::span<const DensityPairSample> samples,
                               const RelEnergyContext& ctx) {
    require(!samples.empty(), "sigma threshold: no samples");
    require(ctx.op != nullptr, "sigma threshold: Riesz operator required");
    SigmaThreshold out;
    for (const DensityPairSample& s : samples) {
        const GridSpec& g = s.rho.grid();
        ScalarField xi(g), breg(g);
        for (int i = 0; i < g.cells(); ++i) {
            xi[i] = s.rho[i] - s.rho_bar[i] - s.n[i] + s.n_bar[i];
            breg[i] = ctx.law1.rel_internal(std::max(s.rho[i], 0.0), s.rho_bar[i]) +
                      ctx.law2.rel_internal(std::max(s.n[i], 0.0), s.n_bar[i]);
        }
        const double denom = integrate(breg);
        if (denom <= 0.0) continue;  // degenerate sample, excluded
        const double quad = std::abs(integrate(multiply(xi, ctx.op->conv(xi))));
        out.c_star = std::max(out.c_star, quad / denom);
        ++out.samples_used;
    }
    require(out.samples_used > 0, "sigma threshold: all samples degenerate");
    out.lambda = 1.0 - ctx.sigma * out.c_star / 2.0;
    return out;
}

}  // namespace erl
