#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "erl/relent.hpp"

using namespace erl;

namespace {

constexpr double tau = 2.0 * std::numbers::pi;

GridSpec torus(int n) { return GridSpec::make(2, {n, n}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic); }

// a reference snapshot populated directly from analytic fields
RefSnapshot make_ref(const GridSpec& g, const ScalarField& rho, const ScalarField& n,
                     const VectorField& u, const VectorField& v) {
    RefSnapshot rs;
    rs.t = 0.0;
    rs.rho = rho;
    rs.n = n;
    rs.u = u;
    rs.v = v;
    rs.e1 = VectorField(g);
    rs.e2 = VectorField(g);
    rs.jac_u = jacobian_centered(u);
    rs.jac_v = jacobian_centered(v);
    rs.div_u = divergence_centered(u);
    rs.div_v = divergence_centered(v);
    return rs;
}

FluidState state_from(const ScalarField& rho, const VectorField& u, const ScalarField& n,
                      const VectorField& v) {
    const GridSpec& g = rho.grid();
    FluidState s;
    s.rho = rho;
    s.n = n;
    s.m = VectorField(g);
    s.w = VectorField(g);
    for (int a = 0; a < g.dim; ++a)
        for (int i = 0; i < g.cells(); ++i) {
            s.m.comp(a)[i] = rho[i] * u.comp(a)[i];
            s.w.comp(a)[i] = n[i] * v.comp(a)[i];
        }
    return s;
}

}  // namespace

TEST_CASE("relative kinetic energy") {
    const GridSpec g = torus(16);
    RelEnergyContext ctx;
    ctx.eps = 0.3;

    VectorField u(g), v(g);
    for (int i = 0; i < g.cells(); ++i) {
        u.comp(0)[i] = 0.7;
        u.comp(1)[i] = -0.2;
        v.comp(0)[i] = 0.1;
    }
    ScalarField one(g, 1.0);
    RefSnapshot ref = make_ref(g, one, one, u, v);

    // coinciding velocities: zero
    FluidState s = state_from(one, u, one, v);
    CHECK(rel_kinetic(s, ref, ctx.rho_min) == 0.0);

    // rho = 1, u - ubar = const c: 1/2 |c|^2 * area, area = 4
    VectorField u2 = u;
    for (int i = 0; i < g.cells(); ++i) u2.comp(0)[i] += 0.5;
    FluidState s2 = state_from(one, u2, one, v);
    CHECK(rel_kinetic(s2, ref, ctx.rho_min) ==
          doctest::Approx(0.5 * 0.25 * 4.0).epsilon(1e-13));

    // random pair matches a naive-loop quadrature oracle
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ur(0.2, 2.0);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    ScalarField rho(g), n(g);
    VectorField ua(g), va(g);
    for (int i = 0; i < g.cells(); ++i) {
        rho[i] = ur(rng);
        n[i] = ur(rng);
        for (int a = 0; a < 2; ++a) {
            ua.comp(a)[i] = uv(rng);
            va.comp(a)[i] = uv(rng);
        }
    }
    FluidState s3 = state_from(rho, ua, n, va);
    double naive = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        double du2 = 0.0, dv2 = 0.0;
        for (int a = 0; a < 2; ++a) {
            const double du = ua.comp(a)[i] - u.comp(a)[i];
            const double dv = va.comp(a)[i] - v.comp(a)[i];
            du2 += du * du;
            dv2 += dv * dv;
        }
        naive += (0.5 * rho[i] * du2 + 0.5 * n[i] * dv2) * g.cell_measure();
    }
    CHECK(rel_kinetic(s3, ref, ctx.rho_min) == doctest::Approx(naive).epsilon(1e-13));
}

TEST_CASE("relative potential energy") {
    const GridSpec g = torus(16);
    RieszOperator op(g, RieszParams::make(1.5, 2));
    RelEnergyContext ctx;
    ctx.sigma = 0.1;
    ctx.op = &op;

    ScalarField rho(g, 1.5), n(g, 0.8);
    RefSnapshot ref = make_ref(g, rho, n, VectorField(g), VectorField(g));
    FluidState eq = state_from(rho, VectorField(g), n, VectorField(g));
    auto pot0 = rel_potential(eq, ref, ctx);
    CHECK(pot0.total == 0.0);

    // sigma = 0, gamma = 2, constants: (rho-rhobar)^2 + (n-nbar)^2 times area
    RelEnergyContext ctx0 = ctx;
    ctx0.sigma = 0.0;
    FluidState s = state_from(ScalarField(g, 2.0), VectorField(g), ScalarField(g, 0.5),
                              VectorField(g));
    auto pot = rel_potential(s, ref, ctx0);
    CHECK(pot.bregman == doctest::Approx((0.25 + 0.09) * 4.0).epsilon(1e-13));
    CHECK(pot.interaction == 0.0);

    // rho - rhobar = n - nbar pointwise: xi vanishes, interaction exactly zero
    auto bump = ScalarField::sample(g, [](std::array<double, 2> x) {
        return 0.3 * std::cos(tau * x[0] / 2.0);
    });
    FluidState s2 = state_from(rho + bump, VectorField(g), n + bump, VectorField(g));
    auto pot2 = rel_potential(s2, ref, ctx);
    CHECK(pot2.interaction == 0.0);
    CHECK(pot2.bregman > 0.0);

    RefSnapshot bad = ref;
    bad.rho = ScalarField(g, 0.0);
    CHECK_THROWS_AS(rel_potential(s, bad, ctx), std::invalid_argument);
}

TEST_CASE("psi recomposition") {
    const GridSpec g = torus(12);
    RieszOperator op(g, RieszParams::make(1.5, 2));
    RelEnergyContext ctx;
    ctx.sigma = 0.05;
    ctx.eps = 0.17;
    ctx.op = &op;

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ur(0.5, 1.5);
    std::uniform_real_distribution<double> uv(-0.5, 0.5);
    ScalarField rho(g), n(g), rb(g), nb(g);
    VectorField u(g), v(g), ub(g), vb(g);
    for (int i = 0; i < g.cells(); ++i) {
        rho[i] = ur(rng);
        n[i] = ur(rng);
        rb[i] = ur(rng);
        nb[i] = ur(rng);
        for (int a = 0; a < 2; ++a) {
            u.comp(a)[i] = uv(rng);
            v.comp(a)[i] = uv(rng);
            ub.comp(a)[i] = uv(rng);
            vb.comp(a)[i] = uv(rng);
        }
    }
    RefSnapshot ref = make_ref(g, rb, nb, ub, vb);
    FluidState s = state_from(rho, u, n, v);

    RelEnergyRow row = psi_report(s, ref, ctx);
    CHECK(row.psi == ctx.eps * row.rel_kin + (row.bregman + row.interaction));

    RelEnergyContext ctx0 = ctx;
    ctx0.eps = 0.0;
    RelEnergyRow row0 = psi_report(s, ref, ctx0);
    CHECK(row0.psi == row0.bregman + row0.interaction);

    // identical state and reference: psi = 0
    FluidState same = state_from(rb, ub, nb, vb);
    CHECK(psi_report(same, ref, ctx).psi == 0.0);
}

TEST_CASE("inequality terms against a naive-loop oracle") {
    const GridSpec g = torus(12);
    RieszOperator op(g, RieszParams::make(1.5, 2));
    RelEnergyContext ctx;
    ctx.sigma = 0.07;
    ctx.eps = 0.2;
    ctx.op = &op;

    auto rb = ScalarField::sample(g, [](std::array<double, 2> x) {
        return 1.0 + 0.2 * std::cos(tau * x[0] / 2.0);
    });
    auto nb = ScalarField::sample(g, [](std::array<double, 2> x) {
        return 1.0 + 0.1 * std::sin(tau * x[1] / 2.0);
    });
    auto rho = ScalarField::sample(g, [](std::array<double, 2> x) {
        return 1.1 + 0.15 * std::sin(tau * x[0] / 2.0) * std::cos(tau * x[1] / 2.0);
    });
    auto nn = ScalarField::sample(g, [](std::array<double, 2> x) {
        return 0.9 + 0.1 * std::cos(tau * (x[0] + x[1]) / 2.0);
    });
    VectorField u(g), v(g), ub(g), vb(g);
    for (int i = 0; i < g.cells(); ++i) {
        const auto x = g.cell_center(i);
        u.comp(0)[i] = 0.2 * std::sin(tau * x[0] / 2.0);
        u.comp(1)[i] = -0.1 * std::cos(tau * x[1] / 2.0);
        v.comp(0)[i] = 0.15;
        v.comp(1)[i] = 0.05 * std::sin(tau * x[1] / 2.0);
        ub.comp(0)[i] = -0.1 * std::cos(tau * x[1] / 2.0);
        ub.comp(1)[i] = 0.2;
        vb.comp(0)[i] = 0.1 * std::sin(tau * x[0] / 2.0);
        vb.comp(1)[i] = -0.15;
    }
    RefSnapshot ref = make_ref(g, rb, nb, ub, vb);
    for (int i = 0; i < g.cells(); ++i) {
        ref.e1.comp(0)[i] = 0.3;
        ref.e1.comp(1)[i] = -0.2;
        ref.e2.comp(0)[i] = 0.1;
        ref.e2.comp(1)[i] = 0.25;
    }
    FluidState s = state_from(rho, u, nn, v);

    IneqTerms it = inequality_terms(s, ref, ctx);

    // naive-loop recomputation
    ScalarField xi(g);
    for (int i = 0; i < g.cells(); ++i) xi[i] = rho[i] - rb[i] - nn[i] + nb[i];
    VectorField gk = op.conv_grad(xi);
    const auto law = PressureLaw::make(2.0);
    double i1 = 0.0, i2 = 0.0, i4 = 0.0, J = 0.0, D = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        for (int a = 0; a < 2; ++a) {
            const double dua = u.comp(a)[i] - ub.comp(a)[i];
            const double dva = v.comp(a)[i] - vb.comp(a)[i];
            for (int b = 0; b < 2; ++b) {
                const double dub = u.comp(b)[i] - ub.comp(b)[i];
                const double dvb = v.comp(b)[i] - vb.comp(b)[i];
                i1 -= ctx.eps * (ref.jac_u[static_cast<std::size_t>(a * 2 + b)][i] * rho[i] * dua * dub +
                                 ref.jac_v[static_cast<std::size_t>(a * 2 + b)][i] * nn[i] * dva * dvb);
            }
            i4 -= ctx.eps * (rho[i] / rb[i] * ref.e1.comp(a)[i] * dua +
                             nn[i] / nb[i] * ref.e2.comp(a)[i] * dva);
            J += ((rho[i] - rb[i]) * ub.comp(a)[i] - (nn[i] - nb[i]) * vb.comp(a)[i]) *
                 gk.comp(a)[i];
            D += rho[i] * dua * dua + nn[i] * dva * dva;
        }
        i2 -= ref.div_u[i] * law.rel_pressure(rho[i], rb[i]) +
              ref.div_v[i] * law.rel_pressure(nn[i], nb[i]);
    }
    const double meas = g.cell_measure();
    CHECK(it.i1 == doctest::Approx(i1 * meas).epsilon(1e-12));
    CHECK(it.i2 == doctest::Approx(i2 * meas).epsilon(1e-12));
    CHECK(it.i4 == doctest::Approx(i4 * meas).epsilon(1e-12));
    CHECK(it.J == doctest::Approx(J * meas).epsilon(1e-12));
    CHECK(it.i3 == doctest::Approx(ctx.sigma * J * meas).epsilon(1e-12));
    CHECK(it.dissipation == doctest::Approx(D * meas).epsilon(1e-12));

    // constant reference velocities: I1 and I2 vanish
    VectorField cu(g), cv(g);
    for (int i = 0; i < g.cells(); ++i) {
        cu.comp(0)[i] = 0.4;
        cv.comp(1)[i] = -0.3;
    }
    RefSnapshot refc = make_ref(g, rb, nb, cu, cv);
    IneqTerms itc = inequality_terms(s, refc, ctx);
    CHECK(std::abs(itc.i1) <= 1e-14);
    CHECK(std::abs(itc.i2) <= 1e-14);

    // rho = rhobar and n = nbar: I3 and J vanish
    FluidState aligned = state_from(rb, u, nb, v);
    IneqTerms ita = inequality_terms(aligned, ref, ctx);
    CHECK(ita.J == 0.0);
    CHECK(ita.i3 == 0.0);
}

TEST_CASE("gronwall envelope") {
    CHECK(gronwall_envelope(0.0, 5.0, 2.0, 0.0) == 0.0);
    CHECK(gronwall_envelope(0.3, 0.0, 7.0, 0.2) == doctest::Approx(0.34).epsilon(1e-15));
    CHECK(gronwall_envelope(1e-4, 1.0, 1.0, 0.1) ==
          doctest::Approx(2.7455e-2).epsilon(1e-4));
    CHECK_THROWS_AS(gronwall_envelope(0.1, -1.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("lemma 5.2 ratio") {
    // gamma = 2, d = 2, alpha = 2 gives q = 1; constants on a unit-area domain
    const GridSpec g = GridSpec::make(2, {8, 8}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic);
    ScalarField r(g, 1.7), rb(g, 1.2);
    CHECK(lemma52_ratio(r, rb, PressureLaw::make(2.0), 2.0, Lemma52Branch::p_branch) ==
          doctest::Approx(1.0).epsilon(1e-13));

    CHECK_THROWS_AS(lemma52_ratio(rb, rb, PressureLaw::make(2.0), 2.0, Lemma52Branch::p_branch),
                    std::invalid_argument);
    // branch hypothesis violations
    CHECK_THROWS_AS(lemma52_ratio(r, rb, PressureLaw::make(2.0), 2.0, Lemma52Branch::q_branch),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        lemma52_ratio(r, rb, PressureLaw::make(1.1), 0.5, Lemma52Branch::p_branch),
        std::invalid_argument);
}

TEST_CASE("sigma threshold") {
    const GridSpec g = torus(16);
    RieszOperator op(g, RieszParams::make(1.5, 2));
    RelEnergyContext ctx;
    ctx.op = &op;

    DensityPairSample degenerate{ScalarField(g, 1.0), ScalarField(g, 1.0), ScalarField(g, 1.0),
                                 ScalarField(g, 1.0)};
    std::vector<DensityPairSample> only_deg{degenerate};
    CHECK_THROWS_AS(sigma_threshold(only_deg, ctx), std::invalid_argument);

    auto bump = ScalarField::sample(g, [](std::array<double, 2> x) {
        return 0.2 * std::cos(tau * x[0] / 2.0);
    });
    DensityPairSample real{ScalarField(g, 1.0) + bump, ScalarField(g, 1.0), ScalarField(g, 1.0),
                           ScalarField(g, 1.0)};
    std::vector<DensityPairSample> both{degenerate, real};
    auto th = sigma_threshold(both, ctx);
    CHECK(th.samples_used == 1);  // the degenerate sample is excluded
    CHECK(th.c_star > 0.0);

    // lambda arithmetic: sigma = 1/C* gives lambda = 1/2
    ctx.sigma = 1.0 / th.c_star;
    auto th2 = sigma_threshold(both, ctx);
    CHECK(th2.lambda == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("inequality residual bookkeeping") {
    std::vector<RelEnergyRow> rows(3);
    rows[0].t = 0.0;
    rows[0].psi = 1.0;
    rows[1].t = 0.5;
    rows[1].psi = 1.2;
    rows[1].I1 = 0.3;
    rows[1].cum_dissipation = 0.05;
    rows[2].t = 1.0;
    rows[2].psi = 1.1;
    rows[2].I1 = 0.4;
    rows[2].I3 = -0.1;
    rows[2].cum_dissipation = 0.2;
    auto res = rel_inequality_residual(rows);
    CHECK(res[0] == 0.0);
    CHECK(res[1] == doctest::Approx(0.3 - (0.2 + 0.05)).epsilon(1e-15));
    CHECK(res[2] == doctest::Approx(0.3 - (0.1 + 0.2)).epsilon(1e-15));
}
