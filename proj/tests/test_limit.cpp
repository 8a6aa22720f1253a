#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "erl/limit.hpp"

using namespace erl;

namespace {

LimitConfig base_config(double sigma = 0.0, double g1 = 2.0, double g2 = 2.0) {
    LimitConfig c;
    c.law1 = PressureLaw::make(g1);
    c.law2 = PressureLaw::make(g2);
    c.sigma = sigma;
    c.alpha = 1.5;
    c.cfl = 0.4;
    return c;
}

// self-similar solution of d/dt u = (u^2)_xx in 1D: u = t^{-1/3}(C - x^2 t^{-2/3}/12)_+
double barenblatt(double t, double x, double C) {
    const double s = std::pow(t, -1.0 / 3.0);
    const double v = C - x * x * std::pow(t, -2.0 / 3.0) / 12.0;
    return v > 0.0 ? s * v : 0.0;
}

}  // namespace

TEST_CASE("constant state is a fixed point") {
    const GridSpec g = GridSpec::make(2, {16, 16}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    LimitSolver solver(g, base_config(0.05));
    AdState s{ScalarField(g, 1.1), ScalarField(g, 1.1), 0.0};
    for (int k = 0; k < 10; ++k) {
        AdState next = solver.step(s, 0.8 * solver.stable_dt(s));
        for (int i = 0; i < g.cells(); ++i) {
            CHECK(next.rho[i] == doctest::Approx(1.1).epsilon(1e-15));
            CHECK(next.n[i] == doctest::Approx(1.1).epsilon(1e-15));
        }
        s = next;
    }
}

TEST_CASE("Barenblatt profile is tracked in L1") {
    // sigma = 0 decouples the species; evolve the first against the closed form
    const double C = 1.0;
    const double t0 = 1.0, t1 = 2.0;
    auto err_at = [&](int N) {
        const GridSpec g =
            GridSpec::make(1, {N, 1}, {-6.0, 0.0}, {6.0, 1.0}, Boundary::noflux);
        auto rho0 = ScalarField::sample(
            g, [&](std::array<double, 2> x) { return barenblatt(t0, x[0], C); });
        LimitSolver solver(g, base_config());
        std::vector<double> times{t1 - t0};
        auto traj = solver.run(AdState{rho0, ScalarField(g), 0.0}, times);
        auto exact = ScalarField::sample(
            g, [&](std::array<double, 2> x) { return barenblatt(t1, x[0], C); });
        return l1_distance(traj.back().rho, exact);
    };
    const double e64 = err_at(64);
    const double e128 = err_at(128);
    const double h128 = 12.0 / 128.0;
    CHECK(e128 <= 3.0 * h128);
    CHECK(e64 / e128 >= std::pow(2.0, 0.8));  // observed order >= 0.8
}

TEST_CASE("mass conservation and positivity") {
    const GridSpec g = GridSpec::make(2, {24, 24}, {0.0, 0.0}, {4.0, 4.0}, Boundary::periodic);
    LimitSolver solver(g, base_config(0.05));
    constexpr double tau = 2.0 * std::numbers::pi;
    auto rho = ScalarField::sample(g, [&](std::array<double, 2> x) {
        return 1.0 + 0.3 * std::cos(tau * x[0] / 4.0) * std::cos(tau * x[1] / 4.0);
    });
    auto n = ScalarField::sample(g, [&](std::array<double, 2> x) {
        return 1.0 + 0.2 * std::sin(tau * x[1] / 4.0);
    });
    const double m1 = integrate(rho), m2 = integrate(n);
    std::vector<double> times{0.05, 0.15};
    auto traj = solver.run(AdState{rho, n, 0.0}, times);
    for (const AdState& s : traj) {
        CHECK(std::abs(integrate(s.rho) - m1) / m1 <= 1e-12);
        CHECK(std::abs(integrate(s.n) - m2) / m2 <= 1e-12);
        CHECK(min_value(s.rho) >= 0.0);
    }
}

TEST_CASE("pure diffusion obeys the discrete extremum principle") {
    const GridSpec g = GridSpec::make(1, {64, 1}, {0.0, 0.0}, {2.0, 1.0}, Boundary::periodic);
    auto rho = ScalarField::sample(g, [](std::array<double, 2> x) {
        return 1.0 + 0.5 * std::sin(std::numbers::pi * x[0]);
    });
    LimitSolver solver(g, base_config());
    const double lo0 = min_value(rho), hi0 = max_value(rho);
    AdState s{rho, ScalarField(g, 1.0), 0.0};
    for (int k = 0; k < 200; ++k) {
        s = solver.step(s, solver.stable_dt(s));
        CHECK(min_value(s.rho) >= lo0 - 1e-12);
        CHECK(max_value(s.rho) <= hi0 + 1e-12);
    }
}

TEST_CASE("auxiliary velocities") {
    const GridSpec g = GridSpec::make(2, {24, 24}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    LimitSolver solver(g, base_config(0.05));

    // constants: both velocities vanish
    auto aux0 = solver.aux_velocities(ScalarField(g, 1.4), ScalarField(g, 1.4));
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < g.cells(); ++i) {
            CHECK(std::abs(aux0.u.comp(c)[i]) <= 1e-15);
            CHECK(std::abs(aux0.v.comp(c)[i]) <= 1e-15);
        }

    // rho = n nonconstant, gamma1 = 2: the coupling cancels and u = -2 grad rho
    constexpr double tau = 2.0 * std::numbers::pi;
    auto rho = ScalarField::sample(g, [&](std::array<double, 2> x) {
        return 1.0 + 0.2 * std::cos(tau * x[0] / 2.0);
    });
    auto aux = solver.aux_velocities(rho, rho);
    VectorField grad = gradient_centered(rho);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < g.cells(); ++i)
            CHECK(aux.u.comp(c)[i] == doctest::Approx(-2.0 * grad.comp(c)[i]).epsilon(1e-13));

    CHECK_THROWS_AS(solver.aux_velocities(ScalarField(g, 0.0), ScalarField(g, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("kernel term of the velocity matches a refined-grid evaluation") {
    // general (rho, n): compare -sigma grad K against the same operator on a
    // 4x finer grid, restricted; the coarse evaluation is O(h)-consistent
    const double sigma = 0.05;
    constexpr double tau = 2.0 * std::numbers::pi;
    auto profile_rho = [&](std::array<double, 2> x) {
        return 1.0 + 0.3 * std::cos(tau * x[0] / 2.0) * std::cos(tau * x[1] / 2.0);
    };
    auto profile_n = [&](std::array<double, 2> x) {
        return 1.0 + 0.15 * std::sin(tau * x[0] / 2.0);
    };
    const GridSpec gc = GridSpec::make(2, {16, 16}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    const GridSpec gf = GridSpec::make(2, {64, 64}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    RieszOperator opc(gc, RieszParams::make(1.5, 2));
    RieszOperator opf(gf, RieszParams::make(1.5, 2));
    auto diff_c = ScalarField::sample(gc, [&](std::array<double, 2> x) {
        return profile_rho(x) - profile_n(x);
    });
    auto diff_f = ScalarField::sample(gf, [&](std::array<double, 2> x) {
        return profile_rho(x) - profile_n(x);
    });
    auto Gc = opc.conv_grad(diff_c);
    auto Gf = restrict_average(opf.conv_grad(diff_f), gc);
    double scale = 0.0, worst = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < gc.cells(); ++i) {
            scale = std::max(scale, std::abs(Gf.comp(c)[i]));
            worst = std::max(worst, std::abs(Gc.comp(c)[i] - Gf.comp(c)[i]));
        }
    CHECK(worst <= 0.05 * scale + 2.0 * sigma * gc.h[0]);  // O(h) agreement
}

TEST_CASE("step flux equals the upwinded face velocity times density") {
    const GridSpec g = GridSpec::make(2, {12, 12}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    LimitSolver solver(g, base_config(0.05));
    constexpr double tau = 2.0 * std::numbers::pi;
    auto rho = ScalarField::sample(g, [&](std::array<double, 2> x) {
        return 1.0 + 0.25 * std::cos(tau * x[0] / 2.0);
    });
    auto n = ScalarField::sample(g, [&](std::array<double, 2> x) {
        return 1.0 + 0.15 * std::sin(tau * x[1] / 2.0);
    });
    AdState s{rho, n, 0.0};
    FaceData fd = solver.face_data(s);

    // independent reassembly of the species-1 flux from h' differences and
    // face-averaged kernel gradients (the rho*u factorization)
    const RieszOperator* op = solver.riesz();
    VectorField G = op->conv_grad(rho - n);
    const auto& law = solver.config().law1;
    for (int a = 0; a < 2; ++a) {
        const int na = g.n[a];
        const int stride = a == 0 ? g.n[1] : 1;
        const int nperp = g.cells() / na;
        for (int p = 0; p < nperp; ++p) {
            const int base = a == 0 ? p : p * g.n[1];
            for (int f = 0; f < na; ++f) {
                const int iL = base + ((f == 0 ? na : f) - 1) * stride;
                const int iR = base + f * stride;
                const double gf = 0.5 * (G.comp(a)[iL] + G.comp(a)[iR]);
                const double vel = -((law.denergy(rho[iR]) - law.denergy(rho[iL])) / g.h[a] +
                                     0.05 * gf);
                const double flux = vel >= 0.0 ? vel * rho[iL] : vel * rho[iR];
                const std::size_t fi = static_cast<std::size_t>(p * (na + 1) + f);
                CHECK(fd.vel1[a][fi] == doctest::Approx(vel).epsilon(1e-12));
                CHECK(fd.flux1[a][fi] == doctest::Approx(flux).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("error terms") {
    const GridSpec g = GridSpec::make(2, {64, 64}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    LimitSolver solver(g, base_config(0.0));

    // stationary constant state: both error terms vanish
    std::vector<AdState> flat;
    for (double t : {0.0, 0.1, 0.2})
        flat.push_back(AdState{ScalarField(g, 1.2), ScalarField(g, 1.2), t});
    auto et0 = error_terms(solver, flat, 1);
    CHECK(!et0.one_sided);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < g.cells(); ++i) {
            CHECK(std::abs(et0.e1.comp(c)[i]) <= 1e-13);
            CHECK(std::abs(et0.e2.comp(c)[i]) <= 1e-13);
        }
    auto et_end = error_terms(solver, flat, 0);
    CHECK(et_end.one_sided);

    // manufactured solution rho(t,x) = a(t) g(x), gamma = 2, sigma = 0:
    // u = -2 grad rho, rho u = -grad(rho^2), so
    // e1 = -2 a a' grad(g^2) + 4 a^2 div(g grad g x grad g)
    constexpr double tau = 2.0 * std::numbers::pi;
    auto gfun = [&](double x) { return 1.0 + 0.25 * std::cos(tau * x / 2.0); };
    auto gprime = [&](double x) { return -0.25 * tau / 2.0 * std::sin(tau * x / 2.0); };
    auto a_of = [](double t) { return 1.0 + 0.5 * t; };
    const double dt = 1e-3;
    // hand-differentiated e1_x at t = 0.1:
    //   d/dt (rho u)_x = -2 a a' (g^2)' and the transport part
    //   div(rho u x u) = d/dx (rho u^2) = d/dx (4 a^3 g g'^2)
    auto rel_err_at = [&](const GridSpec& gr) {
        LimitSolver sol(gr, base_config(0.0));
        std::vector<AdState> manu;
        for (double t : {0.1 - dt, 0.1, 0.1 + dt}) {
            auto rho = ScalarField::sample(
                gr, [&](std::array<double, 2> x) { return a_of(t) * gfun(x[0]); });
            manu.push_back(AdState{rho, ScalarField(gr, 1.0), t});
        }
        auto et = error_terms(sol, manu, 1);
        const double a = a_of(0.1), ap = 0.5;
        double worst = 0.0, scale = 0.0;
        for (int i = 0; i < gr.cells(); ++i) {
            const auto x = gr.cell_center(i);
            const double gg = gfun(x[0]), gp = gprime(x[0]);
            const double gpp = -0.25 * tau * tau / 4.0 * std::cos(tau * x[0] / 2.0);
            const double ddt2 = -2.0 * a * ap * 2.0 * gg * gp;
            const double transport =
                4.0 * a * a * a * (gp * gp * gp + 2.0 * gg * gp * gpp);
            const double expect = ddt2 + transport;
            scale = std::max(scale, std::abs(expect));
            worst = std::max(worst, std::abs(et.e1.comp(0)[i] - expect));
        }
        return worst / scale;
    };
    const double e32 = rel_err_at(GridSpec::make(2, {32, 32}, {0.0, 0.0}, {2.0, 2.0},
                                                 Boundary::periodic));
    const double e64 = rel_err_at(g);
    CHECK(e64 <= 2e-2);
    CHECK(e32 / e64 >= std::pow(2.0, 1.8));  // O(dt^2 + h^2)
}

TEST_CASE("reference assembly guards the positivity hypothesis") {
    const GridSpec fine = GridSpec::make(1, {64, 1}, {-6.0, 0.0}, {6.0, 1.0}, Boundary::noflux);
    const GridSpec coarse = GridSpec::make(1, {32, 1}, {-6.0, 0.0}, {6.0, 1.0}, Boundary::noflux);
    auto rho0 = ScalarField::sample(
        fine, [](std::array<double, 2> x) { return barenblatt(1.0, x[0], 1.0); });
    std::vector<double> times{0.0, 0.05, 0.1};
    // compactly supported data violates the strict lower bound
    CHECK_THROWS_AS(build_reference(fine, base_config(), rho0, ScalarField(fine, 1.0), times,
                                    coarse, /*enforce_positive=*/true),
                    std::runtime_error);
    auto ref = build_reference(fine, base_config(), rho0, ScalarField(fine, 1.0), times, coarse,
                               /*enforce_positive=*/false);
    CHECK(ref.delta_bar == 0.0);
    CHECK(ref.snapshots.size() == 3);
    CHECK(!ref.snapshots.front().derived_valid);
}
