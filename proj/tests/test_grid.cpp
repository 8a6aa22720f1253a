#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "erl/grid.hpp"

using namespace erl;

TEST_CASE("uniform grid construction") {
    const GridSpec g = GridSpec::make(1, {10, 1}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic);
    CHECK(g.h[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g.cells() == 10);
    CHECK(g.center(0, 0) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(g.center(0, 9) == doctest::Approx(0.95).epsilon(1e-15));

    const GridSpec g2 = GridSpec::make(2, {8, 8}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic);
    CHECK(g2.cells() == 64);
    CHECK(g2.h[0] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g2.h[1] == doctest::Approx(0.125).epsilon(1e-15));

    CHECK_THROWS_AS(GridSpec::make(2, {8, 8}, {0.0, 0.0}, {1.0, 1.0}, Boundary::noflux),
                    std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(3, {8, 8}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic),
                    std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(1, {3, 1}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic),
                    std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(1, {8, 1}, {1.0, 0.0}, {0.0, 1.0}, Boundary::periodic),
                    std::invalid_argument);
}

TEST_CASE("integrate basics") {
    const GridSpec g = GridSpec::make(1, {10, 1}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic);
    CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));

    const GridSpec g2 = GridSpec::make(2, {8, 8}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    CHECK(integrate(ScalarField(g2, 0.75)) == doctest::Approx(3.0).epsilon(1e-14));

    // two-cell example scaled to a 4-cell grid: {0,2,0,2} on [0,1] integrates to 1
    const GridSpec g4 = GridSpec::make(1, {4, 1}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic);
    ScalarField f(g4);
    f[1] = 2.0;
    f[3] = 2.0;
    CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-15));

    ScalarField bad(g4, 1.0);
    bad[2] = std::nan("");
    CHECK_THROWS_AS(integrate(bad), std::invalid_argument);
}

TEST_CASE("lp norms") {
    const GridSpec g = GridSpec::make(1, {4, 1}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic);
    CHECK(lp_norm(ScalarField(g, -0.7), 1.0) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(lp_norm(ScalarField(g, -0.7), 3.7) == doctest::Approx(0.7).epsilon(1e-14));

    ScalarField f(g);
    f[0] = 0.0;
    f[1] = 2.0;
    f[2] = 0.0;
    f[3] = 2.0;
    CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) == 2.0);
    CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("summation properties on random fields") {
    const GridSpec g = GridSpec::make(2, {16, 16}, {0.0, 0.0}, {1.0, 1.0}, Boundary::periodic);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(g), h(g);
    for (int i = 0; i < g.cells(); ++i) {
        f[i] = u(rng);
        h[i] = u(rng);
    }

    // naive-order summation oracle
    double naive = 0.0;
    for (int i = 0; i < g.cells(); ++i) naive += std::pow(std::abs(f[i]), 2.0);
    naive = std::sqrt(naive * g.cell_measure());
    CHECK(lp_norm(f, 2.0) == doctest::Approx(naive).epsilon(1e-14));

    // linearity of the integral
    const double a = 1.7, b = -0.3;
    ScalarField comb(g);
    for (int i = 0; i < g.cells(); ++i) comb[i] = a * f[i] + b * h[i];
    CHECK(integrate(comb) ==
          doctest::Approx(a * integrate(f) + b * integrate(h)).epsilon(1e-13));

    // triangle inequality
    for (double p : {1.0, 2.0, 4.0}) {
        ScalarField sum(g);
        for (int i = 0; i < g.cells(); ++i) sum[i] = f[i] + h[i];
        CHECK(lp_norm(sum, p) <= lp_norm(f, p) + lp_norm(h, p) + 1e-13);
    }

    // p -> infinity from below
    const double linf = lp_norm(f, std::numeric_limits<double>::infinity());
    double prev = lp_norm(f, 2.0);
    for (double p : {8.0, 32.0}) {
        const double cur = lp_norm(f, p);
        CHECK(cur >= prev - 1e-13);
        CHECK(cur <= linf + 1e-13);
        prev = cur;
    }

    // determinism: bit-identical reevaluation
    CHECK(integrate(f) == integrate(f));
    CHECK(lp_norm(f, 2.0) == lp_norm(f, 2.0));
}

TEST_CASE("restriction preserves integrals") {
    const GridSpec fine = GridSpec::make(2, {32, 32}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    const GridSpec coarse = GridSpec::make(2, {8, 8}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScalarField f(fine);
    for (int i = 0; i < fine.cells(); ++i) f[i] = u(rng);
    ScalarField r = restrict_average(f, coarse);
    CHECK(integrate(r) == doctest::Approx(integrate(f)).epsilon(1e-13));
}

TEST_CASE("centered gradient on periodic grids") {
    const GridSpec g = GridSpec::make(2, {64, 64}, {0.0, 0.0}, {2.0, 2.0}, Boundary::periodic);
    auto f = ScalarField::sample(
        g, [](std::array<double, 2> x) { return std::sin(M_PI * x[0]) * std::cos(M_PI * x[1]); });
    VectorField gr = gradient_centered(f);
    double worst = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const auto x = g.cell_center(i);
        const double gx = M_PI * std::cos(M_PI * x[0]) * std::cos(M_PI * x[1]);
        const double gy = -M_PI * std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
        worst = std::max({worst, std::abs(gr.comp(0)[i] - gx), std::abs(gr.comp(1)[i] - gy)});
    }
    CHECK(worst < 8e-3);  // O(h^2): (h^2/6) pi^3 at h = 1/32
}
