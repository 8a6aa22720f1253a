#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "erl/euler.hpp"
#include "erl/limit.hpp"
#include "erl/relent.hpp"

namespace erl {

/// Smooth strictly positive initial bump: base + amp * prod_a cos(2 pi k_a
/// ((x_a - lo_a)/L_a - shift_a)).
struct InitProfile {
    double base = 1.0;
    double amp = 0.1;
    std::array<int, 2> mode{1, 1};
    std::array<double, 2> shift{0.0, 0.0};

    double eval(std::array<double, 2> x, const GridSpec& box) const;
    ScalarField realize(const GridSpec& g) const;

    bool operator==(const InitProfile&) const = default;
};

struct ExperimentConfig {
    // grid
    int dim = 2;
    std::array<int, 2> n{64, 64};
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{8.0, 8.0};
    Boundary boundary = Boundary::periodic;
    // physics
    double gamma1 = 2.0;
    double gamma2 = 2.0;
    double alpha = 1.5;
    double sigma = 0.05;
    // solver
    double cfl = 0.4;
    double rho_min = 1e-10;
    double t_end = 0.25;
    int snapshots = 50;
    double eps = 0.1;  // single-run subcommands
    // sweep
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    std::uint64_t seed = 42;
    // reference
    int ref_refine = 2;
    double cfl_limit = 0.4;
    // initial data
    InitProfile rho0{1.0, 0.1, {1, 1}, {0.0, 0.0}};
    InitProfile n0{1.0, 0.05, {1, 1}, {0.25, 0.125}};

    GridSpec grid() const;
    GridSpec ref_grid() const;
    LimitConfig limit_config() const;
    SolverConfig solver_config(double eps_value) const;
    std::vector<double> snapshot_times() const;

    double gamma_min() const { return gamma1 < gamma2 ? gamma1 : gamma2; }
    /// Exponent hypotheses of the stability theorem for (gamma_min, alpha, d).
    bool theorem_regime(std::string* which = nullptr) const;
    /// Admissibility threshold gamma >= 2d/(d+alpha-1) for the coupling terms.
    bool coupling_admissible() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Well-prepared initial data: momenta set from the limit system's auxiliary
/// velocities evaluated on the same grid, so Psi(0) is discretization-small
/// uniformly in eps.
FluidState well_prepared_init(const LimitSolver& aux_solver, const ScalarField& rho0,
                              const ScalarField& n0);

/// Map an unscaled-friction trajectory (coefficient zeta = 1/sqrt(eps)) to the
/// diffusively scaled variables: rho(t) <- rho(t/sqrt(eps)), m <- m/sqrt(eps).
/// Linear interpolation between source snapshots where needed.
Trajectory rescale_diffusive(const Trajectory& source, double eps,
                             std::span<const double> times);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of log-residuals
};
/// Least-squares line through (log eps_k, log psi_k).
RateFit fit_rate(std::span<const double> eps, std::span<const double> psi);

struct EpsRun {
    double eps = 0.0;
    bool ok = false;
    std::string diagnostic;
    double psi0 = 0.0;
    double sup_psi = 0.0;
    double adjusted = 0.0;  // floor-subtracted; <= 0 means dropped from the fit
    double envelope_C = 0.0;
    std::vector<RelEnergyRow> series;
};

struct SweepResult {
    std::vector<EpsRun> runs;  // in eps_list order
    double floor_estimate = 0.0;
    double coarse_sup_psi = 0.0;  // finest eps at half resolution
    bool slope_valid = false;
    RateFit fit;      // on floor-adjusted values
    RateFit fit_raw;  // on raw sup psi
    double envelope_C = 0.0;
    bool envelope_uniform = false;
    bool monotone = false;
    bool regime = false;
    std::string regime_note;
};

/// The theorem experiment: build the fine-grid reference once, run the Euler
/// solver per eps with well-prepared data, collect sup_t Psi, estimate the
/// discretization floor from a half-resolution rerun of the smallest eps, and
/// fit the log-log rate.
SweepResult run_sweep(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace erl
