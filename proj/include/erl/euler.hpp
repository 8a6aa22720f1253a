#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "erl/grid.hpp"
#include "erl/riesz.hpp"
#include "erl/thermo.hpp"

namespace erl {

/// Conserved variables of the two-species fluid.
struct FluidState {
    ScalarField rho;  // species-1 density
    VectorField m;    // rho u
    ScalarField n;    // species-2 density
    VectorField w;    // n v
    double t = 0.0;
};

/// scaled: relaxation parameter eps (pressure and force carry 1/eps, friction
/// rate 1/eps). unscaled: friction coefficient zeta, unit pressure scale.
enum class FrictionMode { scaled, unscaled };

struct SolverConfig {
    FrictionMode mode = FrictionMode::scaled;
    double eps = 1.0;
    double zeta = 1.0;
    double sigma = 0.0;
    PressureLaw law1 = PressureLaw::make(2.0);
    PressureLaw law2 = PressureLaw::make(2.0);
    double alpha = 1.5;  // kernel order, used when sigma != 0
    double cfl = 0.4;
    double rho_min = 1e-10;
    double blowup_factor = 1e3;

    double pressure_scale() const { return mode == FrictionMode::scaled ? 1.0 / eps : 1.0; }
    double friction_rate() const { return mode == FrictionMode::scaled ? 1.0 / eps : zeta; }
    double kinetic_weight() const { return mode == FrictionMode::scaled ? eps : 1.0; }
};

struct EnergyReport {
    double kinetic = 0.0;  // weight * (1/2) int rho|u|^2 + n|v|^2
    double internal1 = 0.0;
    double internal2 = 0.0;
    double interaction = 0.0;
    double total = 0.0;
    double dissipation = 0.0;  // int rho|u|^2 + n|v|^2
    double mass1 = 0.0;
    double mass2 = 0.0;
};

struct Snapshot {
    double t = 0.0;
    FluidState state;
    EnergyReport energy;
};
using Trajectory = std::vector<Snapshot>;

/// Exact integrating-factor update for d/dt m = -rate (m + phi) with phi
/// frozen: m <- -phi + (m + phi) e^{-rate dt}.
void friction_update(VectorField& m, const VectorField& phi, double rate, double dt);

/// First-order FV solver for the diffusively scaled two-species Euler system
/// with Riesz coupling: Rusanov fluxes for each species' Euler subsystem
/// (pressure scaled by 1/eps), then the nonlocal force lumped with friction
/// through the exact integrating factor. Asymptotic-preserving in eps.
class EulerSolver {
  public:
    EulerSolver(const GridSpec& grid, SolverConfig cfg);

    const GridSpec& grid() const { return grid_; }
    const SolverConfig& config() const { return cfg_; }
    const RieszOperator* riesz() const { return op_.get(); }

    double stable_dt(const FluidState& s) const;
    FluidState step(const FluidState& s, double dt) const;
    EnergyReport total_energy(const FluidState& s) const;

    /// March to each requested time (adaptive CFL dt, clipped to land
    /// exactly); aborts on energy blow-up or invariant loss.
    Trajectory run(const FluidState& initial, std::span<const double> snapshot_times) const;

    FluidState make_state(const ScalarField& rho, const VectorField& m, const ScalarField& n,
                          const VectorField& w) const;

  private:
    GridSpec grid_;
    SolverConfig cfg_;
    std::shared_ptr<const RieszOperator> op_;
};

// ---- weak-form diagnostics ----------------------------------------------------

struct ScalarTestFn {
    std::function<double(double, std::array<double, 2>)> value;
    std::function<double(double, std::array<double, 2>)> dt;
    std::function<std::array<double, 2>(double, std::array<double, 2>)> grad;
};

struct VectorTestFn {
    std::function<std::array<double, 2>(double, std::array<double, 2>)> value;
    std::function<std::array<double, 2>(double, std::array<double, 2>)> dt;
    // jac[a][b] = d(phi_b)/d(x_a)
    std::function<std::array<std::array<double, 2>, 2>(double, std::array<double, 2>)> jac;
};

struct WeakResiduals {
    double continuity1 = 0.0;
    double momentum1 = 0.0;
    double continuity2 = 0.0;
    double momentum2 = 0.0;
};

/// Residuals of the four weak formulations evaluated on a discrete trajectory
/// (trapezoid in time, cell sums in space). Test functions must be compactly
/// supported in time and tangential at no-flux boundaries.
WeakResiduals weak_form_residual(const Trajectory& traj, const EulerSolver& solver,
                                 const ScalarTestFn& phi, const VectorTestFn& phi_t,
                                 const ScalarTestFn& psi, const VectorTestFn& psi_t);

struct TimeTestFn {
    std::function<double(double)> value;
    std::function<double(double)> dt;
};

/// Weak energy-dissipation form: -int H theta' + int (rho|u|^2+n|v|^2) theta
/// - int H_0 theta(0); nonpositive up to the splitting residual.
double dissipation_form_residual(const Trajectory& traj, const TimeTestFn& theta);

}  // namespace erl
