#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "erl/grid.hpp"
#include "erl/riesz.hpp"
#include "erl/thermo.hpp"

namespace erl {

struct AdState {
    ScalarField rho;
    ScalarField n;
    double t = 0.0;
};

struct LimitConfig {
    PressureLaw law1 = PressureLaw::make(2.0);
    PressureLaw law2 = PressureLaw::make(2.0);
    double sigma = 0.0;
    double alpha = 1.5;
    double cfl = 0.4;
};

struct AuxVelocities {
    VectorField u;
    VectorField v;
    /// Largest |normal component| seen in boundary cells before zeroing
    /// (no-flux grids only; zero on the torus).
    double boundary_normal_pre_zero = 0.0;
};

/// Face velocities and upwind fluxes per species and axis.
/// Layout: [axis][pencil * (n[axis]+1) + face].
struct FaceData {
    std::array<std::vector<double>, 2> vel1, flux1;
    std::array<std::vector<double>, 2> vel2, flux2;
};

/// FV solver for the two-species aggregation-diffusion system. One face
/// velocity -(dh'(r)/h + sign * sigma * G) drives both the diffusive and the
/// drift transport with upwinded density, so the assembled flux is literally
/// the face-interpolated r*u of the continuity-equation factorization.
class LimitSolver {
  public:
    LimitSolver(const GridSpec& grid, LimitConfig cfg);

    const GridSpec& grid() const { return grid_; }
    const LimitConfig& config() const { return cfg_; }
    const RieszOperator* riesz() const { return op_.get(); }

    /// u = -(grad h1'(rho) + sigma grad K*(rho-n)), v with the opposite
    /// coupling sign; cell-centered, centered differences.
    AuxVelocities aux_velocities(const ScalarField& rho, const ScalarField& n) const;

    FaceData face_data(const AdState& s) const;
    double stable_dt(const AdState& s) const;
    AdState step(const AdState& s, double dt) const;
    std::vector<AdState> run(const AdState& initial, std::span<const double> times) const;

  private:
    AdState step_with(const AdState& s, const FaceData& fd, double dt) const;
    double stable_dt_with(const AdState& s, const FaceData& fd) const;

    GridSpec grid_;
    LimitConfig cfg_;
    std::shared_ptr<const RieszOperator> op_;
};

/// Momentum-equation residual terms e = d/dt(r u) + div(r u x u) of the limit
/// solution, by centered snapshot differences in time and centered spatial
/// differences. Endpoint snapshots fall back to one-sided differences.
struct ErrorTerms {
    VectorField e1;
    VectorField e2;
    bool one_sided = false;
};
ErrorTerms error_terms(const LimitSolver& solver, std::span<const AdState> traj, std::size_t k);

/// Reference-solution bundle restricted to the (coarser) comparison grid.
struct RefSnapshot {
    double t = 0.0;
    ScalarField rho, n;
    VectorField u, v;
    VectorField e1, e2;
    std::vector<ScalarField> jac_u, jac_v;  // [a*dim+b] = d(u_b)/d(x_a)
    ScalarField div_u, div_v;
    bool one_sided_errors = false;
    /// False when the trajectory touches vacuum: densities are restricted but
    /// velocities and error terms are not defined there.
    bool derived_valid = true;
};

struct ReferenceSolution {
    GridSpec fine;
    GridSpec coarse;
    std::vector<AdState> fine_traj;
    std::vector<RefSnapshot> snapshots;
    double delta_bar = 0.0;
    double M_bar = 0.0;
    double boundary_normal_pre_zero = 0.0;
};

/// Assemble restricted snapshots from an existing fine trajectory.
/// enforce_positive rejects trajectories that lose the strict lower density
/// bound, which the stability framework requires of a reference solution.
ReferenceSolution assemble_reference(const LimitSolver& solver, std::vector<AdState> fine_traj,
                                     const GridSpec& coarse, bool enforce_positive = true);

/// Run the limit solver on the fine grid and assemble restricted snapshots.
ReferenceSolution build_reference(const GridSpec& fine, const LimitConfig& cfg,
                                  const ScalarField& rho0, const ScalarField& n0,
                                  std::span<const double> times, const GridSpec& coarse,
                                  bool enforce_positive = true);

}  // namespace erl
