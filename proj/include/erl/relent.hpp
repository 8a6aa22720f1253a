#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "erl/euler.hpp"
#include "erl/limit.hpp"

namespace erl {

/// One evaluation of the relative-energy functionals against a reference
/// snapshot, plus the running inequality bookkeeping. The I columns hold
/// cumulative time integrals (trapezoid on the snapshot cadence); J and the
/// instantaneous dissipation are per-snapshot values.
struct RelEnergyRow {
    double t = 0.0;
    double psi = 0.0;
    double rel_kin = 0.0;
    double bregman = 0.0;
    double interaction = 0.0;
    double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0;
    double J = 0.0;
    double dissipation = 0.0;      // instantaneous integrand
    double cum_dissipation = 0.0;  // trapezoid cumulative
    double envelope = 0.0;
};

struct RelEnergyContext {
    PressureLaw law1 = PressureLaw::make(2.0);
    PressureLaw law2 = PressureLaw::make(2.0);
    double sigma = 0.0;
    double eps = 1.0;
    double rho_min = 1e-10;
    const RieszOperator* op = nullptr;  // required when sigma != 0
};

/// int 1/2 rho|u-ubar|^2 + 1/2 n|v-vbar|^2 (no eps weight).
double rel_kinetic(const FluidState& s, const RefSnapshot& ref, double rho_min);

struct RelPotential {
    double bregman = 0.0;
    double interaction = 0.0;
    double total = 0.0;
};
RelPotential rel_potential(const FluidState& s, const RefSnapshot& ref,
                           const RelEnergyContext& ctx);

/// Psi = eps * rel_kinetic + rel_potential, with its decomposition.
RelEnergyRow psi_report(const FluidState& s, const RefSnapshot& ref,
                        const RelEnergyContext& ctx);

/// Instantaneous integrands of the inequality terms at one snapshot.
struct IneqTerms {
    double i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0;
    double J = 0.0;
    double dissipation = 0.0;
};
IneqTerms inequality_terms(const FluidState& s, const RefSnapshot& ref,
                           const RelEnergyContext& ctx);

/// Per-snapshot rows for a whole trajectory against a time-aligned reference;
/// I columns accumulated by the trapezoid rule, envelope from the fitted
/// per-run constant.
std::vector<RelEnergyRow> relative_energy_series(const Trajectory& traj,
                                                 const ReferenceSolution& ref,
                                                 const RelEnergyContext& ctx);

/// residual(t) = (I1+I2+I3+I4) - (Psi(t) - Psi(0) + cumulative dissipation).
std::vector<double> rel_inequality_residual(std::span<const RelEnergyRow> series);

double gronwall_envelope(double psi0, double C, double T, double eps);
/// Smallest C >= 0 with Psi(t) <= e^{Ct}(Psi(0) + eps^2) at every snapshot.
double fit_envelope_C(std::span<const RelEnergyRow> series, double eps);

enum class Lemma52Branch { p_branch, q_branch };
/// ||r - rbar||_q^2 / int h(r|rbar), q = 2d/(d+alpha) or 2/(3-gamma).
double lemma52_ratio(const ScalarField& r, const ScalarField& rbar, const PressureLaw& law,
                     double alpha, Lemma52Branch branch);

struct SigmaThreshold {
    double c_star = 0.0;
    double lambda = 0.0;
    long samples_used = 0;
};
struct DensityPairSample {
    ScalarField rho, rho_bar, n, n_bar;
};
/// Empirical C* = max |int xi K*xi| / int(h1(rho|rho_bar)+h2(n|n_bar)) over the
/// sample family, and lambda = 1 - sigma C*/2 for the configured sigma.
SigmaThreshold sigma_threshold(std::span<const DensityPairSample> samples,
                               const RelEnergyContext& ctx);

}  // namespace erl
