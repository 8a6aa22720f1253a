#pragma once

#include <cstdint>

namespace erl {

/// Power-law pressure p(r) = r^gamma with its internal energy
/// h(r) = r^gamma/(gamma-1) and the Bregman relative quantities.
struct PressureLaw {
    double gamma = 2.0;

    static PressureLaw make(double gamma);

    double pressure(double r) const;
    double dpressure(double r) const;       // p'(r) = gamma r^(gamma-1)
    double internal_energy(double r) const;  // h(r)
    double denergy(double r) const;          // h'(r) = gamma/(gamma-1) r^(gamma-1)
    double sound_speed(double r) const;      // sqrt(p'(r))

    /// h(r|rbar) = h(r) - h(rbar) - h'(rbar)(r - rbar); rbar must be > 0.
    double rel_internal(double r, double rbar) const;
    /// Same Bregman construction applied to p.
    double rel_pressure(double r, double rbar) const;

    // Stability-theorem exponent hypotheses for a given kernel order.
    bool case1(double alpha, int dim) const;  // gamma >= 2, 1 < alpha < d/2+1
    bool case2(double alpha, int dim) const;  // 2-(alpha-1)/d <= gamma < 2, 1 < alpha <= d/2+1
    bool theorem_regime(double alpha, int dim) const { return case1(alpha, dim) || case2(alpha, dim); }
};

/// Sampled lower-bound constants for the Bregman distance: the infimum of
/// h(r|rbar)/|r-rbar|^2 on r in [0,R] and of h(r|rbar)/|r-rbar|^gamma on
/// r in (R, r_max], over rbar in [delta_bar, M_bar]. Samples with
/// |r-rbar| < 1e-3 (1+rbar) are excluded as removable 0/0 points.
struct LemmaLowerBound {
    double inf_quadratic = 0.0;
    double inf_power = 0.0;
    double R = 0.0;
    long samples_quadratic = 0;
    long samples_power = 0;
};

LemmaLowerBound lemma_lower_bound_check(const PressureLaw& law, double delta_bar, double M_bar,
                                        long samples, std::uint64_t seed, double R = -1.0,
                                        double r_max = -1.0);

}  // namespace erl
