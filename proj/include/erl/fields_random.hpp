#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "erl/grid.hpp"

namespace erl {

/// Random trigonometric polynomial with seeded coefficients. The realization
/// is an analytic function of x, so the same draw can be sampled on any grid;
/// refinement studies then compare discretizations of one continuum field.
class RandomTrigField {
  public:
    /// Modes |k_a| <= max_mode, i.i.d. coefficients scaled so the fluctuation
    /// has roughly unit amplitude; zero_mean drops the constant term.
    static RandomTrigField make(std::mt19937_64& rng, int dim, int max_mode, double mean,
                                double amplitude, bool zero_mean);

    double eval(std::array<double, 2> x, const GridSpec& box) const;
    ScalarField realize(const GridSpec& g) const;

  private:
    struct Mode {
        int k0 = 0, k1 = 0;
        double a = 0.0, b = 0.0;  // cos and sin coefficients
    };
    int dim_ = 1;
    double mean_ = 0.0;
    std::vector<Mode> modes_;
};

/// Periodized Gaussian bump, center c and width w relative to the box.
ScalarField bump_field(const GridSpec& g, std::array<double, 2> center_rel, double width_rel);

}  // namespace erl
