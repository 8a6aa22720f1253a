#include "erl/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "erl/common.hpp"

namespace erl {

PressureLaw PressureLaw::make(double gamma) {
    require(gamma > 1.0, "pressure law: gamma must exceed 1");
    return PressureLaw{gamma};
}

double PressureLaw::pressure(double r) const {
    require(r >= 0.0, "pressure: negative density");
    return std::pow(r, gamma);
}

double PressureLaw::dpressure(double r) const {
    require(r >= 0.0, "dpressure: negative density");
    return gamma * std::pow(r, gamma - 1.0);
}

double PressureLaw::internal_energy(double r) const {
    require(r >= 0.0, "internal_energy: negative density");
    return std::pow(r, gamma) / (gamma - 1.0);
}

double PressureLaw::denergy(double r) const {
    require(r >= 0.0, "denergy: negative density");
    return gamma / (gamma - 1.0) * std::pow(r, gamma - 1.0);
}

double PressureLaw::sound_speed(double r) const { return std::sqrt(dpressure(r)); }

double PressureLaw::rel_internal(double r, double rbar) const {
    require(rbar > 0.0, "rel_internal: reference density must be positive");
    return internal_energy(r) - internal_energy(rbar) - denergy(rbar) * (r - rbar);
}

double PressureLaw::rel_pressure(double r, double rbar) const {
    require(rbar > 0.0, "rel_pressure: reference density must be positive");
    return pressure(r) - pressure(rbar) - dpressure(rbar) * (r - rbar);
}

bool PressureLaw::case1(double alpha, int dim) const {
    return gamma >= 2.0 && alpha > 1.0 && alpha < 0.5 * dim + 1.0;
}

bool PressureLaw::case2(double alpha, int dim) const {
    return gamma >= 2.0 - (alpha - 1.0) / dim && gamma < 2.0 && alpha > 1.0 &&
           alpha <= 0.5 * dim + 1.0;
}

LemmaLowerBound lemma_lower_bound_check(const PressureLaw& law, double delta_bar, double M_bar,
                                        long samples, std::uint64_t seed, double R,
                                        double r_max) {
    require(delta_bar > 0.0 && delta_bar <= M_bar, "lemma check: need 0 < delta_bar <= M_bar");
    require(samples >= 1000, "lemma check: need at least 1e3 samples");
    if (R < 0.0) R = M_bar + 1.0;
    if (r_max < 0.0) r_max = 10.0 * R;
    require(R > 0.0 && r_max > R, "lemma check: need 0 < R < r_max");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ubar(delta_bar, M_bar);
    std::uniform_real_distribution<double> ulow(0.0, R);
    std::uniform_real_distribution<double> uhigh(R, r_max);

    LemmaLowerBound out;
    out.R = R;
    out.inf_quadratic = std::numeric_limits<double>::infinity();
    out.inf_power = std::numeric_limits<double>::infinity();
    for (long s = 0; s < samples; ++s) {
        const double rbar = ubar(rng);
        const double rlo = ulow(rng);
        if (std::abs(rlo - rbar) >= 1e-3 * (1.0 + rbar)) {
            const double ratio = law.rel_internal(rlo, rbar) / ((rlo - rbar) * (rlo - rbar));
            out.inf_quadratic = std::min(out.inf_quadratic, ratio);
            ++out.samples_quadratic;
        }
        const double rhi = uhigh(rng);
        const double ratio = law.rel_internal(rhi, rbar) / std::pow(std::abs(rhi - rbar), law.gamma);
        out.inf_power = std::min(out.inf_power, ratio);
        ++out.samples_power;
    }
    return out;
}

}  // namespace erl
