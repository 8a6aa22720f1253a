#include "erl/fields_random.hpp"

#include <cmath>
#include <numbers>

#include "erl/common.hpp"

namespace erl {

RandomTrigField RandomTrigField::make(std::mt19937_64& rng, int dim, int max_mode, double mean,
                                      double amplitude, bool zero_mean) {
    require(dim == 1 || dim == 2, "random field: dimension must be 1 or 2");
    require(max_mode >= 1, "random field: need at least one mode");
    RandomTrigField f;
    f.dim_ = dim;
    f.mean_ = zero_mean ? 0.0 : mean;
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    int count = 0;
    for (int k0 = 0; k0 <= max_mode; ++k0) {
        const int k1lo = (dim == 2) ? -max_mode : 0;
        const int k1hi = (dim == 2) ? max_mode : 0;
        for (int k1 = k1lo; k1 <= k1hi; ++k1) {
            if (k0 == 0 && k1 <= 0) continue;  // constant and conjugate duplicates
            ++count;
        }
    }
    const double scale = amplitude / std::sqrt(static_cast<double>(count));
    for (int k0 = 0; k0 <= max_mode; ++k0) {
        const int k1lo = (dim == 2) ? -max_mode : 0;
        const int k1hi = (dim == 2) ? max_mode : 0;
        for (int k1 = k1lo; k1 <= k1hi; ++k1) {
            if (k0 == 0 && k1 <= 0) continue;
            Mode m;
            m.k0 = k0;
            m.k1 = k1;
            m.a = scale * coef(rng);
            m.b = scale * coef(rng);
            f.modes_.push_back(m);
        }
    }
    return f;
}

double RandomTrigField::eval(std::array<double, 2> x, const GridSpec& box) const {
    constexpr double tau = 2.0 * std::numbers::pi;
    double s = mean_;
    const double t0 = (x[0] - box.lo[0]) / box.extent(0);
    const double t1 = dim_ == 2 ? (x[1] - box.lo[1]) / box.extent(1) : 0.0;
    for (const Mode& m : modes_) {
        const double phase = tau * (m.k0 * t0 + m.k1 * t1);
        s += m.a * std::cos(phase) + m.b * std::sin(phase);
    }
    return s;
}

ScalarField RandomTrigField::realize(const GridSpec& g) const {
    ScalarField out(g);
    for (int i = 0; i < g.cells(); ++i) out[i] = eval(g.cell_center(i), g);
    return out;
}

ScalarField bump_field(const GridSpec& g, std::array<double, 2> center_rel, double width_rel) {
    require(width_rel > 0.0, "bump: width must be positive");
    ScalarField out(g);
    for (int i = 0; i < g.cells(); ++i) {
        const auto x = g.cell_center(i);
        double q = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double L = g.extent(a);
            double d = (x[a] - (g.lo[a] + center_rel[a] * L)) / L;
            if (g.boundary == Boundary::periodic) d -= std::round(d);  // nearest image
            q += (d * d) / (width_rel * width_rel);
        }
        out[i] = std::exp(-q);
    }
    return out;
}

}  // namespace erl
