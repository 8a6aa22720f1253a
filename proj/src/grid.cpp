#include "erl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erl/common.hpp"

namespace erl {

GridSpec GridSpec::make(int dim, std::array<int, 2> n, std::array<double, 2> lo,
                        std::array<double, 2> hi, Boundary boundary) {
    require(dim == 1 || dim == 2, "grid: dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        require(n[a] >= 4, "grid: need at least 4 cells per axis");
        require(hi[a] > lo[a], "grid: extents must be positive");
    }
    require(!(dim == 2 && boundary == Boundary::noflux),
            "grid: no-flux boundaries are only offered in 1D");

    GridSpec g;
    g.dim = dim;
    g.boundary = boundary;
    for (int a = 0; a < dim; ++a) {
        g.n[a] = n[a];
        g.lo[a] = lo[a];
        g.hi[a] = hi[a];
        g.h[a] = (hi[a] - lo[a]) / n[a];
    }
    if (dim == 1) {
        g.n[1] = 1;
        g.lo[1] = 0.0;
        g.hi[1] = 1.0;
        g.h[1] = 1.0;
    }
    return g;
}

double GridSpec::min_extent() const {
    double m = extent(0);
    if (dim == 2) m = std::min(m, extent(1));
    return m;
}

double GridSpec::min_h() const {
    double m = h[0];
    if (dim == 2) m = std::min(m, h[1]);
    return m;
}

std::array<double, 2> GridSpec::cell_center(int flat) const {
    if (dim == 1) return {center(0, flat), 0.0};
    return {center(0, flat / n[1]), center(1, flat % n[1])};
}

ScalarField ScalarField::sample(const GridSpec& g,
                                const std::function<double(std::array<double, 2>)>& f) {
    ScalarField out(g);
    for (int i = 0; i < g.cells(); ++i) out[i] = f(g.cell_center(i));
    return out;
}

double integrate(const ScalarField& f) {
    require(all_finite(f.data()), "integrate: field has non-finite values");
    return compensated_sum(f.data()) * f.grid().cell_measure();
}

double lp_norm(const ScalarField& f, double p) {
    require(p >= 1.0, "lp_norm: p must be >= 1");
    require(all_finite(f.data()), "lp_norm: field has non-finite values");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : f.data()) m = std::max(m, std::abs(x));
        return m;
    }
    std::vector<double> pw(f.data().size());
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = std::pow(std::abs(f[static_cast<int>(i)]), p);
    const double s = compensated_sum(pw) * f.grid().cell_measure();
    return std::pow(s, 1.0 / p);
}

double min_value(const ScalarField& f) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : f.data()) m = std::min(m, x);
    return m;
}

double max_value(const ScalarField& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : f.data()) m = std::max(m, x);
    return m;
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
    require(a.grid() == b.grid(), "l1_distance: grid mismatch");
    std::vector<double> d(a.data().size());
    for (int i = 0; i < a.size(); ++i) d[static_cast<std::size_t>(i)] = std::abs(a[i] - b[i]);
    return compensated_sum(d) * a.grid().cell_measure();
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require(a.grid() == b.grid(), "field add: grid mismatch");
    ScalarField out(a.grid());
    for (int i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require(a.grid() == b.grid(), "field subtract: grid mismatch");
    ScalarField out(a.grid());
    for (int i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

ScalarField operator*(double s, const ScalarField& a) {
    ScalarField out(a.grid());
    for (int i = 0; i < a.size(); ++i) out[i] = s * a[i];
    return out;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    require(a.grid() == b.grid(), "field multiply: grid mismatch");
    ScalarField out(a.grid());
    for (int i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

ScalarField restrict_average(const ScalarField& fine, const GridSpec& coarse) {
    const GridSpec& fg = fine.grid();
    require(fg.dim == coarse.dim, "restrict: dimension mismatch");
    std::array<int, 2> r{1, 1};
    for (int a = 0; a < fg.dim; ++a) {
        require(fg.n[a] % coarse.n[a] == 0, "restrict: fine resolution must divide coarse");
        r[a] = fg.n[a] / coarse.n[a];
    }
    ScalarField out(coarse);
    if (fg.dim == 1) {
        const double inv = 1.0 / r[0];
        for (int i = 0; i < coarse.n[0]; ++i) {
            double s = 0.0;
            for (int k = 0; k < r[0]; ++k) s += fine[i * r[0] + k];
            out[i] = s * inv;
        }
        return out;
    }
    const double inv = 1.0 / (r[0] * r[1]);
    for (int i0 = 0; i0 < coarse.n[0]; ++i0)
        for (int i1 = 0; i1 < coarse.n[1]; ++i1) {
            double s = 0.0;
            for (int k0 = 0; k0 < r[0]; ++k0)
                for (int k1 = 0; k1 < r[1]; ++k1)
                    s += fine[fg.index(i0 * r[0] + k0, i1 * r[1] + k1)];
            out[coarse.index(i0, i1)] = s * inv;
        }
    return out;
}

VectorField restrict_average(const VectorField& fine, const GridSpec& coarse) {
    VectorField out(coarse);
    for (int a = 0; a < coarse.dim; ++a) out.comp(a) = restrict_average(fine.comp(a), coarse);
    return out;
}

namespace {

// Neighbor index along an axis with ghost handling. Reflection (no-flux)
// mirrors the interior cell, which zeroes the centered normal derivative of
// even-extended data at the wall.
inline int neighbor(int idx, int shift, int n, Boundary b) {
    int j = idx + shift;
    if (b == Boundary::periodic) {
        j %= n;
        if (j < 0) j += n;
        return j;
    }
    if (j < 0) j = -j - 1;
    if (j >= n) j = 2 * n - j - 1;
    return j;
}

}  // namespace

VectorField gradient_centered(const ScalarField& f) {
    const GridSpec& g = f.grid();
    VectorField out(g);
    if (g.dim == 1) {
        const double inv = 0.5 / g.h[0];
        for (int i = 0; i < g.n[0]; ++i) {
            const int ip = neighbor(i, +1, g.n[0], g.boundary);
            const int im = neighbor(i, -1, g.n[0], g.boundary);
            out.comp(0)[i] = (f[ip] - f[im]) * inv;
        }
        return out;
    }
    const double inv0 = 0.5 / g.h[0];
    const double inv1 = 0.5 / g.h[1];
    for (int i0 = 0; i0 < g.n[0]; ++i0)
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            const int c = g.index(i0, i1);
            out.comp(0)[c] = (f[g.index(neighbor(i0, +1, g.n[0], g.boundary), i1)] -
                              f[g.index(neighbor(i0, -1, g.n[0], g.boundary), i1)]) *
                             inv0;
            out.comp(1)[c] = (f[g.index(i0, neighbor(i1, +1, g.n[1], g.boundary))] -
                              f[g.index(i0, neighbor(i1, -1, g.n[1], g.boundary))]) *
                             inv1;
        }
    return out;
}

ScalarField divergence_centered(const VectorField& v) {
    const GridSpec& g = v.grid();
    ScalarField out(g);
    for (int a = 0; a < g.dim; ++a) {
        VectorField ga = gradient_centered(v.comp(a));
        for (int i = 0; i < g.cells(); ++i) out[i] += ga.comp(a)[i];
    }
    return out;
}

std::vector<ScalarField> jacobian_centered(const VectorField& v) {
    const GridSpec& g = v.grid();
    std::vector<ScalarField> jac(static_cast<std::size_t>(g.dim * g.dim));
    for (int b = 0; b < g.dim; ++b) {
        VectorField gb = gradient_centered(v.comp(b));
        for (int a = 0; a < g.dim; ++a) jac[static_cast<std::size_t>(a * g.dim + b)] = gb.comp(a);
    }
    return jac;
}

}  // namespace erl
