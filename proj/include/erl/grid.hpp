#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace erl {

enum class Boundary { periodic, noflux };

/// Uniform Cartesian cell grid on an axis-aligned box, 1D or 2D.
/// Cells are enumerated row-major: flat = i0 * n[1] + i1, axis 0 slowest.
struct GridSpec {
    int dim = 1;
    std::array<int, 2> n{1, 1};        // cells per axis; n[1] == 1 in 1D
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};
    Boundary boundary = Boundary::periodic;
    std::array<double, 2> h{1.0, 1.0};  // derived spacing

    static GridSpec make(int dim, std::array<int, 2> n, std::array<double, 2> lo,
                         std::array<double, 2> hi, Boundary boundary);

    int cells() const { return dim == 1 ? n[0] : n[0] * n[1]; }
    double extent(int axis) const { return hi[axis] - lo[axis]; }
    double min_extent() const;
    double min_h() const;
    double cell_measure() const { return dim == 1 ? h[0] : h[0] * h[1]; }
    double center(int axis, int idx) const { return lo[axis] + (idx + 0.5) * h[axis]; }
    std::array<double, 2> cell_center(int flat) const;
    int index(int i0, int i1) const { return i0 * n[1] + i1; }

    bool operator==(const GridSpec&) const = default;
};

/// One real value per cell (a cell average).
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid_(g), v_(static_cast<std::size_t>(g.cells()), fill) {}

    static ScalarField sample(const GridSpec& g,
                              const std::function<double(std::array<double, 2>)>& f);

    const GridSpec& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    std::span<double> data() { return v_; }
    std::span<const double> data() const { return v_; }
    const double* raw() const { return v_.data(); }
    double* raw() { return v_.data(); }

  private:
    GridSpec grid_;
    std::vector<double> v_;
};

/// One real d-vector per cell, stored per component.
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(const GridSpec& g, double fill = 0.0) : grid_(g) {
        for (int a = 0; a < g.dim; ++a) comp_[a] = ScalarField(g, fill);
        for (int a = g.dim; a < 2; ++a) comp_[a] = ScalarField();
    }

    const GridSpec& grid() const { return grid_; }
    ScalarField& comp(int a) { return comp_[a]; }
    const ScalarField& comp(int a) const { return comp_[a]; }
    std::array<double, 2> at(int i) const {
        std::array<double, 2> v{comp_[0][i], 0.0};
        if (grid_.dim == 2) v[1] = comp_[1][i];
        return v;
    }

  private:
    GridSpec grid_;
    std::array<ScalarField, 2> comp_;
};

// -- quadrature / norms -------------------------------------------------------

/// Discrete integral: compensated sum of cell values times the cell measure.
double integrate(const ScalarField& f);

/// L^p norm, p >= 1 finite or infinity (max norm).
double lp_norm(const ScalarField& f, double p);

double min_value(const ScalarField& f);
double max_value(const ScalarField& f);

/// L^1 distance between two fields on the same grid.
double l1_distance(const ScalarField& a, const ScalarField& b);

// -- algebra helpers ----------------------------------------------------------

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField multiply(const ScalarField& a, const ScalarField& b);

// -- restriction and differences ----------------------------------------------

/// Cell-average restriction from a fine grid to a coarse grid whose resolution
/// divides the fine one axis-wise. Preserves the discrete integral.
ScalarField restrict_average(const ScalarField& fine, const GridSpec& coarse);
VectorField restrict_average(const VectorField& fine, const GridSpec& coarse);

/// Centered differences; periodic wrap or reflected ghosts on no-flux grids.
VectorField gradient_centered(const ScalarField& f);
ScalarField divergence_centered(const VectorField& v);
/// jac[a*dim + b] = d(v_b)/d(x_a)
std::vector<ScalarField> jacobian_centered(const VectorField& v);

}  // namespace erl
