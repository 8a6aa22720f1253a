#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "erl/grid.hpp"

namespace erl {

/// Order parameter of the Riesz kernel |x|^{alpha-d}/(d-alpha), 0 < alpha < d.
struct RieszParams {
    double alpha = 1.0;
    int dim = 1;

    static RieszParams make(double alpha, int dim);
    double prefactor() const { return 1.0 / (dim - alpha); }
    /// Gradient convolutions additionally need 1 < alpha < d.
    bool gradient_admissible() const { return alpha > 1.0 && alpha < dim; }
};

/// Point evaluation of the kernel; x == 0 is a singularity error.
double riesz_kernel(std::array<double, 2> x, const RieszParams& p);
/// Pointwise kernel gradient: -x |x|^{alpha-d-2}.
std::array<double, 2> riesz_kernel_grad(std::array<double, 2> x, const RieszParams& p);

struct RieszOptions {
    /// Periodization: lattice images summed for |m_a| <= image_radius domain lengths.
    int image_radius = 3;
    /// Quadrature weights switch from cell averages to midpoint evaluation
    /// beyond this fraction of the smallest extent. The fixed physical radius
    /// keeps the constant-field quadrature error at O(h^2) under refinement.
    double near_radius_rel = 0.05;
};

/// Discretized convolution operators for one (grid, alpha) pair.
///
/// All routes share one translation-invariant weight table: midpoint kernel
/// values far from the singularity, exact cell averages near it (1D uses the
/// closed-form antiderivative, 2D polar integration over the square cell for
/// the self weight and subdivided Gauss panels for near neighbors). On
/// periodic grids the table is periodized by truncated lattice summation and
/// the operator is a circulant, so the direct windowed-dot apply and the FFT
/// apply realize the same linear map.
class RieszOperator {
  public:
    RieszOperator(const GridSpec& grid, RieszParams params, RieszOptions opts = {});
    ~RieszOperator();
    RieszOperator(const RieszOperator&) = delete;
    RieszOperator& operator=(const RieszOperator&) = delete;

    const GridSpec& grid() const { return grid_; }
    const RieszParams& params() const { return params_; }

    /// K_alpha * f by direct summation (SIMD windowed dots).
    ScalarField conv_direct(const ScalarField& f) const;
    /// Same operator applied as a circulant via FFT; periodic grids only.
    ScalarField conv_fft(const ScalarField& f) const;
    /// Route automatically: FFT on periodic grids, direct otherwise.
    ScalarField conv(const ScalarField& f) const;

    /// grad K_alpha * f; requires 1 < alpha < d (2D in this artifact).
    VectorField conv_grad_direct(const ScalarField& f) const;
    VectorField conv_grad_fft(const ScalarField& f) const;
    VectorField conv_grad(const ScalarField& f) const;

    /// Fractional integral I_alpha f: the same quadrature without the
    /// 1/(d-alpha) prefactor. conv(f) == frac_integral(f) / (d-alpha) holds
    /// bit-exactly because conv is implemented as exactly that division.
    ScalarField frac_integral_direct(const ScalarField& f) const;
    ScalarField frac_integral(const ScalarField& f) const;

    /// sigma/2 * integral of f (K_alpha * f).
    double interaction_energy(const ScalarField& f, double sigma) const;

    /// Discrete kernel weight W_ij (prefactor included), for tests.
    double weight(int cell_i, int cell_j) const;
    /// Raw offset table entry (no prefactor), offset in cell index space.
    double raw_table(std::array<int, 2> offset) const;

  private:
    struct Fft;
    ScalarField apply_raw_direct(const ScalarField& f) const;
    ScalarField apply_raw_fft(const ScalarField& f) const;

    GridSpec grid_;
    RieszParams params_;
    RieszOptions opts_;
    bool periodic_ = true;

    // raw scalar table: periodic -> offsets [0,N0)x[0,N1); bounded 1D -> 2N-1 offsets
    std::vector<double> table_;
    // extended (reversed) windows for the direct apply
    std::vector<double> ext_;           // 1D: 2N-1; 2D: N0 rows of 2*N1-1
    // gradient tables and their extensions (2D periodic, 1<alpha<d)
    bool has_grad_ = false;
    std::array<std::vector<double>, 2> gtable_;
    std::array<std::vector<double>, 2> gext_;

    std::unique_ptr<Fft> fft_;
};

/// Fractional integral I_beta f for an arbitrary admissible order.
ScalarField frac_integral(const ScalarField& f, double beta, RieszOptions opts = {});

}  // namespace erl
