#include "erl/riesz.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "erl/common.hpp"
#include "erl/kernels.hpp"

namespace erl {

namespace {

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, dp = 0.0;
        for (int it = 0; it < 64; ++it) {
            p0 = 1.0;
            double p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
            }
            dp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = -p0 / dp;
            t += dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
}

const std::vector<double>& gl_nodes(int n) {
    static std::vector<double> x8, w8, x64, w64;
    static std::once_flag once;
    std::call_once(once, [] {
        gauss_legendre(8, x8, w8);
        gauss_legendre(64, x64, w64);
    });
    return n == 8 ? x8 : x64;
}
const std::vector<double>& gl_weights(int n) {
    static std::vector<double> x8, w8, x64, w64;
    static std::once_flag once;
    std::call_once(once, [] {
        gauss_legendre(8, x8, w8);
        gauss_legendre(64, x64, w64);
    });
    return n == 8 ? w8 : w64;
}

// ---- per-offset quadrature weights (no 1/(d-alpha) prefactor) --------------

// 1D cell average of |s|^(alpha-1) via the exact antiderivative sign(s)|s|^a/a.
double cell_avg_1d(double delta, double h, double alpha) {
    auto F = [alpha](double s) { return std::copysign(std::pow(std::abs(s), alpha) / alpha, s); };
    return (F(delta + 0.5 * h) - F(delta - 0.5 * h)) / h;
}

// Self-cell average of |z|^(alpha-2) over the rectangle, by polar integration.
double self_avg_2d(double h0, double h1, double alpha) {
    const double a = 0.5 * h0, b = 0.5 * h1;
    const double th0 = std::atan2(b, a);
    const auto& gx = gl_nodes(64);
    const auto& gw = gl_weights(64);
    double s = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) {
        const double t1 = 0.5 * th0 * (gx[q] + 1.0);
        s += 0.5 * th0 * gw[q] * std::pow(a / std::cos(t1), alpha);
        const double span = 0.5 * std::numbers::pi - th0;
        const double t2 = th0 + 0.5 * span * (gx[q] + 1.0);
        s += 0.5 * span * gw[q] * std::pow(b / std::sin(t2), alpha);
    }
    return 4.0 * s / alpha / (h0 * h1);
}

// Near-cell average of |d - z|^(alpha-2) over the cell, subdivided Gauss panels.
double cell_avg_2d(std::array<double, 2> d, double h0, double h1, double alpha) {
    constexpr int panels = 8;
    const auto& gx = gl_nodes(8);
    const auto& gw = gl_weights(8);
    const double e = alpha - 2.0;
    const double p0w = h0 / panels, p1w = h1 / panels;
    double s = 0.0;
    for (int p0 = 0; p0 < panels; ++p0)
        for (int p1 = 0; p1 < panels; ++p1) {
            const double c0 = -0.5 * h0 + (p0 + 0.5) * p0w;
            const double c1 = -0.5 * h1 + (p1 + 0.5) * p1w;
            for (std::size_t qa = 0; qa < gx.size(); ++qa)
                for (std::size_t qb = 0; qb < gx.size(); ++qb) {
                    const double z0 = c0 + 0.5 * p0w * gx[qa];
                    const double z1 = c1 + 0.5 * p1w * gx[qb];
                    const double r2 = (d[0] - z0) * (d[0] - z0) + (d[1] - z1) * (d[1] - z1);
                    s += gw[qa] * gw[qb] * std::pow(r2, 0.5 * e);
                }
        }
    return s * 0.25 * p0w * p1w / (h0 * h1);
}

// Near-cell average of -(d - z)|d - z|^(alpha-4): the gradient-kernel analog.
std::array<double, 2> cell_avg_grad_2d(std::array<double, 2> d, double h0, double h1,
                                       double alpha) {
    constexpr int panels = 8;
    const auto& gx = gl_nodes(8);
    const auto& gw = gl_weights(8);
    const double e = alpha - 4.0;
    const double p0w = h0 / panels, p1w = h1 / panels;
    double s0 = 0.0, s1 = 0.0;
    for (int p0 = 0; p0 < panels; ++p0)
        for (int p1 = 0; p1 < panels; ++p1) {
            const double c0 = -0.5 * h0 + (p0 + 0.5) * p0w;
            const double c1 = -0.5 * h1 + (p1 + 0.5) * p1w;
            for (std::size_t qa = 0; qa < gx.size(); ++qa)
                for (std::size_t qb = 0; qb < gx.size(); ++qb) {
                    const double w0 = d[0] - (c0 + 0.5 * p0w * gx[qa]);
                    const double w1 = d[1] - (c1 + 0.5 * p1w * gx[qb]);
                    const double rp = std::pow(w0 * w0 + w1 * w1, 0.5 * e);
                    s0 -= gw[qa] * gw[qb] * w0 * rp;
                    s1 -= gw[qa] * gw[qb] * w1 * rp;
                }
        }
    const double norm = 0.25 * p0w * p1w / (h0 * h1);
    return {s0 * norm, s1 * norm};
}

inline int wrap(int k, int n) {
    k %= n;
    return k < 0 ? k + n : k;
}

}  // namespace

RieszParams RieszParams::make(double alpha, int dim) {
    require(dim == 1 || dim == 2, "riesz: dimension must be 1 or 2");
    require(alpha > 0.0 && alpha < dim, "riesz: need 0 < alpha < d");
    return RieszParams{alpha, dim};
}

double riesz_kernel(std::array<double, 2> x, const RieszParams& p) {
    const double r = p.dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    require(r > 0.0, "riesz_kernel: singular at x = 0");
    return p.prefactor() * std::pow(r, p.alpha - p.dim);
}

std::array<double, 2> riesz_kernel_grad(std::array<double, 2> x, const RieszParams& p) {
    const double r = p.dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    require(r > 0.0, "riesz_kernel_grad: singular at x = 0");
    const double s = std::pow(r, p.alpha - p.dim - 2.0);
    return {-x[0] * s, p.dim == 2 ? -x[1] * s : 0.0};
}

// ---- FFT machinery ----------------------------------------------------------

struct RieszOperator::Fft {
    int cells = 0;
    int nc = 0;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::vector<std::complex<double>> table_hat;
    std::array<std::vector<std::complex<double>>, 2> grad_hat;

    ~Fft() {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }

    void plan(const GridSpec& g) {
        cells = g.cells();
        nc = g.dim == 1 ? g.n[0] / 2 + 1 : g.n[0] * (g.n[1] / 2 + 1);
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        double* rbuf = fftw_alloc_real(static_cast<std::size_t>(cells));
        fftw_complex* cbuf = fftw_alloc_complex(static_cast<std::size_t>(nc));
        if (g.dim == 1) {
            fwd = fftw_plan_dft_r2c_1d(g.n[0], rbuf, cbuf, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_1d(g.n[0], cbuf, rbuf, FFTW_ESTIMATE);
        } else {
            fwd = fftw_plan_dft_r2c_2d(g.n[0], g.n[1], rbuf, cbuf, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_2d(g.n[0], g.n[1], cbuf, rbuf, FFTW_ESTIMATE);
        }
        fftw_free(rbuf);
        fftw_free(cbuf);
    }

    std::vector<std::complex<double>> forward(std::span<const double> v) const {
        double* in = fftw_alloc_real(static_cast<std::size_t>(cells));
        fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(nc));
        for (int i = 0; i < cells; ++i) in[i] = v[static_cast<std::size_t>(i)];
        fftw_execute_dft_r2c(fwd, in, out);
        std::vector<std::complex<double>> hat(static_cast<std::size_t>(nc));
        for (int i = 0; i < nc; ++i) hat[static_cast<std::size_t>(i)] = {out[i][0], out[i][1]};
        fftw_free(in);
        fftw_free(out);
        return hat;
    }

    void backward_scaled(const std::vector<std::complex<double>>& hat, double scale,
                         std::span<double> result) const {
        fftw_complex* in = fftw_alloc_complex(static_cast<std::size_t>(nc));
        double* out = fftw_alloc_real(static_cast<std::size_t>(cells));
        for (int i = 0; i < nc; ++i) {
            in[i][0] = hat[static_cast<std::size_t>(i)].real();
            in[i][1] = hat[static_cast<std::size_t>(i)].imag();
        }
        fftw_execute_dft_c2r(bwd, in, out);
        for (int i = 0; i < cells; ++i) result[static_cast<std::size_t>(i)] = out[i] * scale;
        fftw_free(in);
        fftw_free(out);
    }
};

// ---- operator construction ----------------------------------------------------

RieszOperator::RieszOperator(const GridSpec& grid, RieszParams params, RieszOptions opts)
    : grid_(grid), params_(params), opts_(opts) {
    require(params_.dim == grid_.dim, "riesz: parameter dimension does not match grid");
    periodic_ = grid_.boundary == Boundary::periodic;
    const double near_r = opts_.near_radius_rel * grid_.min_extent();
    const double alpha = params_.alpha;

    if (grid_.dim == 1) {
        const int n = grid_.n[0];
        const double h = grid_.h[0];
        const double L = grid_.extent(0);
        if (periodic_) {
            table_.assign(static_cast<std::size_t>(n), 0.0);
            for (int k = 0; k < n; ++k) {
                // signed minimal-image representative, so k and n-k see
                // mirrored truncated image sets and W stays symmetric
                const int ks = (2 * k > n) ? k - n : k;
                double s = 0.0;
                for (int m = -opts_.image_radius; m <= opts_.image_radius; ++m) {
                    const double d = ks * h + m * L;
                    if (std::abs(d) <= near_r)
                        s += cell_avg_1d(d, h, alpha);
                    else
                        s += std::pow(std::abs(d), alpha - 1.0);
                }
                table_[static_cast<std::size_t>(k)] = s;
            }
            for (int k = 1; 2 * k < n; ++k)
                table_[static_cast<std::size_t>(n - k)] = table_[static_cast<std::size_t>(k)];
            ext_.assign(static_cast<std::size_t>(2 * n - 1), 0.0);
            for (int m = 0; m < 2 * n - 1; ++m)
                ext_[static_cast<std::size_t>(m)] = table_[static_cast<std::size_t>(wrap(n - 1 - m, n))];
        } else {
            table_.assign(static_cast<std::size_t>(2 * n - 1), 0.0);
            for (int k = -(n - 1); k <= n - 1; ++k) {
                const double d = k * h;
                table_[static_cast<std::size_t>(k + n - 1)] =
                    std::abs(d) <= near_r ? cell_avg_1d(d, h, alpha)
                                          : std::pow(std::abs(d), alpha - 1.0);
            }
            ext_.assign(static_cast<std::size_t>(2 * n - 1), 0.0);
            for (int m = 0; m < 2 * n - 1; ++m)
                ext_[static_cast<std::size_t>(m)] = table_[static_cast<std::size_t>(2 * n - 2 - m)];
        }
    } else {
        const int n0 = grid_.n[0], n1 = grid_.n[1];
        const double h0 = grid_.h[0], h1 = grid_.h[1];
        const double L0 = grid_.extent(0), L1 = grid_.extent(1);
        table_.assign(static_cast<std::size_t>(n0 * n1), 0.0);
        has_grad_ = params_.gradient_admissible();
        if (has_grad_) {
            gtable_[0].assign(table_.size(), 0.0);
            gtable_[1].assign(table_.size(), 0.0);
        }
        for (int k0 = 0; k0 < n0; ++k0)
            for (int k1 = 0; k1 < n1; ++k1) {
                // signed minimal-image representatives (see the 1D note)
                const int k0s = (2 * k0 > n0) ? k0 - n0 : k0;
                const int k1s = (2 * k1 > n1) ? k1 - n1 : k1;
                double s = 0.0, g0 = 0.0, g1 = 0.0;
                for (int m0 = -opts_.image_radius; m0 <= opts_.image_radius; ++m0)
                    for (int m1 = -opts_.image_radius; m1 <= opts_.image_radius; ++m1) {
                        const std::array<double, 2> d{k0s * h0 + m0 * L0, k1s * h1 + m1 * L1};
                        const double r = std::hypot(d[0], d[1]);
                        if (r == 0.0) {
                            s += self_avg_2d(h0, h1, alpha);
                            // gradient self-term vanishes by cell symmetry
                        } else if (r <= near_r) {
                            s += cell_avg_2d(d, h0, h1, alpha);
                            if (has_grad_) {
                                const auto gv = cell_avg_grad_2d(d, h0, h1, alpha);
                                g0 += gv[0];
                                g1 += gv[1];
                            }
                        } else {
                            s += std::pow(r, alpha - 2.0);
                            if (has_grad_) {
                                const double rp = std::pow(r, alpha - 4.0);
                                g0 -= d[0] * rp;
                                g1 -= d[1] * rp;
                            }
                        }
                    }
                const std::size_t idx = static_cast<std::size_t>(k0 * n1 + k1);
                table_[idx] = s;
                if (has_grad_) {
                    gtable_[0][idx] = g0;
                    gtable_[1][idx] = g1;
                }
            }
        // enforce the reflection symmetries bit-exactly: W(-d) = W(d) and
        // grad tables odd, with self-paired offsets zeroed
        for (int k0 = 0; k0 < n0; ++k0)
            for (int k1 = 0; k1 < n1; ++k1) {
                const int r0 = (n0 - k0) % n0, r1 = (n1 - k1) % n1;
                const std::size_t idx = static_cast<std::size_t>(k0 * n1 + k1);
                const std::size_t ridx = static_cast<std::size_t>(r0 * n1 + r1);
                if (idx < ridx) {
                    table_[ridx] = table_[idx];
                    if (has_grad_) {
                        gtable_[0][ridx] = -gtable_[0][idx];
                        gtable_[1][ridx] = -gtable_[1][idx];
                    }
                } else if (idx == ridx && has_grad_) {
                    gtable_[0][idx] = 0.0;
                    gtable_[1][idx] = 0.0;
                }
            }
        const int ew = 2 * n1 - 1;
        ext_.assign(static_cast<std::size_t>(n0 * ew), 0.0);
        for (int r = 0; r < n0; ++r)
            for (int m = 0; m < ew; ++m)
                ext_[static_cast<std::size_t>(r * ew + m)] =
                    table_[static_cast<std::size_t>(r * n1 + wrap(n1 - 1 - m, n1))];
        if (has_grad_) {
            for (int c = 0; c < 2; ++c) {
                gext_[c].assign(static_cast<std::size_t>(n0 * ew), 0.0);
                for (int r = 0; r < n0; ++r)
                    for (int m = 0; m < ew; ++m)
                        gext_[c][static_cast<std::size_t>(r * ew + m)] =
                            gtable_[c][static_cast<std::size_t>(r * n1 + wrap(n1 - 1 - m, n1))];
            }
        }
    }

    if (periodic_) {
        fft_ = std::make_unique<Fft>();
        fft_->plan(grid_);
        fft_->table_hat = fft_->forward(table_);
        if (has_grad_) {
            fft_->grad_hat[0] = fft_->forward(gtable_[0]);
            fft_->grad_hat[1] = fft_->forward(gtable_[1]);
        }
    }
}

RieszOperator::~RieszOperator() = default;

// ---- applies ------------------------------------------------------------------

ScalarField RieszOperator::apply_raw_direct(const ScalarField& f) const {
    require(f.grid() == grid_, "riesz: field grid mismatch");
    require(all_finite(f.data()), "riesz: field has non-finite values");
    const auto& k = kern::active();
    ScalarField out(grid_);
    const double meas = grid_.cell_measure();
    if (grid_.dim == 1) {
        const int n = grid_.n[0];
        for (int i = 0; i < n; ++i)
            out[i] = k.dot(f.raw(), ext_.data() + (n - 1 - i), static_cast<std::size_t>(n)) * meas;
        return out;
    }
    const int n0 = grid_.n[0], n1 = grid_.n[1];
    const int ew = 2 * n1 - 1;
    for (int i0 = 0; i0 < n0; ++i0) {
        double* orow = out.raw() + i0 * n1;
        for (int j0 = 0; j0 < n0; ++j0) {
            const double* frow = f.raw() + j0 * n1;
            const double* erow = ext_.data() + wrap(i0 - j0, n0) * ew;
            for (int i1 = 0; i1 < n1; ++i1)
                orow[i1] += k.dot(frow, erow + (n1 - 1 - i1), static_cast<std::size_t>(n1));
        }
    }
    for (int i = 0; i < out.size(); ++i) out[i] *= meas;
    return out;
}

ScalarField RieszOperator::apply_raw_fft(const ScalarField& f) const {
    require(periodic_, "riesz: FFT path requires a periodic grid");
    require(f.grid() == grid_, "riesz: field grid mismatch");
    require(all_finite(f.data()), "riesz: field has non-finite values");
    auto hat = fft_->forward(f.data());
    for (int i = 0; i < fft_->nc; ++i) hat[static_cast<std::size_t>(i)] *= fft_->table_hat[static_cast<std::size_t>(i)];
    ScalarField out(grid_);
    fft_->backward_scaled(hat, grid_.cell_measure() / grid_.cells(), out.data());
    return out;
}

ScalarField RieszOperator::frac_integral_direct(const ScalarField& f) const {
    return apply_raw_direct(f);
}

ScalarField RieszOperator::frac_integral(const ScalarField& f) const {
    return periodic_ ? apply_raw_fft(f) : apply_raw_direct(f);
}

ScalarField RieszOperator::conv_direct(const ScalarField& f) const {
    ScalarField out = apply_raw_direct(f);
    const double c = params_.dim - params_.alpha;
    for (int i = 0; i < out.size(); ++i) out[i] /= c;
    return out;
}

ScalarField RieszOperator::conv_fft(const ScalarField& f) const {
    ScalarField out = apply_raw_fft(f);
    const double c = params_.dim - params_.alpha;
    for (int i = 0; i < out.size(); ++i) out[i] /= c;
    return out;
}

ScalarField RieszOperator::conv(const ScalarField& f) const {
    return periodic_ ? conv_fft(f) : conv_direct(f);
}

VectorField RieszOperator::conv_grad_direct(const ScalarField& f) const {
    require(has_grad_, "riesz: gradient convolution requires 1 < alpha < d on a periodic 2D grid");
    require(f.grid() == grid_, "riesz: field grid mismatch");
    const auto& k = kern::active();
    VectorField out(grid_);
    const int n0 = grid_.n[0], n1 = grid_.n[1];
    const int ew = 2 * n1 - 1;
    const double meas = grid_.cell_measure();
    for (int i0 = 0; i0 < n0; ++i0) {
        double* ox = out.comp(0).raw() + i0 * n1;
        double* oy = out.comp(1).raw() + i0 * n1;
        for (int j0 = 0; j0 < n0; ++j0) {
            const double* frow = f.raw() + j0 * n1;
            const std::size_t base = static_cast<std::size_t>(wrap(i0 - j0, n0) * ew);
            const double* ex = gext_[0].data() + base;
            const double* ey = gext_[1].data() + base;
            for (int i1 = 0; i1 < n1; ++i1) {
                double sx = 0.0, sy = 0.0;
                k.dot2(frow, ex + (n1 - 1 - i1), ey + (n1 - 1 - i1), static_cast<std::size_t>(n1),
                       &sx, &sy);
                ox[i1] += sx;
                oy[i1] += sy;
            }
        }
    }
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < grid_.cells(); ++i) out.comp(c)[i] *= meas;
    return out;
}

VectorField RieszOperator::conv_grad_fft(const ScalarField& f) const {
    require(has_grad_, "riesz: gradient convolution requires 1 < alpha < d on a periodic 2D grid");
    require(periodic_, "riesz: FFT path requires a periodic grid");
    require(f.grid() == grid_, "riesz: field grid mismatch");
    auto fhat = fft_->forward(f.data());
    VectorField out(grid_);
    const double scale = grid_.cell_measure() / grid_.cells();
    for (int c = 0; c < 2; ++c) {
        std::vector<std::complex<double>> prod(fhat.size());
        for (std::size_t i = 0; i < fhat.size(); ++i) prod[i] = fhat[i] * fft_->grad_hat[c][i];
        fft_->backward_scaled(prod, scale, out.comp(c).data());
    }
    return out;
}

VectorField RieszOperator::conv_grad(const ScalarField& f) const {
    return periodic_ ? conv_grad_fft(f) : conv_grad_direct(f);
}

double RieszOperator::interaction_energy(const ScalarField& f, double sigma) const {
    return 0.5 * sigma * integrate(multiply(f, conv(f)));
}

double RieszOperator::weight(int cell_i, int cell_j) const {
    std::array<int, 2> off{0, 0};
    if (grid_.dim == 1) {
        off[0] = cell_i - cell_j;
    } else {
        off[0] = cell_i / grid_.n[1] - cell_j / grid_.n[1];
        off[1] = cell_i % grid_.n[1] - cell_j % grid_.n[1];
    }
    return raw_table(off) * params_.prefactor();
}

double RieszOperator::raw_table(std::array<int, 2> offset) const {
    if (grid_.dim == 1) {
        if (periodic_) return table_[static_cast<std::size_t>(wrap(offset[0], grid_.n[0]))];
        return table_[static_cast<std::size_t>(offset[0] + grid_.n[0] - 1)];
    }
    return table_[static_cast<std::size_t>(wrap(offset[0], grid_.n[0]) * grid_.n[1] +
                                           wrap(offset[1], grid_.n[1]))];
}

ScalarField frac_integral(const ScalarField& f, double beta, RieszOptions opts) {
    RieszOperator op(f.grid(), RieszParams::make(beta, f.grid().dim), opts);
    return op.frac_integral(f);
}

}  // namespace erl
