#include "erl/kernels.hpp"

namespace erl::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void dot2_scalar(const double* a, const double* bx, const double* by, std::size_t n,
                 double* sx, double* sy) {
    double x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x += a[i] * bx[i];
        y += a[i] * by[i];
    }
    *sx = x;
    *sy = y;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{dot_scalar, dot2_scalar};
    return k;
}

}  // namespace erl::kern
