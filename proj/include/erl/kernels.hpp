#pragma once

#include <cstddef>
#include <string>

namespace erl::kern {

/// Hot inner loops of the direct nonlocal-convolution paths: dense dot
/// products against shifted stencil windows. Each function has a scalar
/// reference implementation and an AVX2 variant; the active set is chosen
/// once at startup (cpuid, overridable with ERL_SIMD=scalar|avx2|auto) and
/// stays fixed for the whole process so results are reproducible run-to-run.
struct Kernels {
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // two dots sharing the a-vector: sx = a.bx, sy = a.by
    void (*dot2)(const double* a, const double* bx, const double* by, std::size_t n,
                 double* sx, double* sy);
};

enum class Lane { scalar, avx2 };

const Kernels& active();
Lane active_lane();
std::string lane_name(Lane lane);

bool avx2_supported();
const Kernels& scalar_kernels();
/// Only callable when avx2_supported(); the TU is compiled with -mavx2 -mfma.
const Kernels& avx2_kernels();

}  // namespace erl::kern
