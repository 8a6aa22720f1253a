#include <cstdlib>
#include <cstring>

#include "erl/kernels.hpp"

namespace erl::kern {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Lane select_lane() {
    const char* env = std::getenv("ERL_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Lane::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Lane::avx2;
        // "auto" or anything unrecognized falls through to detection
    }
    return avx2_supported() ? Lane::avx2 : Lane::scalar;
}

}  // namespace

Lane active_lane() {
    static const Lane lane = select_lane();
    return lane;
}

const Kernels& active() {
    return active_lane() == Lane::avx2 ? avx2_kernels() : scalar_kernels();
}

std::string lane_name(Lane lane) {
    return lane == Lane::avx2 ? "avx2" : "scalar";
}

}  // namespace erl::kern
