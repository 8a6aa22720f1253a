#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "erl/kernels.hpp"

using namespace erl;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar and avx2 dot lanes agree") {
    std::mt19937_64 rng(1234);
    const auto& sk = kern::scalar_kernels();
    if (!kern::avx2_supported()) {
        MESSAGE("avx2 not supported on this host; lane equivalence skipped");
        return;
    }
    const auto& vk = kern::avx2_kernels();
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{7},
                          std::size_t{16}, std::size_t{33}, std::size_t{67}, std::size_t{256},
                          std::size_t{4096}}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        auto c = random_vec(rng, n);
        const double ds = sk.dot(a.data(), b.data(), n);
        const double dv = vk.dot(a.data(), b.data(), n);
        const double scale = std::max(1.0, std::abs(ds));
        CHECK(std::abs(ds - dv) <= 1e-13 * scale * std::sqrt(static_cast<double>(n)));

        double sx = 0, sy = 0, vx = 0, vy = 0;
        sk.dot2(a.data(), b.data(), c.data(), n, &sx, &sy);
        vk.dot2(a.data(), b.data(), c.data(), n, &vx, &vy);
        CHECK(std::abs(sx - vx) <= 1e-13 * std::max(1.0, std::abs(sx)) * std::sqrt(static_cast<double>(n)));
        CHECK(std::abs(sy - vy) <= 1e-13 * std::max(1.0, std::abs(sy)) * std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("dot handles offsets into shifted windows") {
    // mimics the stencil apply: b points into the middle of a larger buffer
    std::mt19937_64 rng(99);
    auto buf = random_vec(rng, 255);
    auto f = random_vec(rng, 128);
    const auto& k = kern::active();
    for (int shift : {0, 1, 17, 127}) {
        double ref = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) ref += f[i] * buf[static_cast<std::size_t>(shift) + i];
        const double got = k.dot(f.data(), buf.data() + shift, f.size());
        CHECK(got == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("active lane is deterministic within a process") {
    const auto lane = kern::active_lane();
    CHECK(kern::active_lane() == lane);
    CHECK((kern::lane_name(lane) == "scalar" || kern::lane_name(lane) == "avx2"));
}
