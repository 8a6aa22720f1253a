#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "erl/harness.hpp"

namespace erl {

struct VerifyReport {
    std::string suite;
    bool pass = true;
    std::vector<std::string> lines;
    std::map<std::string, double> metrics;

    void check(bool ok, const std::string& what);
    void note(const std::string& what);
    void metric(const std::string& key, double value);
};

/// Exact convolution of the constant-one field on [0,1] with the 1D kernel
/// (zero extension): (x^a + (1-x)^a) / (a (1-a)).
double bounded_const_conv_oracle_1d(double x, double alpha);

/// log(err_coarse/err_fine)/log(ratio); returns a large value when the fine
/// error sits at the roundoff floor.
double observed_order(double err_coarse, double err_fine, double ratio = 2.0,
                      double floor = 1e-14);

VerifyReport verify_kernel(std::uint64_t seed);
VerifyReport verify_energy(const ExperimentConfig& cfg);
VerifyReport verify_lemmas(const ExperimentConfig& cfg, std::uint64_t seed);
VerifyReport verify_weakform(const ExperimentConfig& cfg);
VerifyReport verify_inequality(const ExperimentConfig& cfg);

}  // namespace erl
