#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dfs/constants.hpp"

// Seeded samplers. Every stochastic routine takes an explicit RNG so that
// trajectory i depends only on (master seed, i) and runs are reproducible
// under any parallel schedule.

namespace dfs {

using Rng = std::mt19937_64;

uint64_t splitmix64(uint64_t x);

// Independent stream for trajectory `index`; `stream` separates the
// consumers inside one trajectory (hops, field noise, pulse errors, ...).
Rng make_rng(uint64_t master_seed, uint64_t index, uint64_t stream = 0);

// Ascending event times of a homogeneous Poisson process on [0, horizon].
std::vector<double> sample_hop_times(const HoppingProcess& process, double horizon,
                                     Rng& rng);

// Stationary Ornstein-Uhlenbeck sampler for the common-mode field offset,
// gauss. Gaussian marginal N(0, sigma^2), autocorrelation exp(-dt/tau_c).
class OuSampler {
  public:
    OuSampler(double sigma, double tau_c, Rng& rng);

    // Advances by dt >= 0 and returns the new value.
    double step(double dt);
    double value() const { return value_; }

  private:
    double sigma_;
    double tau_c_;
    double value_;
    Rng* rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// OU samples at the given ascending times (empty input allowed).
std::vector<double> sample_common_field(const MagneticEnvironment& env,
                                        const std::vector<double>& times, Rng& rng);

}  // namespace dfs
