#include "dfs/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfs {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng make_rng(uint64_t master_seed, uint64_t index, uint64_t stream) {
    uint64_t s = splitmix64(master_seed ^ splitmix64(index + 1));
    s = splitmix64(s ^ splitmix64(stream + 0x51ed2701ULL));
    return Rng(s);
}

std::vector<double> sample_hop_times(const HoppingProcess& process, double horizon,
                                     Rng& rng) {
    process.validate();
    if (horizon < 0) throw std::invalid_argument("sample_hop_times: horizon must be >= 0");
    std::vector<double> times;
    if (process.rate == 0.0 || horizon == 0.0) return times;
    std::exponential_distribution<double> gap(process.rate);
    double t = gap(rng);
    while (t <= horizon) {
        times.push_back(t);
        t += gap(rng);
    }
    return times;
}

OuSampler::OuSampler(double sigma, double tau_c, Rng& rng)
    : sigma_(sigma), tau_c_(tau_c), rng_(&rng) {
    if (sigma < 0) throw std::invalid_argument("OuSampler: sigma must be >= 0");
    if (tau_c <= 0) throw std::invalid_argument("OuSampler: tau_c must be > 0");
    value_ = sigma_ * normal_(*rng_);  // draw from the stationary marginal
}

double OuSampler::step(double dt) {
    if (dt < 0) throw std::invalid_argument("OuSampler: dt must be >= 0");
    if (dt == 0.0) return value_;
    const double decay = std::exp(-dt / tau_c_);
    const double diffusion = sigma_ * std::sqrt(1.0 - decay * decay);
    value_ = value_ * decay + diffusion * normal_(*rng_);
    return value_;
}

std::vector<double> sample_common_field(const MagneticEnvironment& env,
                                        const std::vector<double>& times, Rng& rng) {
    env.validate();
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("sample_common_field: times must be ascending");
    std::vector<double> values;
    values.reserve(times.size());
    if (times.empty()) return values;
    OuSampler ou(env.common_noise_sigma, env.common_noise_tau_c, rng);
    double prev = times.front();
    values.push_back(ou.value());
    for (size_t i = 1; i < times.size(); ++i) {
        values.push_back(ou.step(times[i] - prev));
        prev = times[i];
    }
    return values;
}

}  // namespace dfs
