#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "dfs/stochastic.hpp"

// Measurement pipeline: shot synthesis with readout errors, coolant-count
// post-selection, confusion-matrix mitigation, and parity estimation.

namespace dfs {

struct ShotRecord {
    uint8_t yb1_bright = 0;  // 1 = read bright (|1>)
    uint8_t yb2_bright = 0;
    int ba_count = 0;        // coolant-ion photon count
};

struct ConfusionMatrix {
    double eps01 = 0.01;  // P(read bright | dark)
    double eps10 = 0.01;  // P(read dark | bright)

    void validate() const;
};

struct BaCountModel {
    double mean_in_order = 30.0;   // Poisson mean with the crystal in order
    double mean_misordered = 1.0;  // Poisson mean for misordered/lost crystal
};

// Synthesizes n raw shots from 4-state probabilities {p00, p01, p10, p11}.
// A fraction p_misorder of shots draws the coolant count from the low-mean
// distribution; all shots pass through the per-ion confusion channels.
std::vector<ShotRecord> sample_readout(const std::array<double, 4>& probabilities,
                                       const ConfusionMatrix& ion1,
                                       const ConfusionMatrix& ion2,
                                       const BaCountModel& ba_model, double p_misorder,
                                       int n, Rng& rng);

// Keeps records with ba_count >= threshold; returns kept records and the
// discarded fraction.
std::pair<std::vector<ShotRecord>, double> post_select(
    const std::vector<ShotRecord>& records, int ba_threshold);

struct MitigatedProbabilities {
    std::array<double, 4> probabilities;
    bool clipped = false;  // negative entries were clipped and renormalized
};

// Inverts M1 (x) M2 with M_i = [[1-eps01, eps10], [eps01, 1-eps10]] acting on
// observed 4-state frequencies. Throws on a singular confusion matrix.
MitigatedProbabilities mitigate_readout(const std::array<double, 4>& observed,
                                        const ConfusionMatrix& ion1,
                                        const ConfusionMatrix& ion2);

// Observed 4-state frequencies {00, 01, 10, 11} of a record batch.
std::array<double, 4> observed_frequencies(const std::vector<ShotRecord>& records);

// Parity mean of (+-1) products and its standard error. Throws on empty input.
std::pair<double, double> parity_estimate(const std::vector<ShotRecord>& records);

// Parity of a 4-state probability vector.
double parity_of_probabilities(const std::array<double, 4>& p);

}  // namespace dfs
