#include "dfs/readout.hpp"

#include <cmath>
#include <stdexcept>

namespace dfs {

void ConfusionMatrix::validate() const {
    if (eps01 < 0 || eps01 >= 0.5 || eps10 < 0 || eps10 >= 0.5)
        throw std::invalid_argument("ConfusionMatrix: eps must be in [0, 0.5)");
}

std::vector<ShotRecord> sample_readout(const std::array<double, 4>& probabilities,
                                       const ConfusionMatrix& ion1,
                                       const ConfusionMatrix& ion2,
                                       const BaCountModel& ba_model, double p_misorder,
                                       int n, Rng& rng) {
    ion1.validate();
    ion2.validate();
    if (p_misorder < 0 || p_misorder > 1)
        throw std::invalid_argument("sample_readout: p_misorder must be in [0, 1]");
    double sum = 0.0;
    for (double p : probabilities) {
        if (p < -1e-9) throw std::invalid_argument("sample_readout: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("sample_readout: probabilities must sum to 1");

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::poisson_distribution<int> ba_in(ba_model.mean_in_order);
    std::poisson_distribution<int> ba_mis(ba_model.mean_misordered);

    std::vector<ShotRecord> records;
    records.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = uniform(rng);
        int outcome = 3;
        double acc = 0.0;
        for (int k = 0; k < 3; ++k) {
            acc += probabilities[static_cast<size_t>(k)];
            if (u < acc) {
                outcome = k;
                break;
            }
        }
        ShotRecord rec;
        const int b1 = (outcome >> 1) & 1;
        const int b2 = outcome & 1;
        const double flip1 = b1 ? ion1.eps10 : ion1.eps01;
        const double flip2 = b2 ? ion2.eps10 : ion2.eps01;
        rec.yb1_bright = static_cast<uint8_t>(uniform(rng) < flip1 ? 1 - b1 : b1);
        rec.yb2_bright = static_cast<uint8_t>(uniform(rng) < flip2 ? 1 - b2 : b2);
        const bool misordered = uniform(rng) < p_misorder;
        rec.ba_count = misordered ? ba_mis(rng) : ba_in(rng);
        records.push_back(rec);
    }
    return records;
}

std::pair<std::vector<ShotRecord>, double> post_select(
    const std::vector<ShotRecord>& records, int ba_threshold) {
    std::vector<ShotRecord> kept;
    kept.reserve(records.size());
    for (const ShotRecord& rec : records)
        if (rec.ba_count >= ba_threshold) kept.push_back(rec);
    const double discarded =
        records.empty() ? 0.0
                        : 1.0 - static_cast<double>(kept.size()) /
                                    static_cast<double>(records.size());
    return {std::move(kept), discarded};
}

MitigatedProbabilities mitigate_readout(const std::array<double, 4>& observed,
                                        const ConfusionMatrix& ion1,
                                        const ConfusionMatrix& ion2) {
    ion1.validate();
    ion2.validate();
    const double det1 = 1.0 - ion1.eps01 - ion1.eps10;
    const double det2 = 1.0 - ion2.eps01 - ion2.eps10;
    if (std::abs(det1) < 1e-12 || std::abs(det2) < 1e-12)
        throw std::invalid_argument("mitigate_readout: singular confusion matrix");

    // Inverse of [[1-e01, e10], [e01, 1-e10]].
    const auto inv = [](const ConfusionMatrix& m, double det) {
        return std::array<double, 4>{(1.0 - m.eps10) / det, -m.eps10 / det,
                                     -m.eps01 / det, (1.0 - m.eps01) / det};
    };
    const std::array<double, 4> m1 = inv(ion1, det1);
    const std::array<double, 4> m2 = inv(ion2, det2);

    MitigatedProbabilities out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double v = 0.0;
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    v += m1[static_cast<size_t>(2 * a + c)] *
                         m2[static_cast<size_t>(2 * b + d)] *
                         observed[static_cast<size_t>(2 * c + d)];
            out.probabilities[static_cast<size_t>(2 * a + b)] = v;
        }

    double total = 0.0;
    for (double& p : out.probabilities) {
        if (p < 0.0) {
            p = 0.0;
            out.clipped = true;
        }
        total += p;
    }
    if (out.clipped && total > 0.0)
        for (double& p : out.probabilities) p /= total;
    return out;
}

std::array<double, 4> observed_frequencies(const std::vector<ShotRecord>& records) {
    if (records.empty()) throw std::invalid_argument("observed_frequencies: empty input");
    std::array<double, 4> freq{0.0, 0.0, 0.0, 0.0};
    for (const ShotRecord& rec : records)
        freq[static_cast<size_t>(2 * rec.yb1_bright + rec.yb2_bright)] += 1.0;
    for (double& f : freq) f /= static_cast<double>(records.size());
    return freq;
}

std::pair<double, double> parity_estimate(const std::vector<ShotRecord>& records) {
    if (records.empty()) throw std::invalid_argument("parity_estimate: empty input");
    const double n = static_cast<double>(records.size());
    double sum = 0.0;
    for (const ShotRecord& rec : records)
        sum += (rec.yb1_bright == rec.yb2_bright) ? 1.0 : -1.0;
    const double mean = sum / n;
    if (records.size() == 1) return {mean, 0.0};
    // Sample variance of +-1 values: n/(n-1) * (1 - mean^2).
    const double var = (n / (n - 1.0)) * std::max(0.0, 1.0 - mean * mean);
    return {mean, std::sqrt(var / n)};
}

double parity_of_probabilities(const std::array<double, 4>& p) {
    return p[0] + p[3] - p[1] - p[2];
}

}  // namespace dfs
