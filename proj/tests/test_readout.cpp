#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dfs/readout.hpp"

using namespace dfs;

namespace {
const ConfusionMatrix kIdentity{0.0, 0.0};

std::array<double, 4> apply_confusion(const std::array<double, 4>& p,
                                      const ConfusionMatrix& m1,
                                      const ConfusionMatrix& m2) {
    const auto mat = [](const ConfusionMatrix& m) {
        return std::array<double, 4>{1.0 - m.eps01, m.eps10, m.eps01, 1.0 - m.eps10};
    };
    const auto a = mat(m1), b = mat(m2);
    std::array<double, 4> out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    out[static_cast<size_t>(2 * i + j)] +=
                        a[static_cast<size_t>(2 * i + k)] *
                        b[static_cast<size_t>(2 * j + l)] *
                        p[static_cast<size_t>(2 * k + l)];
    return out;
}
}  // namespace

TEST_CASE("sample_readout: identity channel reproduces the Born frequencies") {
    const std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};
    Rng rng = make_rng(21, 0);
    const auto records = sample_readout(p, kIdentity, kIdentity, {}, 0.0, 100000, rng);
    const auto freq = observed_frequencies(records);
    for (int k = 0; k < 4; ++k) {
        const double se = std::sqrt(p[k] * (1.0 - p[k]) / 100000.0);
        CHECK(std::abs(freq[k] - p[k]) < 4.0 * se);
    }
}

TEST_CASE("sample_readout: double flip probability on a pure state") {
    const std::array<double, 4> p{1.0, 0.0, 0.0, 0.0};
    const ConfusionMatrix m{0.01, 0.01};
    Rng rng = make_rng(22, 0);
    const long n = 200000;
    const auto records = sample_readout(p, m, m, {}, 0.0, n, rng);
    long bright_bright = 0;
    for (const auto& rec : records)
        if (rec.yb1_bright && rec.yb2_bright) ++bright_bright;
    const double rate = static_cast<double>(bright_bright) / n;
    CHECK(std::abs(rate - 1e-4) < 4.0 * std::sqrt(1e-4 / n));
}

TEST_CASE("sample_readout: misordered fraction draws low coolant counts") {
    const std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};
    BaCountModel ba;
    Rng rng = make_rng(23, 0);
    const long n = 50000;
    const auto records = sample_readout(p, kIdentity, kIdentity, ba, 0.1, n, rng);
    long low = 0;
    for (const auto& rec : records)
        if (rec.ba_count < 10) ++low;
    const double frac = static_cast<double>(low) / n;
    CHECK(frac == doctest::Approx(0.1).epsilon(0.1));
    CHECK_THROWS_AS(sample_readout({0.5, 0.0, 0.0, 0.0}, kIdentity, kIdentity, ba,
                                   0.0, 10, rng),
                    std::invalid_argument);
}

TEST_CASE("post_select keeps only high counts") {
    SUBCASE("threshold zero keeps everything") {
        std::vector<ShotRecord> records{{0, 0, 0}, {1, 1, 5}};
        const auto [kept, fraction] = post_select(records, 0);
        CHECK(kept.size() == 2);
        CHECK(fraction == 0.0);
    }
    SUBCASE("discard fraction matches the misorder probability") {
        const std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};
        BaCountModel ba;  // means 30 and 1; Poisson tails across 10 are < 1e-3
        Rng rng = make_rng(24, 0);
        const long n = 100000;
        const double p_mis = 0.07;
        const auto records = sample_readout(p, kIdentity, kIdentity, ba, p_mis, n, rng);
        const auto [kept, fraction] = post_select(records, 10);
        for (const auto& rec : kept) CHECK(rec.ba_count >= 10);
        CHECK(std::abs(fraction - p_mis) <
              4.0 * std::sqrt(p_mis * (1.0 - p_mis) / n) + 1e-3);
    }
    SUBCASE("empty input") {
        const auto [kept, fraction] = post_select({}, 5);
        CHECK(kept.empty());
        CHECK(fraction == 0.0);
    }
}

TEST_CASE("mitigation inverts the confusion channel") {
    SUBCASE("identity confusion is a no-op") {
        const std::array<double, 4> p{0.4, 0.1, 0.2, 0.3};
        const auto out = mitigate_readout(p, kIdentity, kIdentity);
        CHECK_FALSE(out.clipped);
        for (int k = 0; k < 4; ++k)
            CHECK(out.probabilities[k] == doctest::Approx(p[k]).epsilon(1e-14));
    }
    SUBCASE("round trip on random probability vectors") {
        Rng rng = make_rng(25, 0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const ConfusionMatrix m1{0.013, 0.021}, m2{0.008, 0.017};
        for (int trial = 0; trial < 200; ++trial) {
            std::array<double, 4> p{};
            double total = 0.0;
            for (double& x : p) total += (x = uniform(rng));
            for (double& x : p) x /= total;
            const auto corrupted = apply_confusion(p, m1, m2);
            const auto out = mitigate_readout(corrupted, m1, m2);
            CHECK_FALSE(out.clipped);
            for (int k = 0; k < 4; ++k)
                CHECK(std::abs(out.probabilities[k] - p[k]) < 1e-12);
        }
    }
    SUBCASE("frequencies outside the channel image get clipped and flagged") {
        const ConfusionMatrix m{0.02, 0.02};
        const std::array<double, 4> observed{1.0, 0.0, 0.0, 0.0};
        const auto out = mitigate_readout(observed, m, m);
        CHECK(out.clipped);
        double total = 0.0;
        for (double x : out.probabilities) {
            CHECK(x >= 0.0);
            total += x;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("out-of-range channel rejected") {
        CHECK_THROWS_AS(mitigate_readout({1, 0, 0, 0}, ConfusionMatrix{0.5, 0.5},
                                         ConfusionMatrix{0.5, 0.5}),
                        std::invalid_argument);
    }
}

TEST_CASE("parity estimate") {
    SUBCASE("all even") {
        std::vector<ShotRecord> records(10, ShotRecord{0, 0, 30});
        const auto [p, se] = parity_estimate(records);
        CHECK(p == doctest::Approx(1.0));
        CHECK(se == doctest::Approx(0.0));
    }
    SUBCASE("all odd") {
        std::vector<ShotRecord> records;
        for (int i = 0; i < 10; ++i) records.push_back({0, 1, 30});
        for (int i = 0; i < 10; ++i) records.push_back({1, 0, 30});
        const auto [p, se] = parity_estimate(records);
        CHECK(p == doctest::Approx(-1.0));
        CHECK(se == doctest::Approx(0.0));
    }
    SUBCASE("binomial standard error at p_even = 0.75") {
        Rng rng = make_rng(26, 0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::vector<ShotRecord> records;
        const long n = 10000;
        for (long i = 0; i < n; ++i) {
            const bool even = uniform(rng) < 0.75;
            records.push_back({0, static_cast<uint8_t>(even ? 0 : 1), 30});
        }
        const auto [p, se] = parity_estimate(records);
        CHECK(p == doctest::Approx(0.5).epsilon(0.05));
        CHECK(se == doctest::Approx(0.0087).epsilon(0.05));
    }
    SUBCASE("empty input throws") {
        CHECK_THROWS_AS(parity_estimate({}), std::invalid_argument);
    }
}

TEST_CASE("parity SE shrinks as 1/sqrt(n)") {
    Rng rng = make_rng(27, 0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const auto sample_se = [&](long n) {
        std::vector<ShotRecord> records;
        for (long i = 0; i < n; ++i)
            records.push_back({0, static_cast<uint8_t>(uniform(rng) < 0.6 ? 0 : 1), 30});
        return parity_estimate(records).second;
    };
    const double ratio = sample_se(100) / sample_se(10000);
    CHECK(ratio == doctest::Approx(10.0).epsilon(0.2));
}
