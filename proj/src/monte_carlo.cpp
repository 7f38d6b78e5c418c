#include "dfs/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace dfs {

namespace {
constexpr Complex I{0.0, 1.0};
constexpr long kChunkSize = 1024;  // fixed so results are thread-count invariant
}  // namespace

double NoiseConfig::differential_detuning_rad() const {
    double freq;
    if (t_phi_override) {
        if (*t_phi_override <= 0)
            throw std::invalid_argument("NoiseConfig: t_phi must be > 0");
        freq = 1.0 / *t_phi_override;
    } else if (qubit_kind == QubitKind::Clock) {
        freq = clock_differential(environment.b_field, environment.delta_b, constants);
    } else {
        freq = zeeman_differential(environment.delta_b, constants);
    }
    return 2.0 * pi * freq;
}

double NoiseConfig::common_slope_hz_per_gauss() const {
    if (qubit_kind == QubitKind::Clock)
        return 2.0 * constants.beta * environment.b_field;
    return constants.gamma_z;
}

void ContrastCurve::validate() const {
    if (times.size() != contrast.size() || times.size() != standard_error.size())
        throw std::runtime_error("ContrastCurve: column lengths differ");
    for (size_t i = 0; i < times.size(); ++i) {
        if (contrast[i] < -1.0 - 1e-9 || contrast[i] > 1.0 + 1e-9)
            throw std::runtime_error("ContrastCurve: contrast out of [-1, 1]");
        if (standard_error[i] < 0)
            throw std::runtime_error("ContrastCurve: negative standard error");
    }
}

TrajectoryStreams make_trajectory_streams(uint64_t master_seed, uint64_t index) {
    return TrajectoryStreams{
        make_rng(master_seed, index, 0), make_rng(master_seed, index, 1),
        make_rng(master_seed, index, 2), make_rng(master_seed, index, 3),
        make_rng(master_seed, index, 4), make_rng(master_seed, index, 5)};
}

// ---------------------------------------------------------------------------
// Exact engine

namespace {

// Multiplies the |1> level of ion i by exp(-i phi_i); same convention as
// free_evolve.
void apply_phases(TwoQubitState& state, double phi1, double phi2) {
    const Complex p1 = std::exp(-I * phi1);
    const Complex p2 = std::exp(-I * phi2);
    const Complex d[4] = {1.0, p2, p1, p1 * p2};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            state.rho(i, j) *= d[i] * std::conj(d[j]);
}

struct WaitEvent {
    double t;
    int type;  // 0 = hop, 1 = scatter ion 1, 2 = scatter ion 2
};

struct ExactRunner {
    const NoiseConfig& cfg;
    TrajectoryStreams& streams;
    double diff;        // rad/s
    int sign = +1;
    double slope_rad;   // rad/s per gauss of common field offset
    double leak_rate = 0.0;  // rad/s of residual drive
    std::optional<OuSampler> ou;
    std::normal_distribution<double> normal{0.0, 1.0};
    bool pulse_errors_on;

    ExactRunner(const NoiseConfig& config, TrajectoryStreams& str)
        : cfg(config), streams(str) {
        diff = cfg.differential_detuning_rad();
        slope_rad = 2.0 * pi * cfg.common_slope_hz_per_gauss();
        if (cfg.common_field_enabled && cfg.environment.common_noise_sigma > 0)
            ou.emplace(cfg.environment.common_noise_sigma,
                       cfg.environment.common_noise_tau_c, streams.field);
        if (cfg.leakage) {
            cfg.leakage->validate();
            leak_rate = (pi / cfg.leakage->pi_time) *
                        std::pow(10.0, -cfg.leakage->isolation_db / 20.0);
        }
        pulse_errors_on = cfg.pulse_errors.epsilon_systematic != 0.0 ||
                          cfg.pulse_errors.epsilon_rms != 0.0;
    }

    void evolve_piece(TwoQubitState& state, double dt) {
        if (dt <= 0) return;
        double theta_common = cfg.common_detuning * dt;
        if (ou) {
            const double h_max = cfg.environment.common_noise_tau_c / 20.0;
            const int n = std::max(1, static_cast<int>(std::ceil(dt / h_max)));
            const double h = dt / n;
            double prev = ou->value();
            for (int k = 0; k < n; ++k) {
                const double cur = ou->step(h);
                theta_common += slope_rad * 0.5 * (prev + cur) * h;
                prev = cur;
            }
        }
        const double theta_diff = sign * diff * dt;
        apply_phases(state, theta_common - 0.5 * theta_diff,
                     theta_common + 0.5 * theta_diff);
        if (leak_rate > 0.0) {
            GlobalPulse leak;
            leak.nominal_angle = std::min(leak_rate * dt, 2.0 * pi);
            state = apply_global_pulse(state, leak);
        }
    }

    void apply_pulse(TwoQubitState& state, const Segment& seg) {
        GlobalPulse gp;
        gp.phase = seg.phase;
        gp.nominal_angle = seg.angle;
        if (pulse_errors_on) {
            gp.angle_error_1 = cfg.pulse_errors.epsilon_systematic +
                               cfg.pulse_errors.epsilon_rms * normal(streams.pulse);
            gp.angle_error_2 = cfg.pulse_errors.epsilon_systematic +
                               cfg.pulse_errors.epsilon_rms * normal(streams.pulse);
        }
        if (cfg.lo_phase_sigma > 0)
            gp.lo_phase_offset = cfg.lo_phase_sigma * normal(streams.lo);
        state = apply_global_pulse(state, gp);
    }
};

}  // namespace

TrajectoryResult simulate_trajectory(const PulseSequence& seq, const NoiseConfig& cfg,
                                     InitialState initial, TrajectoryStreams& streams) {
    cfg.environment.validate();
    cfg.pulse_errors.validate();
    TwoQubitState state =
        initial == InitialState::Ground ? TwoQubitState::ground() : prepare_rho_p(0.0);

    ExactRunner runner(cfg, streams);

    std::vector<WaitEvent> events;
    for (double t : sample_hop_times(cfg.hopping, seq.total_wait, streams.hop))
        events.push_back({t, 0});
    if (!cfg.scatter_beams.empty()) {
        double per_ion_rate = 0.0;
        for (const auto& beam : cfg.scatter_beams)
            per_ion_rate += scattering_rate(beam, cfg.constants);
        const HoppingProcess scatter_process{per_ion_rate};
        for (int ion = 1; ion <= 2; ++ion)
            for (double t : sample_hop_times(scatter_process, seq.total_wait, streams.scatter))
                events.push_back({t, ion});
        std::sort(events.begin(), events.end(),
                  [](const WaitEvent& a, const WaitEvent& b) { return a.t < b.t; });
    }

    double clock = 0.0;
    size_t next_event = 0;
    for (const Segment& seg : seq.segments) {
        if (seg.kind == SegmentKind::Pulse) {
            runner.apply_pulse(state, seg);
            continue;
        }
        const double seg_end = clock + seg.duration;
        while (next_event < events.size() && events[next_event].t < seg_end) {
            runner.evolve_piece(state, events[next_event].t - clock);
            clock = events[next_event].t;
            if (events[next_event].type == 0)
                runner.sign = -runner.sign;
            else
                state = decohere_ion(state, events[next_event].type);
            ++next_event;
        }
        runner.evolve_piece(state, seg_end - clock);
        clock = seg_end;
    }

    TrajectoryResult result;
    result.parity_expectation = parity(state);
    result.ion1_contrast = -single_ion_observables(state, 1)[2];
    result.ion2_contrast = -single_ion_observables(state, 2)[2];

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = uniform(streams.born);
    double acc = 0.0;
    int outcome = 3;
    for (int k = 0; k < 3; ++k) {
        acc += state.population(k);
        if (u < acc) {
            outcome = k;
            break;
        }
    }
    result.outcome1 = (outcome >> 1) & 1;
    result.outcome2 = outcome & 1;
    return result;
}

std::pair<int, int> simulate_shot(const PulseSequence& seq, const NoiseConfig& cfg,
                                  Rng& rng) {
    TrajectoryStreams streams = make_trajectory_streams(rng(), 0);
    const InitialState init = InitialState::Ground;
    const TrajectoryResult res = simulate_trajectory(seq, cfg, init, streams);
    return {res.outcome1, res.outcome2};
}

double phase_only_parity_expectation(const PulseSequence& seq, const NoiseConfig& cfg,
                                     TrajectoryStreams& streams) {
    if (cfg.common_field_enabled || cfg.common_detuning != 0.0 ||
        cfg.lo_phase_sigma != 0.0 || !cfg.scatter_beams.empty() || cfg.leakage ||
        cfg.pulse_errors.epsilon_systematic != 0.0 ||
        cfg.pulse_errors.epsilon_rms != 0.0)
        throw std::invalid_argument(
            "phase_only: engine only models gradient + hopping noise");
    const double diff = cfg.differential_detuning_rad();
    const std::vector<double> hops =
        sample_hop_times(cfg.hopping, seq.total_wait, streams.hop);

    double psi = 0.0;
    int echo = +1;
    int hop_sign = +1;
    double clock = 0.0;
    size_t next_hop = 0;
    for (const Segment& seg : seq.segments) {
        if (seg.kind == SegmentKind::Pulse) {
            if (seg.angle > 0.75 * pi) echo = -echo;
            continue;
        }
        const double seg_end = clock + seg.duration;
        while (next_hop < hops.size() && hops[next_hop] < seg_end) {
            psi += echo * hop_sign * diff * (hops[next_hop] - clock);
            clock = hops[next_hop];
            hop_sign = -hop_sign;
            ++next_hop;
        }
        psi += echo * hop_sign * diff * (seg_end - clock);
        clock = seg_end;
    }
    return 0.5 * std::cos(psi);
}

// ---------------------------------------------------------------------------
// Curve generation

namespace {

struct ChunkAccum {
    long counts[4] = {0, 0, 0, 0};
    double sum_parity = 0.0, sumsq_parity = 0.0;
    double sum_i1 = 0.0, sumsq_i1 = 0.0;
    double sum_i2 = 0.0, sumsq_i2 = 0.0;
    std::vector<ShotRecord> records;
};

template <typename Work>
void run_chunks(long total, int threads, Work&& work) {
    const long n_chunks = (total + kChunkSize - 1) / kChunkSize;
    int n_threads = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = static_cast<int>(std::clamp<long>(n_threads, 1, std::max<long>(1, n_chunks)));
    if (n_threads == 1) {
        for (long c = 0; c < n_chunks; ++c)
            work(c, c * kChunkSize, std::min(total, (c + 1) * kChunkSize));
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                const long c = next.fetch_add(1);
                if (c >= n_chunks) return;
                work(c, c * kChunkSize, std::min(total, (c + 1) * kChunkSize));
            }
        });
    for (auto& th : pool) th.join();
}

void mean_and_se(double sum, double sumsq, long n, double& mean, double& se) {
    mean = sum / static_cast<double>(n);
    if (n < 2) {
        se = 0.0;
        return;
    }
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(n) * mean * mean) /
                          static_cast<double>(n - 1));
    se = std::sqrt(var / static_cast<double>(n));
}

}  // namespace

SimulatedCurves contrast_curves(const CurveRequest& req, const NoiseConfig& cfg) {
    if (req.shots < 1) throw std::invalid_argument("contrast_curves: shots must be >= 1");
    if (req.times.empty()) throw std::invalid_argument("contrast_curves: empty time grid");
    if (req.readout && req.mode != CurveMode::Sampled)
        throw std::invalid_argument("contrast_curves: readout pipeline needs sampled mode");

    SimulatedCurves out;
    for (ContrastCurve* c : {&out.parity, &out.ion1, &out.ion2}) {
        c->times = req.times;
        c->shots_per_point = req.shots;
        c->contrast.resize(req.times.size());
        c->standard_error.resize(req.times.size());
    }

    const bool phase_only = cfg.engine == EngineKind::PhaseOnly;
    const bool include_prep = req.initial_state == InitialState::Ground;

    for (size_t p = 0; p < req.times.size(); ++p) {
        const PulseSequence seq = ramsey_dd_sequence(
            req.times[p], req.tau, req.style, req.analysis_phase, include_prep);
        const long n_chunks = (req.shots + kChunkSize - 1) / kChunkSize;
        std::vector<ChunkAccum> accums(static_cast<size_t>(n_chunks));

        run_chunks(req.shots, req.threads, [&](long chunk, long begin, long end) {
            ChunkAccum& acc = accums[static_cast<size_t>(chunk)];
            for (long i = begin; i < end; ++i) {
                const uint64_t index =
                    static_cast<uint64_t>(p) * static_cast<uint64_t>(req.shots) +
                    static_cast<uint64_t>(i);
                TrajectoryStreams streams =
                    make_trajectory_streams(req.master_seed, index);
                TrajectoryResult res;
                if (phase_only) {
                    res.parity_expectation =
                        phase_only_parity_expectation(seq, cfg, streams);
                    std::uniform_real_distribution<double> uniform(0.0, 1.0);
                    const bool even =
                        uniform(streams.born) < 0.5 * (1.0 + res.parity_expectation);
                    res.outcome1 = 0;
                    res.outcome2 = even ? 0 : 1;
                } else {
                    res = simulate_trajectory(seq, cfg, req.initial_state, streams);
                }
                if (req.mode == CurveMode::Sampled) {
                    if (req.readout) {
                        const ReadoutSim& ro = *req.readout;
                        std::uniform_real_distribution<double> uniform(0.0, 1.0);
                        std::poisson_distribution<int> ba_in(ro.ba_model.mean_in_order);
                        std::poisson_distribution<int> ba_mis(ro.ba_model.mean_misordered);
                        ShotRecord rec;
                        const double f1 = res.outcome1 ? ro.ion1.eps10 : ro.ion1.eps01;
                        const double f2 = res.outcome2 ? ro.ion2.eps10 : ro.ion2.eps01;
                        rec.yb1_bright = static_cast<uint8_t>(
                            uniform(streams.born) < f1 ? 1 - res.outcome1 : res.outcome1);
                        rec.yb2_bright = static_cast<uint8_t>(
                            uniform(streams.born) < f2 ? 1 - res.outcome2 : res.outcome2);
                        rec.ba_count = uniform(streams.born) < ro.p_misorder
                                           ? ba_mis(streams.born)
                                           : ba_in(streams.born);
                        acc.records.push_back(rec);
                    } else {
                        ++acc.counts[2 * res.outcome1 + res.outcome2];
                    }
                } else {
                    acc.sum_parity += res.parity_expectation;
                    acc.sumsq_parity += res.parity_expectation * res.parity_expectation;
                    acc.sum_i1 += res.ion1_contrast;
                    acc.sumsq_i1 += res.ion1_contrast * res.ion1_contrast;
                    acc.sum_i2 += res.ion2_contrast;
                    acc.sumsq_i2 += res.ion2_contrast * res.ion2_contrast;
                }
            }
        });

        if (req.mode == CurveMode::Expectation) {
            double sum_p = 0, ssq_p = 0, sum_1 = 0, ssq_1 = 0, sum_2 = 0, ssq_2 = 0;
            for (const ChunkAccum& acc : accums) {
                sum_p += acc.sum_parity;
                ssq_p += acc.sumsq_parity;
                sum_1 += acc.sum_i1;
                ssq_1 += acc.sumsq_i1;
                sum_2 += acc.sum_i2;
                ssq_2 += acc.sumsq_i2;
            }
            mean_and_se(sum_p, ssq_p, req.shots, out.parity.contrast[p],
                        out.parity.standard_error[p]);
            mean_and_se(sum_1, ssq_1, req.shots, out.ion1.contrast[p],
                        out.ion1.standard_error[p]);
            mean_and_se(sum_2, ssq_2, req.shots, out.ion2.contrast[p],
                        out.ion2.standard_error[p]);
        } else if (req.readout) {
            std::vector<ShotRecord> records;
            records.reserve(static_cast<size_t>(req.shots));
            for (ChunkAccum& acc : accums)
                records.insert(records.end(), acc.records.begin(), acc.records.end());
            auto [kept, _discarded] = post_select(records, req.readout->ba_threshold);
            if (kept.empty())
                throw std::runtime_error("contrast_curves: post-selection kept no shots");
            const double n_kept = static_cast<double>(kept.size());
            std::array<double, 4> freq = observed_frequencies(kept);
            if (req.readout->mitigate)
                freq = mitigate_readout(freq, req.readout->ion1, req.readout->ion2)
                           .probabilities;
            const double parity_value = parity_of_probabilities(freq);
            out.parity.contrast[p] = parity_value;
            out.parity.standard_error[p] =
                std::sqrt(std::max(0.0, 1.0 - parity_value * parity_value) / n_kept);
            const double sz1 = (freq[0] + freq[1]) - (freq[2] + freq[3]);
            const double sz2 = (freq[0] + freq[2]) - (freq[1] + freq[3]);
            out.ion1.contrast[p] = -sz1;
            out.ion1.standard_error[p] =
                std::sqrt(std::max(0.0, 1.0 - sz1 * sz1) / n_kept);
            out.ion2.contrast[p] = -sz2;
            out.ion2.standard_error[p] =
                std::sqrt(std::max(0.0, 1.0 - sz2 * sz2) / n_kept);
        } else {
            long counts[4] = {0, 0, 0, 0};
            for (const ChunkAccum& acc : accums)
                for (int k = 0; k < 4; ++k) counts[k] += acc.counts[k];
            const double n = static_cast<double>(req.shots);
            const double parity_value =
                (counts[0] + counts[3] - counts[1] - counts[2]) / n;
            out.parity.contrast[p] = parity_value;
            out.parity.standard_error[p] =
                std::sqrt(std::max(0.0, 1.0 - parity_value * parity_value) / n);
            const double sz1 = (counts[0] + counts[1] - counts[2] - counts[3]) / n;
            const double sz2 = (counts[0] + counts[2] - counts[1] - counts[3]) / n;
            out.ion1.contrast[p] = -sz1;
            out.ion1.standard_error[p] = std::sqrt(std::max(0.0, 1.0 - sz1 * sz1) / n);
            out.ion2.contrast[p] = -sz2;
            out.ion2.standard_error[p] = std::sqrt(std::max(0.0, 1.0 - sz2 * sz2) / n);
        }
    }
    if (phase_only) {
        // The reduced engine tracks only the DFS phase.
        for (ContrastCurve* ion : {&out.ion1, &out.ion2}) {
            std::fill(ion->contrast.begin(), ion->contrast.end(), 0.0);
            std::fill(ion->standard_error.begin(), ion->standard_error.end(), 0.0);
        }
    }
    return out;
}

ContrastCurve contrast_curve(const CurveRequest& req, const NoiseConfig& cfg) {
    return contrast_curves(req, cfg).parity;
}

// ---------------------------------------------------------------------------
// Oracles

double hop_oracle_fast(double gamma, double t, double tau, double t_phi) {
    if (gamma < 0 || t < 0) throw std::invalid_argument("hop_oracle_fast: bad inputs");
    if (!(tau / t_phi > 5.0))
        throw std::invalid_argument("hop_oracle_fast: requires tau/T_phi > 5");
    return std::exp(-gamma * t);
}

double hop_oracle_slow(double gamma, double tau, double t_phi, double t) {
    if (gamma < 0 || t < 0 || tau <= 0 || t_phi <= 0)
        throw std::invalid_argument("hop_oracle_slow: bad inputs");
    const double ratio = 2.0 * pi * tau / t_phi;
    if (!(ratio < 1.0))
        throw std::invalid_argument("hop_oracle_slow: requires 2 pi tau / T_phi < 1");
    const double sigma2 = ratio * ratio / 3.0;
    return std::exp(-0.5 * gamma * t * sigma2);
}

double hop_oracle_slow_1e_time(double gamma, double tau, double t_phi) {
    if (gamma <= 0 || tau <= 0 || t_phi <= 0)
        throw std::invalid_argument("hop_oracle_slow_1e_time: bad inputs");
    const double w = 2.0 * pi * tau;
    return 6.0 * t_phi * t_phi / (gamma * w * w);
}

double pulse_noise_contrast(long n_pulses, double epsilon_rms) {
    if (n_pulses < 0) throw std::invalid_argument("pulse_noise_contrast: N must be >= 0");
    const double step = pi * epsilon_rms;
    return std::exp(-0.5 * static_cast<double>(n_pulses) * step * step);
}

double pulse_noise_dfs_contrast(long n_pulses, double epsilon_rms) {
    const double c = pulse_noise_contrast(n_pulses, epsilon_rms);
    return c * c;
}

std::pair<double, double> pulse_noise_mc(long n_pulses, double epsilon_rms,
                                         long trajectories, uint64_t master_seed) {
    if (trajectories < 2)
        throw std::invalid_argument("pulse_noise_mc: need >= 2 trajectories");
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < trajectories; ++i) {
        Rng rng = make_rng(master_seed, static_cast<uint64_t>(i), 7);
        std::normal_distribution<double> normal(0.0, 1.0);
        double theta = 0.0;
        for (long k = 0; k < n_pulses; ++k)
            theta += pi * epsilon_rms * normal(rng);
        const double v = std::cos(theta);
        sum += v;
        sumsq += v * v;
    }
    double mean, se;
    mean_and_se(sum, sumsq, trajectories, mean, se);
    return {mean, se};
}

// ---------------------------------------------------------------------------
// Pi-pulse train benchmark

namespace {

// Final |1> population of one ion after n pulses with per-pulse relative
// angle errors; spinor propagation.
double train_population(int n_pulses, double eps_sys, double eps_rms,
                        SequenceStyle pattern, Rng& rng,
                        std::normal_distribution<double>& normal) {
    Complex c0 = 1.0, c1 = 0.0;
    for (int k = 0; k < n_pulses; ++k) {
        const double phase =
            (pattern == SequenceStyle::Reverse && (k % 2 == 1)) ? pi : 0.0;
        const double eps = eps_sys + (eps_rms > 0 ? eps_rms * normal(rng) : 0.0);
        const double angle = pi * (1.0 + eps);
        const double ch = std::cos(angle / 2.0);
        const double sh = std::sin(angle / 2.0);
        const Complex off = -I * sh * std::exp(-I * phase);
        const Complex c0n = ch * c0 + off * c1;
        const Complex c1n = -I * sh * std::exp(I * phase) * c0 + ch * c1;
        c0 = c0n;
        c1 = c1n;
    }
    return std::norm(c1);
}

}  // namespace

std::pair<double, double> pulse_train_error(int n_pulses, double epsilon_systematic,
                                            double epsilon_rms, SequenceStyle pattern,
                                            long shots, uint64_t master_seed) {
    if (n_pulses < 1) throw std::invalid_argument("pulse_train_error: N must be >= 1");
    if (shots < 2) throw std::invalid_argument("pulse_train_error: need >= 2 shots");
    const double target = (n_pulses % 2 == 1) ? 1.0 : 0.0;
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < shots; ++i) {
        Rng rng = make_rng(master_seed, static_cast<uint64_t>(i), 8);
        std::normal_distribution<double> normal(0.0, 1.0);
        double err = 0.0;
        for (int ion = 0; ion < 2; ++ion) {
            const double p1 =
                train_population(n_pulses, epsilon_systematic, epsilon_rms, pattern,
                                 rng, normal);
            err += std::abs(target - p1);
        }
        err *= 0.5;
        sum += err;
        sumsq += err * err;
    }
    double mean, se;
    mean_and_se(sum, sumsq, shots, mean, se);
    return {mean, se};
}

// ---------------------------------------------------------------------------
// Coherence extraction

CoherenceFit coherence_time(const ContrastCurve& curve, const CoherenceOptions& options) {
    curve.validate();
    if (curve.times.size() < 3)
        throw std::invalid_argument("coherence_time: need at least 3 points");

    std::vector<double> sigma(curve.standard_error.size());
    for (size_t i = 0; i < sigma.size(); ++i)
        sigma[i] = std::max(curve.standard_error[i], 1e-9);

    const double amplitude0 = options.amplitude_anchor
                                  ? *options.amplitude_anchor
                                  : curve.contrast.front();
    double time0 = options.initial_time;
    if (time0 <= 0) {
        const double span = curve.times.back() - curve.times.front();
        const double crossing = crossing_time(curve, amplitude0 / std::exp(1.0));
        time0 = std::isfinite(crossing) && crossing > 0 ? crossing : 2.0 * span;
    }

    FitOptions fit_options;
    fit_options.fixed = {options.amplitude_anchor.has_value(), false,
                         options.fix_offset};
    CoherenceFit out;
    try {
        out.fit = fit_model(curve.times, curve.contrast, sigma, FitModel::Exponential,
                            {amplitude0, time0, 0.0}, fit_options);
        out.time = out.fit.param(1);
        out.sigma = out.fit.sigma(1);
        out.converged = out.fit.converged && out.time > 0;
    } catch (const std::runtime_error&) {
        out.time = time0;
        out.sigma = std::numeric_limits<double>::infinity();
        out.converged = false;
    }
    return out;
}

double crossing_time(const ContrastCurve& curve, double level) {
    for (size_t i = 0; i < curve.times.size(); ++i) {
        if (curve.contrast[i] < level) {
            if (i == 0) return curve.times.front();
            const double y0 = curve.contrast[i - 1];
            const double y1 = curve.contrast[i];
            const double f = (y0 - level) / (y0 - y1);
            return curve.times[i - 1] + f * (curve.times[i] - curve.times[i - 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double calibrate_common_sigma(double target_1e_s, double tau_c, const NoiseConfig& base,
                              long trajectories, uint64_t master_seed) {
    if (target_1e_s <= 0 || tau_c <= 0)
        throw std::invalid_argument("calibrate_common_sigma: bad target");
    NoiseConfig cfg = base;
    cfg.engine = EngineKind::Exact;
    cfg.common_field_enabled = true;
    cfg.environment.common_noise_tau_c = tau_c;
    cfg.hopping.rate = 0.0;
    cfg.pulse_errors = PulseErrorModel{0.0, 0.0};
    cfg.scatter_beams.clear();
    cfg.leakage.reset();
    cfg.lo_phase_sigma = 0.0;

    CurveRequest req;
    req.tau = 2.0 * target_1e_s;  // grid stays in the single-block regime
    req.initial_state = InitialState::Ground;
    req.mode = CurveMode::Expectation;
    req.shots = trajectories;
    req.master_seed = master_seed;
    for (int k = 1; k <= 12; ++k) req.times.push_back(target_1e_s * 0.18 * k);

    const auto crossing_for = [&](double sigma) {
        cfg.environment.common_noise_sigma = sigma;
        const SimulatedCurves curves = contrast_curves(req, cfg);
        return crossing_time(curves.ion1, std::exp(-1.0));
    };

    // Initial scale from the motional-narrowed estimate Var ~ 2 sigma_w^2 tau_c T.
    const double slope = 2.0 * pi * cfg.common_slope_hz_per_gauss();
    double guess = std::sqrt(1.0 / (tau_c * target_1e_s)) / slope;
    double lo = guess / 6.0, hi = guess * 6.0;
    for (int iter = 0; iter < 40; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double crossing = crossing_for(mid);
        if (std::isnan(crossing) || crossing > target_1e_s)
            lo = mid;  // too little noise, coherence lives longer than target
        else
            hi = mid;
        if (std::isfinite(crossing) &&
            std::abs(crossing - target_1e_s) <= 0.02 * target_1e_s)
            return mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace dfs
