#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dfs/constants.hpp"
#include "dfs/fitting.hpp"
#include "dfs/physics.hpp"
#include "dfs/readout.hpp"
#include "dfs/sequence.hpp"
#include "dfs/stochastic.hpp"
#include "dfs/two_qubit.hpp"

// Trajectory sampling under the full noise stack, contrast-curve generation,
// analytic hopping-dephasing oracles, and coherence-time extraction.

namespace dfs {

enum class QubitKind { Clock, Zeeman };
enum class EngineKind { Exact, PhaseOnly };
enum class InitialState { Ground, RhoP };
enum class CurveMode { Sampled, Expectation };

struct NoiseConfig {
    MagneticEnvironment environment;
    HoppingProcess hopping;
    PulseErrorModel pulse_errors{0.0, 0.0};
    std::vector<ScatterBeam> scatter_beams;     // empty = scattering off
    std::optional<LeakageModel> leakage;        // nullopt = leakage off
    QubitKind qubit_kind = QubitKind::Clock;
    EngineKind engine = EngineKind::Exact;

    bool common_field_enabled = false;          // OU common-mode field noise
    double common_detuning = 0.0;               // rad/s, static common offset
    double lo_phase_sigma = 0.0;                // rad, per-pulse common LO offset rms
    std::optional<double> t_phi_override;       // s, sets the gradient via 1/T_phi
    PhysicalConstants constants;

    // Differential detuning (rad/s) from the qubit kind's gradient law, or
    // from t_phi_override when present.
    double differential_detuning_rad() const;

    // Common-mode sensitivity slope (Hz/G) of the selected qubit kind.
    double common_slope_hz_per_gauss() const;
};

struct ContrastCurve {
    std::vector<double> times;
    std::vector<double> contrast;
    std::vector<double> standard_error;
    long shots_per_point = 0;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Single repetitions

struct TrajectoryStreams {
    Rng hop, field, pulse, lo, scatter, born;
};
TrajectoryStreams make_trajectory_streams(uint64_t master_seed, uint64_t index);

struct TrajectoryResult {
    int outcome1 = 0;             // sampled sz-basis bit of ion 1 (1 = bright)
    int outcome2 = 0;
    double parity_expectation = 0.0;
    double ion1_contrast = 0.0;   // -<sz>, the bright-state Ramsey signal
    double ion2_contrast = 0.0;
};

// Full density-matrix propagation of one repetition: waits split at sampled
// hop times (differential-detuning sign flips), common-field offsets
// integrated over each piece, per-pulse angle errors, optional scattering and
// leakage, projective readout at the end.
TrajectoryResult simulate_trajectory(const PulseSequence& seq, const NoiseConfig& cfg,
                                     InitialState initial, TrajectoryStreams& streams);

// Born-rule outcome bits of one shot; deterministic given the RNG state.
std::pair<int, int> simulate_shot(const PulseSequence& seq, const NoiseConfig& cfg,
                                  Rng& rng);

// Reduced engine: tracks only the DFS phase with the echo sign flipped at
// pi-pulses and the hop sign flipped at hop times; parity expectation is
// cos(phi)/2. Only valid for gradient+hopping configurations; throws when the
// config enables noise terms outside that model.
double phase_only_parity_expectation(const PulseSequence& seq, const NoiseConfig& cfg,
                                     TrajectoryStreams& streams);

// ---------------------------------------------------------------------------
// Curves

struct ReadoutSim {
    ConfusionMatrix ion1;
    ConfusionMatrix ion2;
    BaCountModel ba_model;
    double p_misorder = 0.0;
    int ba_threshold = 0;
    bool mitigate = true;
};

struct CurveRequest {
    std::vector<double> times;      // evolution times T, s
    double tau = 100.0;             // echo interval, s
    SequenceStyle style = SequenceStyle::Reverse;
    double analysis_phase = 0.0;
    InitialState initial_state = InitialState::RhoP;
    CurveMode mode = CurveMode::Sampled;
    long shots = 10000;             // trajectories per point
    uint64_t master_seed = 1;
    int threads = 0;                // 0 = hardware concurrency
    std::optional<ReadoutSim> readout;  // sampled mode only
};

struct SimulatedCurves {
    ContrastCurve parity;
    ContrastCurve ion1;
    ContrastCurve ion2;
};

SimulatedCurves contrast_curves(const CurveRequest& req, const NoiseConfig& cfg);
ContrastCurve contrast_curve(const CurveRequest& req, const NoiseConfig& cfg);

// ---------------------------------------------------------------------------
// Analytic oracles

// Fast-randomization regime (tau >> T_phi): every hop scrambles the phase,
// C(T) = exp(-gamma T). Guard: tau/T_phi > 5.
double hop_oracle_fast(double gamma, double t, double tau, double t_phi);

// Small-residual regime (2 pi tau / T_phi < 1): a hop at a uniform position in
// the echo interval leaves variance (1/3)(2 pi tau / T_phi)^2, so
// C(T) = exp(-gamma T sigma^2 / 2); 1/e time 6 T_phi^2 / (gamma (2 pi tau)^2).
double hop_oracle_slow(double gamma, double tau, double t_phi, double t);
double hop_oracle_slow_1e_time(double gamma, double tau, double t_phi);

// Single-ion coherence after N pi-pulses with independent per-pulse relative
// angle errors of rms epsilon: exp(-N (pi eps)^2 / 2).
double pulse_noise_contrast(long n_pulses, double epsilon_rms);

// MC counterpart of pulse_noise_contrast: mean of cos(Theta) over random
// walks Theta = sum of N Gaussian angle deviations. Returns (mean, SE).
std::pair<double, double> pulse_noise_mc(long n_pulses, double epsilon_rms,
                                         long trajectories, uint64_t master_seed);

// DFS parity contrast under the same error model acting independently on both
// ions: the per-ion factors multiply.
double pulse_noise_dfs_contrast(long n_pulses, double epsilon_rms);

// Accumulated population error of a pi-pulse train (mean deviation of the
// final population from the ideal alternating target, averaged over the two
// ions). Returns (error, SE).
std::pair<double, double> pulse_train_error(int n_pulses, double epsilon_systematic,
                                            double epsilon_rms, SequenceStyle pattern,
                                            long shots, uint64_t master_seed);

// ---------------------------------------------------------------------------
// Coherence extraction and calibration

struct CoherenceOptions {
    std::optional<double> amplitude_anchor;  // fix the amplitude when set
    bool fix_offset = false;                 // pin c = 0
    double initial_time = 0.0;               // 0 = guess from the grid span
};

struct CoherenceFit {
    double time = 0.0;   // s
    double sigma = 0.0;  // s
    bool converged = false;
    FitResult fit;
};

// Exponential coherence time of a contrast curve. Non-convergence and
// rank-deficiency are reported through converged=false rather than thrown.
CoherenceFit coherence_time(const ContrastCurve& curve,
                            const CoherenceOptions& options = {});

// Interpolated first crossing of `level` (NaN when the curve stays above it).
double crossing_time(const ContrastCurve& curve, double level);

// Bisection on the OU amplitude until the simulated single-ion echo contrast
// crosses 1/e at `target_1e_s` (+-2%), at fixed tau_c. Returns sigma in gauss.
double calibrate_common_sigma(double target_1e_s, double tau_c,
                              const NoiseConfig& base, long trajectories = 4000,
                              uint64_t master_seed = 20260808);

}  // namespace dfs
