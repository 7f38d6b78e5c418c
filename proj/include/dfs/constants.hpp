#pragma once

#include <numbers>
#include <stdexcept>

// Physical constants and apparatus parameters for the Yb-Ba-Yb DFS memory
// simulator. Defaults describe the reference apparatus; everything can be
// overridden through the JSON config.

namespace dfs {

inline constexpr double pi = std::numbers::pi;

struct PhysicalConstants {
    double gamma_z = 1.4e6;           // Hz/G, first-order Zeeman qubit sensitivity
    double beta = 310.8;              // Hz/G^2, second-order clock coefficient
    double hf_base = 12.642812118e9;  // Hz, zero-field hyperfine splitting
    double gamma_p = 2.0 * pi * 20e6; // rad/s, P-state natural linewidth
    double delta_fs = 2.0 * pi * 100e12; // rad/s, P fine-structure splitting
    double lambda_0 = 369.5e-9;       // m, qubit resonance (S1/2 -> P1/2)
    double planck = 6.62607015e-34;   // J s
    double light_speed = 2.99792458e8; // m/s
    double hbar = 1.054571817e-34;    // J s

    void validate() const {
        if (gamma_z <= 0 || beta <= 0 || hf_base <= 0 || gamma_p <= 0 ||
            delta_fs <= 0 || lambda_0 <= 0 || planck <= 0 ||
            light_speed <= 0 || hbar <= 0)
            throw std::invalid_argument("PhysicalConstants: all entries must be > 0");
    }
};

struct MagneticEnvironment {
    double b_field = 4.1;             // G, quantizing field
    double delta_b = 2.1e-4;          // G, static inter-ion field difference
    double common_noise_sigma = 0.0;  // G, rms of common-mode fluctuation
    double common_noise_tau_c = 1.0;  // s, correlation time of the fluctuation

    void validate() const {
        if (b_field <= 0) throw std::invalid_argument("MagneticEnvironment: B must be > 0");
        if (delta_b < 0) throw std::invalid_argument("MagneticEnvironment: delta_B must be >= 0");
        if (common_noise_sigma < 0) throw std::invalid_argument("MagneticEnvironment: sigma must be >= 0");
        if (common_noise_tau_c <= 0) throw std::invalid_argument("MagneticEnvironment: tau_c must be > 0");
    }
};

// Documented gradient presets. The apparatus log quotes two uncompensated
// values; both are kept verbatim.
inline constexpr double kUncompensatedDeltaB = 2.1e-4;        // G
inline constexpr double kUncompensatedDeltaBAlt = 2.4e-4;     // G
inline constexpr double kCompensatedDeltaBLow = 5.5e-8;       // G
inline constexpr double kCompensatedDeltaBHigh = 4.2e-7;      // G

// Common-mode field noise amplitude that reproduces the measured 8.1 s
// single-ion echo time at tau_c = 1 s (see monte_carlo::calibrate_common_sigma).
inline constexpr double kCalibratedCommonSigma = 3.266e-5;    // G

struct HoppingProcess {
    double rate = 6e-4;  // Hz, Poisson rate of Yb-Yb position exchange

    void validate() const {
        if (rate < 0) throw std::invalid_argument("HoppingProcess: rate must be >= 0");
    }
};

struct ScatterBeam {
    double wavelength;        // m
    double power;             // W
    double waist;             // m, 1/e^2 intensity radius
    double ion_offset;        // m, transverse displacement from beam center
    double incidence_factor;  // intensity multiplier, 1/sqrt(2) for 45 degrees

    void validate() const {
        if (wavelength <= 0 || power < 0 || waist <= 0 || ion_offset < 0)
            throw std::invalid_argument("ScatterBeam: parameters must be positive");
        if (incidence_factor <= 0 || incidence_factor > 1)
            throw std::invalid_argument("ScatterBeam: incidence_factor must be in (0, 1]");
    }
};

inline ScatterBeam cooling_beam_493() {
    return {493e-9, 220e-6, 38e-6, 6e-6, 1.0 / std::numbers::sqrt2};
}
inline ScatterBeam repump_beam_650() {
    return {650e-9, 90e-6, 55e-6, 6e-6, 1.0 / std::numbers::sqrt2};
}

struct PulseErrorModel {
    double epsilon_systematic = 0.0;   // relative angle offset, calibration error
    double epsilon_rms = 1.7e-3;       // shot-to-shot relative pi-pulse error

    void validate() const {
        if (epsilon_systematic < 0 || epsilon_systematic > 0.1 ||
            epsilon_rms < 0 || epsilon_rms > 0.1)
            throw std::invalid_argument("PulseErrorModel: epsilon out of [0, 0.1]");
    }
};

struct LeakageModel {
    double isolation_db = 175.0;  // dB of drive power isolation while gated off
    double pi_time = 61.39e-6;    // s, nominal pi-pulse duration

    void validate() const {
        if (isolation_db <= 0) throw std::invalid_argument("LeakageModel: isolation must be > 0");
        if (pi_time <= 0) throw std::invalid_argument("LeakageModel: pi_time must be > 0");
    }
};

// Recorded limits that are not recomputed by the budget (their derivations
// depend on apparatus details outside this model).
inline constexpr double kLeakageLimitSeconds = 8.2e11;
inline constexpr double kT1LimitSeconds = 5.0e11;

}  // namespace dfs
