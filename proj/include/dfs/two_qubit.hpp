#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

// Exact two-qubit density-matrix engine. Basis order {|00>, |01>, |10>, |11>}
// with the first digit labelling ion 1. All operations are pure functions on
// immutable values.

namespace dfs {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Complex = std::complex<double>;

struct TwoQubitState {
    Matrix4c rho = Matrix4c::Zero();

    static TwoQubitState ground();                 // |00><00|
    double population(int index) const;            // diagonal entry, index 0..3
    double purity() const;                          // Tr(rho^2)

    // Checks hermiticity (1e-12), unit trace (1e-12) and positivity (-1e-10).
    // Throws std::runtime_error naming the violated invariant.
    void validate() const;
};

struct GlobalPulse {
    double phase = 0.0;          // rad, rotation-axis azimuth
    double nominal_angle = 0.0;  // rad, in [0, 2*pi]
    double angle_error_1 = 0.0;  // relative angle error on ion 1
    double angle_error_2 = 0.0;  // relative angle error on ion 2
    double lo_phase_offset = 0.0;  // rad, common local-oscillator offset

    void validate() const;
};

struct EvolutionTerms {
    double common_detuning = 0.0;       // rad/s, identical on both ions
    double differential_detuning = 0.0; // rad/s, omega_1 - omega_2 magnitude
    int sign = +1;                      // current ion-order sign, +1 or -1
};

// Single-qubit rotation R_phi(theta) about the equatorial axis at azimuth phi:
// cos(theta/2) I - i sin(theta/2) (cos phi sx + sin phi sy).
Matrix2c rotation_operator(double phase, double angle);

// Applies R_{phase+lo}(theta (1+eps_i)) to each ion; tensor-product unitary.
TwoQubitState apply_global_pulse(const TwoQubitState& state, const GlobalPulse& pulse);

// Diagonal free evolution for `duration` seconds. Ion 1 runs at
// common - sign*diff/2 and ion 2 at common + sign*diff/2, so the DFS phase
// (minus the argument of <01|rho|10>) advances by sign*diff*duration.
TwoQubitState free_evolve(const TwoQubitState& state, const EvolutionTerms& terms,
                          double duration);

// The post-single-ion-decoherence mixture
//   1/2 |Psi_phi><Psi_phi| + 1/4 |00><00| + 1/4 |11><11|
// with |Psi_phi> = (|01> + e^{i phi}|10>)/sqrt(2); <01|rho|10> = e^{-i phi}/4.
TwoQubitState prepare_rho_p(double phi);

// Two-qubit parity <sz sz> = p00 + p11 - p01 - p10.
double parity(const TwoQubitState& state);

// Pauli expectations of one ion (1 or 2) after tracing out the other.
std::array<double, 3> single_ion_observables(const TwoQubitState& state, int ion);

// DFS coherence 2 |<01|rho|10>|, the attainable parity-fringe amplitude.
double dfs_coherence(const TwoQubitState& state);

// DFS phase phi = -arg(<01|rho|10>).
double dfs_phase(const TwoQubitState& state);

// Erases the single-ion coherence of `ion` (all elements whose bit for that
// ion differs), leaving populations intact. Models a scattering event.
TwoQubitState decohere_ion(const TwoQubitState& state, int ion);

}  // namespace dfs
