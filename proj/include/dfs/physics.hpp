#pragma once

#include <vector>

#include "dfs/constants.hpp"

// Frequency formulas and analytic coherence limits: hyperfine splitting,
// Zeeman/clock differential sensitivities, off-resonant Raman scattering,
// microwave leakage, and the pulse-error random-walk bound.

namespace dfs {

// Hyperfine qubit frequency hf_base + beta * B^2 at field B (gauss).
double clock_frequency(double b_gauss, const PhysicalConstants& c = {});

// Differential clock splitting 2 * beta * B * delta_B between the two ions, Hz.
double clock_differential(double b_gauss, double delta_b_gauss,
                          const PhysicalConstants& c = {});

// Differential Zeeman splitting gamma_z * delta_B, Hz.
double zeeman_differential(double delta_b_gauss, const PhysicalConstants& c = {});

// Sensitivity ratio R = gamma_z / (2 * beta * B) between Zeeman and clock pairs.
double sensitivity_ratio(double b_gauss, const PhysicalConstants& c = {});

// Projected clock coherence R * T_zeeman given a measured Zeeman decay time.
double project_clock_coherence(double t_zeeman, double b_gauss,
                               const PhysicalConstants& c = {});

// Phase-evolution period 1/f and its inverse; both differential laws share them.
double period_from_frequency(double freq_hz);
double frequency_from_period(double period_s);

// Gradient that produces a given Zeeman (clock) phase period, gauss.
double gradient_from_zeeman_period(double period_s, const PhysicalConstants& c = {});
double gradient_from_clock_period(double period_s, double b_gauss,
                                  const PhysicalConstants& c = {});
double zeeman_period_from_gradient(double delta_b_gauss, const PhysicalConstants& c = {});
double clock_period_from_gradient(double delta_b_gauss, double b_gauss,
                                  const PhysicalConstants& c = {});

// Two-level saturation intensity pi * h * c * Gamma / (3 * lambda0^3), W/m^2.
double saturation_intensity(const PhysicalConstants& c = {});

// Gaussian-beam intensity seen by an ion at transverse offset r, W/m^2.
double beam_intensity(const ScatterBeam& beam);

// Off-resonant Raman scattering rate of one qubit ion from one coolant beam, Hz.
// Throws if the beam sits on the qubit resonance where the model is invalid.
double scattering_rate(const ScatterBeam& beam, const PhysicalConstants& c = {});

// Coherence limit 1 / (n_qubits * sum of beam rates), s. Returns +inf when the
// total rate vanishes.
double scattering_limit(const std::vector<ScatterBeam>& beams, int n_qubits,
                        const PhysicalConstants& c = {});

// Rotation angle accumulated from residual drive leakage over `duration`.
double leakage_rotation(const LeakageModel& model, double duration_s);

// 1/e coherence limit 2 * tau / (pi * epsilon)^2 from stochastic pulse errors,
// one pi-pulse per interval tau.
double pulse_error_limit(double epsilon_rms, double tau_s);

}  // namespace dfs
