#include "dfs/physics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dfs {

double clock_frequency(double b_gauss, const PhysicalConstants& c) {
    if (b_gauss < 0) throw std::invalid_argument("clock_frequency: B must be >= 0");
    return c.hf_base + c.beta * b_gauss * b_gauss;
}

double clock_differential(double b_gauss, double delta_b_gauss,
                          const PhysicalConstants& c) {
    if (b_gauss <= 0) throw std::invalid_argument("clock_differential: B must be > 0");
    return 2.0 * c.beta * b_gauss * delta_b_gauss;
}

double zeeman_differential(double delta_b_gauss, const PhysicalConstants& c) {
    return c.gamma_z * delta_b_gauss;
}

double sensitivity_ratio(double b_gauss, const PhysicalConstants& c) {
    if (b_gauss <= 0) throw std::invalid_argument("sensitivity_ratio: B must be > 0");
    return c.gamma_z / (2.0 * c.beta * b_gauss);
}

double project_clock_coherence(double t_zeeman, double b_gauss,
                               const PhysicalConstants& c) {
    if (t_zeeman <= 0) throw std::invalid_argument("project_clock_coherence: T_zeeman must be > 0");
    return sensitivity_ratio(b_gauss, c) * t_zeeman;
}

double period_from_frequency(double freq_hz) {
    if (freq_hz <= 0) throw std::invalid_argument("period_from_frequency: f must be > 0");
    return 1.0 / freq_hz;
}

double frequency_from_period(double period_s) {
    if (period_s <= 0) throw std::invalid_argument("frequency_from_period: T must be > 0");
    return 1.0 / period_s;
}

double gradient_from_zeeman_period(double period_s, const PhysicalConstants& c) {
    return frequency_from_period(period_s) / c.gamma_z;
}

double gradient_from_clock_period(double period_s, double b_gauss,
                                  const PhysicalConstants& c) {
    if (b_gauss <= 0) throw std::invalid_argument("gradient_from_clock_period: B must be > 0");
    return frequency_from_period(period_s) / (2.0 * c.beta * b_gauss);
}

double zeeman_period_from_gradient(double delta_b_gauss, const PhysicalConstants& c) {
    return period_from_frequency(zeeman_differential(delta_b_gauss, c));
}

double clock_period_from_gradient(double delta_b_gauss, double b_gauss,
                                  const PhysicalConstants& c) {
    return period_from_frequency(clock_differential(b_gauss, delta_b_gauss, c));
}

double saturation_intensity(const PhysicalConstants& c) {
    const double l3 = c.lambda_0 * c.lambda_0 * c.lambda_0;
    return pi * c.planck * c.light_speed * c.gamma_p / (3.0 * l3);
}

double beam_intensity(const ScatterBeam& beam) {
    beam.validate();
    const double peak = 2.0 * beam.power / (pi * beam.waist * beam.waist);
    const double falloff =
        std::exp(-2.0 * beam.ion_offset * beam.ion_offset / (beam.waist * beam.waist));
    return beam.incidence_factor * peak * falloff;
}

double scattering_rate(const ScatterBeam& beam, const PhysicalConstants& c) {
    if (beam.wavelength == c.lambda_0)
        throw std::invalid_argument("scattering_rate: beam resonant with the qubit transition");
    const double intensity = beam_intensity(beam);
    const double g2 = (c.gamma_p * c.gamma_p / 4.0) *
                      (intensity / (2.0 * saturation_intensity(c)));
    // Detunings entered as magnitudes; the beams sit red of the D1 line and
    // the P3/2 level lies further blue, so the fine-structure term adds.
    const double delta_d1 = 2.0 * pi * c.light_speed *
                            std::abs(1.0 / beam.wavelength - 1.0 / c.lambda_0);
    const double delta_d2 = delta_d1 + c.delta_fs;
    return (g2 * c.gamma_p / 6.0) *
           (1.0 / (delta_d1 * delta_d1) + 2.0 / (delta_d2 * delta_d2));
}

double scattering_limit(const std::vector<ScatterBeam>& beams, int n_qubits,
                        const PhysicalConstants& c) {
    if (beams.empty()) throw std::invalid_argument("scattering_limit: no beams given");
    if (n_qubits < 1) throw std::invalid_argument("scattering_limit: n_qubits must be >= 1");
    double total = 0.0;
    for (const auto& beam : beams) total += scattering_rate(beam, c);
    total *= static_cast<double>(n_qubits);
    if (total <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / total;
}

double leakage_rotation(const LeakageModel& model, double duration_s) {
    model.validate();
    if (duration_s < 0) throw std::invalid_argument("leakage_rotation: duration must be >= 0");
    const double amplitude_ratio = std::pow(10.0, -model.isolation_db / 20.0);
    return (pi / model.pi_time) * amplitude_ratio * duration_s;
}

double pulse_error_limit(double epsilon_rms, double tau_s) {
    if (epsilon_rms <= 0) throw std::invalid_argument("pulse_error_limit: epsilon must be > 0");
    if (tau_s <= 0) throw std::invalid_argument("pulse_error_limit: tau must be > 0");
    const double step = pi * epsilon_rms;
    return 2.0 * tau_s / (step * step);
}

}  // namespace dfs
