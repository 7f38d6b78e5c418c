#include "dfs/two_qubit.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dfs/constants.hpp"

namespace dfs {

namespace {
constexpr Complex I{0.0, 1.0};

Matrix4c tensor(const Matrix2c& a, const Matrix2c& b) {
    Matrix4c out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}
}  // namespace

TwoQubitState TwoQubitState::ground() {
    TwoQubitState s;
    s.rho(0, 0) = 1.0;
    return s;
}

double TwoQubitState::population(int index) const {
    if (index < 0 || index > 3) throw std::out_of_range("population: index must be 0..3");
    return rho(index, index).real();
}

double TwoQubitState::purity() const {
    return (rho * rho).trace().real();
}

void TwoQubitState::validate() const {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) throw std::runtime_error("TwoQubitState: not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12)
        throw std::runtime_error("TwoQubitState: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho);
    if (solver.eigenvalues().minCoeff() < -1e-10)
        throw std::runtime_error("TwoQubitState: negative eigenvalue");
}

void GlobalPulse::validate() const {
    if (nominal_angle < 0.0 || nominal_angle > 2.0 * pi)
        throw std::invalid_argument("GlobalPulse: angle out of [0, 2*pi]");
    if (std::abs(angle_error_1) >= 0.5 || std::abs(angle_error_2) >= 0.5)
        throw std::invalid_argument("GlobalPulse: |angle error| must be < 0.5");
}

Matrix2c rotation_operator(double phase, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    Matrix2c r;
    r(0, 0) = c;
    r(0, 1) = -I * s * std::exp(-I * phase);
    r(1, 0) = -I * s * std::exp(I * phase);
    r(1, 1) = c;
    return r;
}

TwoQubitState apply_global_pulse(const TwoQubitState& state, const GlobalPulse& pulse) {
    pulse.validate();
    const double phi = pulse.phase + pulse.lo_phase_offset;
    const Matrix2c u1 = rotation_operator(phi, pulse.nominal_angle * (1.0 + pulse.angle_error_1));
    const Matrix2c u2 = rotation_operator(phi, pulse.nominal_angle * (1.0 + pulse.angle_error_2));
    const Matrix4c u = tensor(u1, u2);
    TwoQubitState out;
    out.rho = u * state.rho * u.adjoint();
    return out;
}

TwoQubitState free_evolve(const TwoQubitState& state, const EvolutionTerms& terms,
                          double duration) {
    if (duration < 0) throw std::invalid_argument("free_evolve: duration must be >= 0");
    if (terms.sign != 1 && terms.sign != -1)
        throw std::invalid_argument("free_evolve: sign must be +1 or -1");
    const double half = 0.5 * terms.sign * terms.differential_detuning;
    const double w1 = terms.common_detuning - half;
    const double w2 = terms.common_detuning + half;
    // Each |1> level acquires exp(-i w t); the evolution is diagonal.
    const Complex p1 = std::exp(-I * (w1 * duration));
    const Complex p2 = std::exp(-I * (w2 * duration));
    const Eigen::Vector4cd d{1.0, p2, p1, p1 * p2};
    TwoQubitState out;
    out.rho = d.asDiagonal() * state.rho * d.conjugate().asDiagonal();
    return out;
}

TwoQubitState prepare_rho_p(double phi) {
    TwoQubitState s;
    s.rho.setZero();
    s.rho(0, 0) = 0.25;
    s.rho(1, 1) = 0.25;
    s.rho(2, 2) = 0.25;
    s.rho(3, 3) = 0.25;
    s.rho(1, 2) = 0.25 * std::exp(-I * phi);
    s.rho(2, 1) = std::conj(s.rho(1, 2));
    return s;
}

double parity(const TwoQubitState& state) {
    return state.rho(0, 0).real() + state.rho(3, 3).real() -
           state.rho(1, 1).real() - state.rho(2, 2).real();
}

std::array<double, 3> single_ion_observables(const TwoQubitState& state, int ion) {
    if (ion != 1 && ion != 2) throw std::invalid_argument("single_ion_observables: ion must be 1 or 2");
    const Matrix4c& r = state.rho;
    Matrix2c reduced;
    if (ion == 1) {
        reduced(0, 0) = r(0, 0) + r(1, 1);
        reduced(0, 1) = r(0, 2) + r(1, 3);
        reduced(1, 0) = r(2, 0) + r(3, 1);
        reduced(1, 1) = r(2, 2) + r(3, 3);
    } else {
        reduced(0, 0) = r(0, 0) + r(2, 2);
        reduced(0, 1) = r(0, 1) + r(2, 3);
        reduced(1, 0) = r(1, 0) + r(3, 2);
        reduced(1, 1) = r(1, 1) + r(3, 3);
    }
    const double sx = 2.0 * reduced(0, 1).real();
    const double sy = -2.0 * reduced(0, 1).imag();
    const double sz = (reduced(0, 0) - reduced(1, 1)).real();
    return {sx, sy, sz};
}

double dfs_coherence(const TwoQubitState& state) {
    return 2.0 * std::abs(state.rho(1, 2));
}

double dfs_phase(const TwoQubitState& state) {
    return -std::arg(state.rho(1, 2));
}

TwoQubitState decohere_ion(const TwoQubitState& state, int ion) {
    if (ion != 1 && ion != 2) throw std::invalid_argument("decohere_ion: ion must be 1 or 2");
    const int bit = (ion == 1) ? 2 : 1;  // basis-index bit owned by this ion
    TwoQubitState out = state;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if ((i & bit) != (j & bit)) out.rho(i, j) = 0.0;
    return out;
}

}  // namespace dfs
