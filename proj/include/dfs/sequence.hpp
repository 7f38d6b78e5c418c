#pragma once

#include <string>
#include <vector>

#include "dfs/two_qubit.hpp"

// Pulse-sequence construction: Ramsey with reverse-style spin-echo blocks and
// pi-pulse calibration trains.

namespace dfs {

enum class SegmentKind { Wait, Pulse };

struct Segment {
    SegmentKind kind;
    double duration = 0.0;  // s, Wait only
    double phase = 0.0;     // rad, Pulse only
    double angle = 0.0;     // rad, Pulse only

    static Segment wait(double duration);
    static Segment pulse(double phase, double angle);
};

enum class SequenceStyle { Plain, Reverse };

struct PulseSequence {
    std::vector<Segment> segments;
    double total_wait = 0.0;
    SequenceStyle style = SequenceStyle::Reverse;

    std::string to_json() const;
};

// Ramsey sequence R_0(pi/2) . blocks . R_phi(pi/2) of total evolution time T.
// Each echo block is Wait(tau/2) R_a(pi) Wait(tau) R_b(pi) Wait(tau/2); the
// Reverse style alternates pi-pulse phases 0, pi. T < 2*tau collapses to a
// single block with tau_eff = T/2; T >= 2*tau must be a multiple of 2*tau.
// `include_preparation` drops the leading pi/2 when the superposition is
// prepared externally.
PulseSequence ramsey_dd_sequence(double total_time, double tau,
                                 SequenceStyle style = SequenceStyle::Reverse,
                                 double analysis_phase = 0.0,
                                 bool include_preparation = true);

// N consecutive pi-pulses, no waits. Reverse alternates phases 0, pi.
PulseSequence pulse_train(int n_pulses, SequenceStyle style);

// Net two-qubit unitary of the sequence with all errors and detunings zero.
Matrix4c ideal_net_unitary(const PulseSequence& seq);

int pulse_count(const PulseSequence& seq);

}  // namespace dfs
