#include "dfs/sequence.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dfs/constants.hpp"

namespace dfs {

Segment Segment::wait(double duration) {
    if (duration < 0) throw std::invalid_argument("Segment: wait duration must be >= 0");
    Segment s;
    s.kind = SegmentKind::Wait;
    s.duration = duration;
    return s;
}

Segment Segment::pulse(double phase, double angle) {
    if (angle <= 0 || angle > 2.0 * pi)
        throw std::invalid_argument("Segment: pulse angle must be in (0, 2*pi]");
    Segment s;
    s.kind = SegmentKind::Pulse;
    s.phase = phase;
    s.angle = angle;
    return s;
}

std::string PulseSequence::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"style\":\"" << (style == SequenceStyle::Reverse ? "reverse" : "plain")
       << "\",\"total_wait_s\":" << total_wait << ",\"segments\":[";
    for (size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        if (i) os << ",";
        if (s.kind == SegmentKind::Wait)
            os << "{\"wait_s\":" << s.duration << "}";
        else
            os << "{\"phase_rad\":" << s.phase << ",\"angle_rad\":" << s.angle << "}";
    }
    os << "]}";
    return os.str();
}

namespace {
void append_block(PulseSequence& seq, double tau, SequenceStyle style) {
    const double second_phase = (style == SequenceStyle::Reverse) ? pi : 0.0;
    seq.segments.push_back(Segment::wait(tau / 2.0));
    seq.segments.push_back(Segment::pulse(0.0, pi));
    seq.segments.push_back(Segment::wait(tau));
    seq.segments.push_back(Segment::pulse(second_phase, pi));
    seq.segments.push_back(Segment::wait(tau / 2.0));
    seq.total_wait += 2.0 * tau;
}
}  // namespace

PulseSequence ramsey_dd_sequence(double total_time, double tau, SequenceStyle style,
                                 double analysis_phase, bool include_preparation) {
    if (total_time < 0) throw std::invalid_argument("ramsey_dd_sequence: T must be >= 0");
    PulseSequence seq;
    seq.style = style;
    if (include_preparation) seq.segments.push_back(Segment::pulse(0.0, pi / 2.0));
    if (total_time > 0.0) {
        if (total_time < 2.0 * tau) {
            append_block(seq, total_time / 2.0, style);
        } else {
            if (tau <= 0) throw std::invalid_argument("ramsey_dd_sequence: tau must be > 0");
            const double blocks = total_time / (2.0 * tau);
            const double rounded = std::round(blocks);
            if (std::abs(blocks - rounded) > 1e-9 || rounded < 1.0)
                throw std::invalid_argument(
                    "ramsey_dd_sequence: T must be an integer multiple of 2*tau");
            for (long b = 0; b < static_cast<long>(rounded); ++b)
                append_block(seq, tau, style);
        }
    }
    seq.segments.push_back(Segment::pulse(analysis_phase, pi / 2.0));
    return seq;
}

PulseSequence pulse_train(int n_pulses, SequenceStyle style) {
    if (n_pulses < 1) throw std::invalid_argument("pulse_train: N must be >= 1");
    PulseSequence seq;
    seq.style = style;
    for (int i = 0; i < n_pulses; ++i) {
        const double phase = (style == SequenceStyle::Reverse && (i % 2 == 1)) ? pi : 0.0;
        seq.segments.push_back(Segment::pulse(phase, pi));
    }
    return seq;
}

Matrix4c ideal_net_unitary(const PulseSequence& seq) {
    Matrix4c u = Matrix4c::Identity();
    for (const Segment& s : seq.segments) {
        if (s.kind != SegmentKind::Pulse) continue;  // zero detuning: waits are identity
        const Matrix2c r = rotation_operator(s.phase, s.angle);
        Matrix4c u2;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                u2.block<2, 2>(2 * i, 2 * j) = r(i, j) * r;
        u = u2 * u;
    }
    return u;
}

int pulse_count(const PulseSequence& seq) {
    int n = 0;
    for (const Segment& s : seq.segments)
        if (s.kind == SegmentKind::Pulse) ++n;
    return n;
}

}  // namespace dfs
