#pragma once

#include <variant>
#include <vector>

#include "pulseforge/noise.hpp"
#include "pulseforge/qcore.hpp"

namespace pulseforge {

/// Pulse shape s(t) on [0, T]. Either constant (s = 1) or piecewise-constant
/// samples on equal sub-intervals, each in [0, 1].
class PulseEnvelope {
public:
    static PulseEnvelope constant();
    static PulseEnvelope piecewise(std::vector<double> samples);

    /// Samples fn at sub-interval midpoints; fn maps [0,1] -> [0,1]. Default
    /// resolution for smooth shapes.
    template <typename Fn>
    static PulseEnvelope sampled(Fn&& fn, int n = 128) {
        std::vector<double> s(n);
        for (int k = 0; k < n; ++k) s[k] = fn((k + 0.5) / n);
        return piecewise(std::move(s));
    }

    bool is_constant() const { return samples_.empty(); }
    const std::vector<double>& samples() const { return samples_; }

private:
    PulseEnvelope() = default;
    std::vector<double> samples_;  // empty means constant
};

/// Resonant-frame drive on one qubit: amplitude Omega (rad/ns), phase gamma,
/// detuning delta_omega = omega_q - omega_d (rad/ns), duration T (ns).
/// A negative amplitude is normalized to positive with gamma -> gamma + pi.
struct SingleQubitPulse {
    double amplitude;
    double phase;
    double detuning;
    double duration;
    PulseEnvelope envelope;
    int qubit;

    SingleQubitPulse(double amplitude, double phase, double detuning, double duration,
                     PulseEnvelope envelope = PulseEnvelope::constant(), int qubit = 0);
};

/// Drive on the control qubit at (detuning delta away from) the target
/// qubit's frequency.
struct CrossResonancePulse {
    double amplitude;
    double phase;
    double detuning;  // trainable drive detuning delta, rad/ns
    double duration;
    PulseEnvelope envelope;
    int control;
    int target;

    CrossResonancePulse(double amplitude, double phase, double detuning, double duration,
                        PulseEnvelope envelope = PulseEnvelope::constant(), int control = 0,
                        int target = 1);
};

/// Deferred Z-rotation bookkeeping. A frame phase phi on a qubit stands for
/// a pending RZ(phi) = exp(-i phi/2 sigma_z); subsequent pulses on that qubit
/// execute with effective phase gamma - phi, and flushing materializes the
/// pending rotations.
class VirtualZFrame {
public:
    explicit VirtualZFrame(int n_qubits = 2) : phases_(n_qubits, 0.0) {}

    int n_qubits() const { return static_cast<int>(phases_.size()); }
    double phase(int qubit) const { return phases_.at(qubit); }

    friend VirtualZFrame vz(VirtualZFrame frames, int qubit, double angle);

private:
    std::vector<double> phases_;
};

/// Z rotation recorded as a frame update; zero duration, zero error.
VirtualZFrame vz(VirtualZFrame frames, int qubit, double angle);

/// H_d = -(delta_omega/2) sigma_z + (Omega s/2)(cos gamma sigma_x + sin gamma sigma_y),
/// with gamma taken from the pulse as given (no frame offset).
CMatrix drive_hamiltonian(const SingleQubitPulse& p, double s_value);

/// Time evolution over [0, T]; piecewise envelopes multiply step propagators
/// with later times on the left. The frame is read, not modified.
CMatrix single_qubit_propagator(const SingleQubitPulse& p, const VirtualZFrame& frame);

/// Effective cross-resonance Hamiltonian on the (control, target) register:
/// drift -( (Delta_ct + delta)/2 ) Z_c - (delta/2) Z_t plus the drive terms
/// with coefficients 1 (control), mu (Z_c X/Y_t), nu (X/Y_t).
CMatrix cr_hamiltonian(const CrossResonancePulse& p, const DeviceModel& dev, double s_value);

/// 4x4 propagator of the CR pulse; the drive phase is offset by the control
/// qubit's frame phase.
CMatrix cr_propagator(const CrossResonancePulse& p, const DeviceModel& dev,
                      const VirtualZFrame& frames);

struct FlushedState {
    DensityMatrix state;
    VirtualZFrame frames;
};

/// Materializes every pending frame phase as an exact, error-free
/// exp(-i phi/2 sigma_z) and returns the state with a zeroed frame.
FlushedState flush_frames(const DensityMatrix& rho, const VirtualZFrame& frames);

/// Dispersive-coupler effective qubit-qubit strength
/// J = g1 g2 (w1 + w2 - 2 wr) / (2 (w1 - wr)(w2 - wr)).
double effective_coupling(double g1, double g2, double w1, double w2, double wr);

struct VzOp {
    int qubit;
    double angle;
};

using ScheduleOp = std::variant<SingleQubitPulse, CrossResonancePulse, VzOp>;
using Schedule = std::vector<ScheduleOp>;

/// Noiseless unitary realized by a schedule (temporal order, first op first),
/// with frame tracking and a final flush.
CMatrix simulate_schedule(const Schedule& schedule, const DeviceModel& dev, int n_qubits);

}  // namespace pulseforge
