#include "pulseforge/pulses.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pulseforge {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

void check_envelope_duration(const PulseEnvelope&, double duration) {
    require(std::isfinite(duration) && duration > 0.0, "pulse duration must be positive");
}

/// Closed-form exp(-i t (ax sx + ay sy + az sz)). Exact for any 2x2
/// traceless Hermitian generator; avoids an eigensolve per pulse step.
CMatrix su2_exp(double ax, double ay, double az, double t) {
    const double r = std::sqrt(ax * ax + ay * ay + az * az);
    CMatrix u(2, 2);
    if (r * std::abs(t) < 1e-300) {
        u = identity(2);
        return u;
    }
    const double c = std::cos(r * t);
    const double s = std::sin(r * t) / r;
    u(0, 0) = Complex(c, -s * az);
    u(0, 1) = Complex(-s * ay, -s * ax);
    u(1, 0) = Complex(s * ay, -s * ax);
    u(1, 1) = Complex(c, s * az);
    return u;
}

CMatrix drive_propagator(double amplitude, double gamma_eff, double detuning, double duration,
                         const PulseEnvelope& envelope) {
    const double ax_unit = 0.5 * std::cos(gamma_eff);
    const double ay_unit = 0.5 * std::sin(gamma_eff);
    const double az = -0.5 * detuning;
    if (envelope.is_constant()) {
        return su2_exp(amplitude * ax_unit, amplitude * ay_unit, az, duration);
    }
    const auto& samples = envelope.samples();
    const double dt = duration / static_cast<double>(samples.size());
    CMatrix u = identity(2);
    for (double s : samples) {
        u = su2_exp(amplitude * s * ax_unit, amplitude * s * ay_unit, az, dt) * u;
    }
    return u;
}

}  // namespace

PulseEnvelope PulseEnvelope::constant() {
    return PulseEnvelope{};
}

PulseEnvelope PulseEnvelope::piecewise(std::vector<double> samples) {
    require(!samples.empty(), "PulseEnvelope: sample list must be non-empty");
    for (double s : samples) {
        require(std::isfinite(s) && s >= 0.0 && s <= 1.0,
                "PulseEnvelope: samples must lie in [0, 1]");
    }
    PulseEnvelope env;
    env.samples_ = std::move(samples);
    return env;
}

SingleQubitPulse::SingleQubitPulse(double amplitude_, double phase_, double detuning_,
                                   double duration_, PulseEnvelope envelope_, int qubit_)
    : amplitude(amplitude_),
      phase(phase_),
      detuning(detuning_),
      duration(duration_),
      envelope(std::move(envelope_)),
      qubit(qubit_) {
    check_envelope_duration(envelope, duration);
    require(std::isfinite(amplitude) && std::isfinite(phase) && std::isfinite(detuning),
            "pulse parameters must be finite");
    if (amplitude < 0.0) {
        amplitude = -amplitude;
        phase += std::numbers::pi;
    }
}

CrossResonancePulse::CrossResonancePulse(double amplitude_, double phase_, double detuning_,
                                         double duration_, PulseEnvelope envelope_, int control_,
                                         int target_)
    : amplitude(amplitude_),
      phase(phase_),
      detuning(detuning_),
      duration(duration_),
      envelope(std::move(envelope_)),
      control(control_),
      target(target_) {
    check_envelope_duration(envelope, duration);
    require(control != target, "CrossResonancePulse: control and target must differ");
    require(std::isfinite(amplitude) && std::isfinite(phase) && std::isfinite(detuning),
            "pulse parameters must be finite");
    if (amplitude < 0.0) {
        amplitude = -amplitude;
        phase += std::numbers::pi;
    }
}

VirtualZFrame vz(VirtualZFrame frames, int qubit, double angle) {
    require(std::isfinite(angle), "vz: angle must be finite");
    frames.phases_.at(qubit) += angle;
    return frames;
}

CMatrix drive_hamiltonian(const SingleQubitPulse& p, double s_value) {
    require(s_value >= 0.0 && s_value <= 1.0, "drive_hamiltonian: s must lie in [0, 1]");
    const double omega = p.amplitude * s_value;
    CMatrix h(2, 2);
    h(0, 0) = -0.5 * p.detuning;
    h(1, 1) = 0.5 * p.detuning;
    h(0, 1) = 0.5 * omega * Complex(std::cos(p.phase), -std::sin(p.phase));
    h(1, 0) = std::conj(h(0, 1));
    return h;
}

CMatrix single_qubit_propagator(const SingleQubitPulse& p, const VirtualZFrame& frame) {
    const double gamma_eff = p.phase - frame.phase(p.qubit);
    return drive_propagator(p.amplitude, gamma_eff, p.detuning, p.duration, p.envelope);
}

CMatrix cr_hamiltonian(const CrossResonancePulse& p, const DeviceModel& dev, double s_value) {
    require(s_value >= 0.0 && s_value <= 1.0, "cr_hamiltonian: s must lie in [0, 1]");
    const int c = p.control;
    const int t = p.target;
    require(c >= 0 && c < 2 && t >= 0 && t < 2, "cr_hamiltonian: qubits must index a pair");
    const double delta_ct = dev.qubits.at(c).frequency - dev.qubits.at(t).frequency;

    const CMatrix zc = embed_one_qubit(sigma_z(), c, 2);
    const CMatrix zt = embed_one_qubit(sigma_z(), t, 2);
    const CMatrix xc = embed_one_qubit(sigma_x(), c, 2);
    const CMatrix yc = embed_one_qubit(sigma_y(), c, 2);
    const CMatrix xt = embed_one_qubit(sigma_x(), t, 2);
    const CMatrix yt = embed_one_qubit(sigma_y(), t, 2);

    CMatrix h = -0.5 * (delta_ct + p.detuning) * zc - 0.5 * p.detuning * zt;
    const double drive = 0.5 * p.amplitude * s_value;
    const double cg = std::cos(p.phase);
    const double sg = std::sin(p.phase);
    h += drive * cg * (xc + dev.mu * (zc * xt) + dev.nu * xt);
    h += drive * sg * (yc + dev.mu * (zc * yt) + dev.nu * yt);
    return h;
}

CMatrix cr_propagator(const CrossResonancePulse& p, const DeviceModel& dev,
                      const VirtualZFrame& frames) {
    CrossResonancePulse shifted = p;
    shifted.phase = p.phase - frames.phase(p.control);
    if (p.envelope.is_constant()) {
        return expm_hermitian(cr_hamiltonian(shifted, dev, 1.0), p.duration);
    }
    const auto& samples = p.envelope.samples();
    const double dt = p.duration / static_cast<double>(samples.size());
    CMatrix u = identity(4);
    for (double s : samples) {
        u = expm_hermitian(cr_hamiltonian(shifted, dev, s), dt) * u;
    }
    return u;
}

FlushedState flush_frames(const DensityMatrix& rho, const VirtualZFrame& frames) {
    require(rho.n_qubits() <= frames.n_qubits(), "flush_frames: frame too small for state");
    const int n = rho.n_qubits();
    CMatrix u = identity(rho.dim());
    for (int q = 0; q < n; ++q) {
        const double phi = frames.phase(q);
        CMatrix rzq(2, 2);
        rzq << std::exp(Complex(0, -0.5 * phi)), 0, 0, std::exp(Complex(0, 0.5 * phi));
        u = embed_one_qubit(rzq, q, n) * u;
    }
    return {apply_unitary(rho, u), VirtualZFrame(frames.n_qubits())};
}

double effective_coupling(double g1, double g2, double w1, double w2, double wr) {
    const double d1 = w1 - wr;
    const double d2 = w2 - wr;
    if (d1 == 0.0 || d2 == 0.0) {
        throw std::domain_error("effective_coupling: qubit resonant with the coupler");
    }
    return g1 * g2 * (w1 + w2 - 2.0 * wr) / (2.0 * d1 * d2);
}

CMatrix simulate_schedule(const Schedule& schedule, const DeviceModel& dev, int n_qubits) {
    require(n_qubits == 1 || n_qubits == 2, "simulate_schedule: 1 or 2 qubits");
    const int dim = 1 << n_qubits;
    VirtualZFrame frames(n_qubits);
    CMatrix u = identity(dim);
    for (const ScheduleOp& op : schedule) {
        if (const auto* p = std::get_if<SingleQubitPulse>(&op)) {
            u = embed_one_qubit(single_qubit_propagator(*p, frames), p->qubit, n_qubits) * u;
        } else if (const auto* cr = std::get_if<CrossResonancePulse>(&op)) {
            require(n_qubits == 2, "simulate_schedule: CR pulse needs two qubits");
            u = cr_propagator(*cr, dev, frames) * u;
        } else {
            const auto& z = std::get<VzOp>(op);
            frames = vz(frames, z.qubit, z.angle);
        }
    }
    for (int q = 0; q < n_qubits; ++q) {
        const double phi = frames.phase(q);
        CMatrix rzq(2, 2);
        rzq << std::exp(Complex(0, -0.5 * phi)), 0, 0, std::exp(Complex(0, 0.5 * phi));
        u = embed_one_qubit(rzq, q, n_qubits) * u;
    }
    return u;
}

}  // namespace pulseforge
