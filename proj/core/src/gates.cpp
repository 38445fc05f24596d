#include "pulseforge/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pulseforge {

namespace {

constexpr double pi = std::numbers::pi;

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

CMatrix rx(double theta) {
    CMatrix m(2, 2);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    m << Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0);
    return m;
}

CMatrix ry(double theta) {
    CMatrix m(2, 2);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    m << c, -s, s, c;
    return m;
}

CMatrix rz(double theta) {
    CMatrix m(2, 2);
    m << std::exp(Complex(0, -0.5 * theta)), 0, 0, std::exp(Complex(0, 0.5 * theta));
    return m;
}

CMatrix su2_from_euler(const EulerAngles& a) {
    return rz(a.theta1) * ry(a.theta2) * rz(a.theta3);
}

EulerAngles euler_from_su2(const CMatrix& u) {
    require(u.rows() == 2 && u.cols() == 2, "euler_from_su2: matrix must be 2x2");
    if (!is_unitary(u, 1e-8)) throw std::invalid_argument("euler_from_su2: input not unitary");

    // Strip the global phase so the matrix lands in SU(2).
    const Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    const CMatrix su = u / std::sqrt(det);

    const double c = std::abs(su(0, 0));
    const double s = std::abs(su(1, 0));
    EulerAngles out;
    out.theta2 = 2.0 * std::atan2(s, c);
    if (s < 1e-14) {
        out.theta1 = -2.0 * std::arg(su(0, 0));
        out.theta3 = 0.0;
    } else if (c < 1e-14) {
        out.theta1 = 2.0 * std::arg(su(1, 0));
        out.theta3 = 0.0;
    } else {
        const double half_sum = -std::arg(su(0, 0));
        const double half_diff = std::arg(su(1, 0));
        out.theta1 = half_sum + half_diff;
        out.theta3 = half_sum - half_diff;
    }
    return out;
}

std::vector<NativeOp> u3_sx_vz_sequence(double theta, double phi, double lambda,
                                        double oneq_duration_ns, int qubit) {
    // RZ(phi) . SX . RZ(pi - theta) . SX . RZ(lambda - pi) == RZ(phi) RY(theta) RZ(lambda),
    // since SX RZ(pi - theta) SX = RY(theta) RZ(pi).
    return {
        {NativeKind::RzVirtual, {lambda - pi}, {qubit}, 0.0},
        {NativeKind::Sx, {}, {qubit}, oneq_duration_ns},
        {NativeKind::RzVirtual, {pi - theta}, {qubit}, 0.0},
        {NativeKind::Sx, {}, {qubit}, oneq_duration_ns},
        {NativeKind::RzVirtual, {phi}, {qubit}, 0.0},
    };
}

CMatrix controlled_su2(const EulerAngles& a) {
    CMatrix p0(2, 2), p1(2, 2);
    p0 << 1, 0, 0, 0;
    p1 << 0, 0, 0, 1;
    return kron(identity(2), p0) + kron(su2_from_euler(a), p1);
}

std::vector<NativeOp> decompose_controlled_su2(const EulerAngles& a, double oneq_duration_ns,
                                               double twoq_duration_ns, int target_qubit,
                                               int control_qubit) {
    // A X B X C = U and A B C = I, with
    //   A = RZ(t1) RY(t2/2), B = RY(-t2/2) RZ(-(t1+t3)/2), C = RZ((t3-t1)/2).
    const double t1 = a.theta1;
    const double t2 = a.theta2;
    const double t3 = a.theta3;
    const int t = target_qubit;
    return {
        {NativeKind::RzVirtual, {0.5 * (t3 - t1)}, {t}, 0.0},
        {NativeKind::Cnot, {}, {control_qubit, target_qubit}, twoq_duration_ns},
        {NativeKind::RzVirtual, {-0.5 * (t1 + t3)}, {t}, 0.0},
        {NativeKind::RyPulse, {-0.5 * t2}, {t}, oneq_duration_ns},
        {NativeKind::Cnot, {}, {control_qubit, target_qubit}, twoq_duration_ns},
        {NativeKind::RyPulse, {0.5 * t2}, {t}, oneq_duration_ns},
        {NativeKind::RzVirtual, {t1}, {t}, 0.0},
    };
}

CMatrix cnot_matrix(int control, int target) {
    require(control != target && control >= 0 && control < 2 && target >= 0 && target < 2,
            "cnot_matrix: needs distinct qubits 0 and 1");
    CMatrix p0(2, 2), p1(2, 2);
    p0 << 1, 0, 0, 0;
    p1 << 0, 0, 0, 1;
    if (control == 0) return kron(p0, identity(2)) + kron(p1, sigma_x());
    return kron(identity(2), p0) + kron(sigma_x(), p1);
}

CMatrix native_op_unitary(const NativeOp& op, int n_qubits) {
    switch (op.kind) {
        case NativeKind::RzVirtual:
            return embed_one_qubit(rz(op.params.at(0)), op.qubits.at(0), n_qubits);
        case NativeKind::Sx:
            return embed_one_qubit(rx(0.5 * pi), op.qubits.at(0), n_qubits);
        case NativeKind::X:
            return embed_one_qubit(rx(pi), op.qubits.at(0), n_qubits);
        case NativeKind::RyPulse:
            return embed_one_qubit(ry(op.params.at(0)), op.qubits.at(0), n_qubits);
        case NativeKind::Cnot:
            require(n_qubits == 2, "native_op_unitary: CNOT needs two qubits");
            return cnot_matrix(op.qubits.at(0), op.qubits.at(1));
        case NativeKind::ControlledSu2:
            require(n_qubits == 2, "native_op_unitary: controlled-SU(2) needs two qubits");
            return controlled_su2({op.params.at(0), op.params.at(1), op.params.at(2)});
    }
    throw std::invalid_argument("native_op_unitary: unknown op");
}

namespace {

/// Traceless X_t-sector Hamiltonians of the CR drive at gamma = 0, delta = 0:
/// h_pm = (-Delta/2 +- mu Omega/2) Z + (Omega/2) X acting on the control.
/// The nu crosstalk term only adds opposite sector phases, handled separately.
CMatrix cr_sector_unitary(double omega, double delta12, double mu, double duration, int sign) {
    const double az = -0.5 * delta12 + sign * 0.5 * mu * omega;
    const double ax = 0.5 * omega;
    CMatrix h(2, 2);
    h << az, ax, ax, -az;
    return expm_hermitian(h, duration);
}

/// The schedule implements a CNOT iff tr(u_plus^dag u_minus) = 0 (the two
/// sector rotations then differ by a pi rotation).
double cnot_condition(double omega, double delta12, double mu, double duration) {
    const CMatrix up = cr_sector_unitary(omega, delta12, mu, duration, +1);
    const CMatrix um = cr_sector_unitary(omega, delta12, mu, duration, -1);
    return (up.adjoint() * um).trace().real();
}

/// Target-qubit rotation expressed with physical pulses only (XYX Euler
/// axes), so no virtual-Z phase is pending when the CR pulse fires.
void emit_xyx_block(Schedule& schedule, const CMatrix& u, int qubit, double oneq_ns) {
    static const CMatrix h = [] {
        CMatrix m(2, 2);
        m << 1, 1, 1, -1;
        return CMatrix(m / std::sqrt(2.0));
    }();
    // RX(a) RY(b) RX(c) = H RZ(a) RY(-b) RZ(c) H, so read the angles off the
    // ZYZ decomposition of H u H.
    const EulerAngles e = euler_from_su2(h * u * h);
    const auto pulse = [&](double angle, double gamma) {
        if (std::abs(angle) < 1e-15) return;
        schedule.push_back(
            SingleQubitPulse(angle / oneq_ns, gamma, 0.0, oneq_ns, PulseEnvelope::constant(), qubit));
    };
    pulse(e.theta3, 0.0);        // RX(theta3)
    pulse(-e.theta2, 0.5 * pi);  // RY(-theta2)
    pulse(e.theta1, 0.0);        // RX(theta1)
}

/// Standard block: VZ(t3), resonant pulse about Y, VZ(t1) realizes
/// RZ(t1) RY(t2) RZ(t3) once frames are flushed.
void emit_zyz_block(Schedule& schedule, const CMatrix& u, int qubit, double oneq_ns) {
    const EulerAngles e = euler_from_su2(u);
    if (std::abs(e.theta3) > 1e-15) schedule.push_back(VzOp{qubit, e.theta3});
    if (std::abs(e.theta2) > 1e-15) {
        schedule.push_back(SingleQubitPulse(e.theta2 / oneq_ns, 0.5 * pi, 0.0, oneq_ns,
                                            PulseEnvelope::constant(), qubit));
    }
    if (std::abs(e.theta1) > 1e-15) schedule.push_back(VzOp{qubit, e.theta1});
}

}  // namespace

Schedule cnot_from_cr_blocks(const DeviceModel& dev) {
    if (dev.mu == 0.0) {
        throw std::invalid_argument("cnot_from_cr_blocks: device has no entangling interaction");
    }
    require(dev.qubits.size() >= 2, "cnot_from_cr_blocks: device needs two qubits");
    const int control = 0;
    const int target = 1;
    const double duration = dev.twoq_duration_ns;
    const double delta12 = dev.delta12();
    const double mu = dev.mu;

    // Calibrate the CR amplitude. For degenerate qubits with |mu| = 1 the
    // sector axes are orthogonal and the overlap condition only touches
    // zero, but the root is closed-form: Omega T sqrt(1 + mu^2) = pi.
    // Otherwise bracket a sign change around the leading-order guess
    // Omega0 = pi / (2 mu T) and bisect to machine precision.
    double omega;
    if (delta12 == 0.0 && std::abs(std::abs(mu) - 1.0) < 1e-12) {
        omega = pi / (duration * std::sqrt(1.0 + mu * mu));
    } else {
        const double omega0 = pi / (2.0 * std::abs(mu) * duration);
        double lo = 0.0, hi = 0.0;
        double prev_omega = 0.05 * omega0;
        double prev_val = cnot_condition(prev_omega, delta12, mu, duration);
        bool bracketed = false;
        for (int i = 1; i <= 400 && !bracketed; ++i) {
            const double om = 0.05 * omega0 + (3.0 * omega0 - 0.05 * omega0) * i / 400.0;
            const double val = cnot_condition(om, delta12, mu, duration);
            if ((prev_val <= 0.0) != (val <= 0.0)) {
                lo = prev_omega;
                hi = om;
                bracketed = true;
            }
            prev_omega = om;
            prev_val = val;
        }
        if (!bracketed) {
            throw std::runtime_error("cnot_from_cr_blocks: no CNOT-compatible CR amplitude found");
        }
        double flo = cnot_condition(lo, delta12, mu, duration);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fmid = cnot_condition(mid, delta12, mu, duration);
            if ((flo <= 0.0) == (fmid <= 0.0)) {
                lo = mid;
                flo = fmid;
            } else {
                hi = mid;
            }
        }
        omega = 0.5 * (lo + hi);
    }

    // Local dressing. In the target-X eigenbasis the CR propagator is
    // block-diagonal, U = u_plus (+) u_minus; with B mapping the axis of
    // w = u_plus^dag u_minus onto Z and A = B^dag u_plus^dag, the dressed
    // propagator acts as the identity on one sector and as a Z pi-rotation
    // on the other, which is CNOT up to one target X-rotation.
    const CMatrix up = cr_sector_unitary(omega, delta12, mu, duration, +1);
    const CMatrix um = cr_sector_unitary(omega, delta12, mu, duration, -1);
    const CMatrix w = up.adjoint() * um;

    const double nx = -w(1, 0).imag();
    const double ny = w(1, 0).real();
    const double nz = -w(0, 0).imag();
    CMatrix axis(2, 2);
    axis << nz, Complex(nx, -ny), Complex(nx, ny), -nz;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(axis);
    CMatrix b_dress(2, 2);
    b_dress.col(0) = es.eigenvectors().col(1);  // +1 eigenvector first
    b_dress.col(1) = es.eigenvectors().col(0);
    const CMatrix a_dress = (b_dress.adjoint() * up.adjoint()).eval();

    // The nu crosstalk commutes with the rest of the drive and only imposes
    // opposite phases on the two sectors; fold it into the final target
    // X-rotation together with the -i of the Z pi-rotation.
    const double alpha = 0.5 * pi - dev.nu * omega * duration;

    const double oneq_c = dev.qubits.at(control).oneq_duration_ns;
    const double oneq_t = dev.qubits.at(target).oneq_duration_ns;

    Schedule schedule;
    emit_xyx_block(schedule, b_dress, control, oneq_c);
    schedule.push_back(
        CrossResonancePulse(omega, 0.0, 0.0, duration, PulseEnvelope::constant(), control, target));
    emit_zyz_block(schedule, a_dress, control, oneq_c);
    if (std::abs(alpha) > 1e-15) {
        schedule.push_back(SingleQubitPulse(alpha / oneq_t, 0.0, 0.0, oneq_t,
                                            PulseEnvelope::constant(), target));
    }

    const CMatrix realized = simulate_schedule(schedule, dev, 2);
    const double dist = phase_aligned_distance(realized, cnot_matrix(control, target));
    if (dist > 1e-6) {
        throw std::runtime_error("cnot_from_cr_blocks: calibration missed the CNOT target");
    }
    return schedule;
}

double phase_aligned_distance(const CMatrix& u, const CMatrix& v) {
    require(u.rows() == v.rows() && u.cols() == v.cols(),
            "phase_aligned_distance: shape mismatch");
    Eigen::Index bi = 0, bj = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            if (std::abs(v(i, j)) > best) {
                best = std::abs(v(i, j));
                bi = i;
                bj = j;
            }
        }
    }
    if (best <= 0.0 || std::abs(u(bi, bj)) == 0.0) return max_abs(u - v);
    const Complex phase = (u(bi, bj) / std::abs(u(bi, bj))) * (std::abs(v(bi, bj)) / v(bi, bj));
    return max_abs(u - phase * v);
}

}  // namespace pulseforge
