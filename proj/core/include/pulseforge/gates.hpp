#pragma once

#include <vector>

#include "pulseforge/noise.hpp"
#include "pulseforge/pulses.hpp"
#include "pulseforge/qcore.hpp"

namespace pulseforge {

/// ZYZ rotation angles: U = RZ(theta1) RY(theta2) RZ(theta3), with
/// R_A(t) = exp(-i t/2 sigma_A). Decompositions return theta2 in [0, pi].
struct EulerAngles {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
};

enum class NativeKind { RzVirtual, Sx, X, RyPulse, Cnot, ControlledSu2 };

struct NativeOp {
    NativeKind kind;
    std::vector<double> params;
    std::vector<int> qubits;
    double duration_ns = 0.0;  // exactly 0 for RzVirtual
};

CMatrix rx(double theta);
CMatrix ry(double theta);
CMatrix rz(double theta);

CMatrix su2_from_euler(const EulerAngles& a);

/// Inverse of su2_from_euler up to global phase. At the theta2 in {0, pi}
/// singularities the convention theta3 = 0 breaks the tie.
EulerAngles euler_from_su2(const CMatrix& u);

/// U(theta, phi, lambda) ~ RZ(phi) RY(theta) RZ(lambda) as three virtual RZ
/// and two physical SX ops, listed in temporal order.
std::vector<NativeOp> u3_sx_vz_sequence(double theta, double phi, double lambda,
                                        double oneq_duration_ns, int qubit = 0);

/// Identity when qubit 2 (the control) is |0>, su2_from_euler(a) on qubit 1
/// when it is |1>.
CMatrix controlled_su2(const EulerAngles& a);

/// ABC decomposition of controlled_su2(a): target-qubit rotations around two
/// CNOTs, listed in temporal order. Exactly two two-qubit ops.
std::vector<NativeOp> decompose_controlled_su2(const EulerAngles& a, double oneq_duration_ns,
                                               double twoq_duration_ns, int target_qubit = 0,
                                               int control_qubit = 1);

/// CNOT on a two-qubit register (first tensor factor = qubit 0).
CMatrix cnot_matrix(int control, int target);

/// Dense unitary realized by one native op on an n-qubit register.
CMatrix native_op_unitary(const NativeOp& op, int n_qubits);

/// Pulse schedule (single-qubit pulses, VZ rotations, one CR pulse) whose
/// noiseless propagator is the CNOT with the CR control as control qubit.
/// The CR amplitude is calibrated numerically for the device's mu, nu and
/// qubit detuning; throws if the device has no entangling interaction.
Schedule cnot_from_cr_blocks(const DeviceModel& dev);

/// max |u - e^{i phi} v| with phi chosen to align the largest-magnitude
/// entry of v with the corresponding entry of u.
double phase_aligned_distance(const CMatrix& u, const CMatrix& v);

}  // namespace pulseforge
