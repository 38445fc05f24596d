#pragma once

#include <complex>

#include <Eigen/Dense>

namespace pulseforge {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double trace_one = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double eigenvalue_floor = -1e-9;
}  // namespace tol

CMatrix identity(int dim);
const CMatrix& sigma_x();
const CMatrix& sigma_y();
const CMatrix& sigma_z();

double max_abs(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double tolerance = tol::hermitian);
bool is_unitary(const CMatrix& m, double tolerance = tol::unitary);

/// Normalized state vector of one or two qubits. Qubit 1 is the first
/// (leftmost) tensor factor; basis index = 2*q1 + q2 for two qubits.
class PureState {
public:
    explicit PureState(CVector amplitudes);

    static PureState basis(int dim, int index);

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const CVector& amplitudes() const { return amplitudes_; }

private:
    CVector amplitudes_;
};

/// Mixed state of one or two qubits. Construction enforces Hermiticity and
/// unit trace; positivity is available as a separate check because repeated
/// channel application only guarantees eigenvalues down to -1e-9.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix m);

    static DensityMatrix pure(const PureState& psi);
    static DensityMatrix ground(int n_qubits);
    static DensityMatrix maximally_mixed(int dim);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    int n_qubits() const { return dim() == 2 ? 1 : 2; }
    const CMatrix& matrix() const { return matrix_; }

    double min_eigenvalue() const;
    double purity() const;
    bool is_physical(double floor = tol::eigenvalue_floor) const;

private:
    CMatrix matrix_;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Propagator exp(-i h t) of a Hermitian generator, computed by spectral
/// decomposition. Throws if h is not Hermitian within 1e-10.
CMatrix expm_hermitian(const CMatrix& h, double t);

DensityMatrix apply_unitary(const DensityMatrix& rho, const CMatrix& u);

/// Reduced state of qubit 1 (the first tensor factor) of a two-qubit state.
DensityMatrix partial_trace_keep_first(const DensityMatrix& rho);

/// <target|rho|target>, clamped to [0, 1].
double fidelity_pure(const PureState& target, const DensityMatrix& rho);

/// Embeds a single-qubit operator at position `qubit` of an n-qubit register
/// (qubit 0 = first tensor factor).
CMatrix embed_one_qubit(const CMatrix& u, int qubit, int n_qubits);

}  // namespace pulseforge
