#include "pulseforge/qcore.hpp"

#include <cmath>
#include <stdexcept>

namespace pulseforge {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

CMatrix identity(int dim) {
    return CMatrix::Identity(dim, dim);
}

const CMatrix& sigma_x() {
    static const CMatrix m = [] {
        CMatrix s(2, 2);
        s << 0, 1, 1, 0;
        return s;
    }();
    return m;
}

const CMatrix& sigma_y() {
    static const CMatrix m = [] {
        CMatrix s(2, 2);
        s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
        return s;
    }();
    return m;
}

const CMatrix& sigma_z() {
    static const CMatrix m = [] {
        CMatrix s(2, 2);
        s << 1, 0, 0, -1;
        return s;
    }();
    return m;
}

double max_abs(const CMatrix& m) {
    return m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& m, double tolerance) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) <= tolerance;
}

bool is_unitary(const CMatrix& m, double tolerance) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())) <= tolerance;
}

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    const auto n = amplitudes_.size();
    require(n == 2 || n == 4, "PureState: dimension must be 2 or 4");
    require(std::abs(amplitudes_.squaredNorm() - 1.0) <= 1e-10,
            "PureState: squared norm must be 1 within 1e-10");
}

PureState PureState::basis(int dim, int index) {
    CVector v = CVector::Zero(dim);
    v(index) = 1.0;
    return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(CMatrix m) : matrix_(std::move(m)) {
    const auto n = matrix_.rows();
    require(matrix_.cols() == n && (n == 2 || n == 4),
            "DensityMatrix: must be square with dimension 2 or 4");
    require(is_hermitian(matrix_, tol::hermitian),
            "DensityMatrix: not Hermitian within 1e-10");
    require(std::abs(matrix_.trace().real() - 1.0) <= tol::trace_one &&
                std::abs(matrix_.trace().imag()) <= tol::trace_one,
            "DensityMatrix: trace must be 1 within 1e-10");
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
    const CVector& a = psi.amplitudes();
    return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::ground(int n_qubits) {
    require(n_qubits == 1 || n_qubits == 2, "ground: 1 or 2 qubits");
    return pure(PureState::basis(1 << n_qubits, 0));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const {
    return (matrix_ * matrix_).trace().real();
}

bool DensityMatrix::is_physical(double floor) const {
    return min_eigenvalue() >= floor;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix expm_hermitian(const CMatrix& h, double t) {
    require(h.rows() == h.cols(), "expm_hermitian: matrix must be square");
    require(is_hermitian(h, tol::hermitian), "expm_hermitian: generator not Hermitian within 1e-10");
    // Symmetrize so the solver sees an exactly Hermitian input.
    const CMatrix hs = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hs);
    const auto& vals = es.eigenvalues();
    const CMatrix& vecs = es.eigenvectors();
    CVector phases(vals.size());
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
        phases(k) = std::exp(Complex(0.0, -vals(k) * t));
    }
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const CMatrix& u) {
    require(u.rows() == rho.dim() && u.cols() == rho.dim(),
            "apply_unitary: dimension mismatch");
    return DensityMatrix(u * rho.matrix() * u.adjoint());
}

DensityMatrix partial_trace_keep_first(const DensityMatrix& rho) {
    require(rho.dim() == 4, "partial_trace_keep_first: state must be two-qubit");
    const CMatrix& m = rho.matrix();
    CMatrix out(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
    return DensityMatrix(std::move(out));
}

double fidelity_pure(const PureState& target, const DensityMatrix& rho) {
    require(target.dim() == rho.dim(), "fidelity_pure: dimension mismatch");
    const Complex f = (target.amplitudes().adjoint() * rho.matrix() * target.amplitudes())(0);
    return std::clamp(f.real(), 0.0, 1.0);
}

CMatrix embed_one_qubit(const CMatrix& u, int qubit, int n_qubits) {
    require(u.rows() == 2 && u.cols() == 2, "embed_one_qubit: operator must be 2x2");
    require(qubit >= 0 && qubit < n_qubits, "embed_one_qubit: qubit index out of range");
    if (n_qubits == 1) return u;
    return qubit == 0 ? kron(u, identity(2)) : kron(identity(2), u);
}

}  // namespace pulseforge
