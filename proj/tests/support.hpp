#pragma once

#include <complex>

#include "pulseforge/qcore.hpp"
#include "pulseforge/rng.hpp"

namespace pulseforge::testing {

inline CMatrix random_complex(Rng& rng, int rows, int cols) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    return m;
}

inline CMatrix random_hermitian(Rng& rng, int dim) {
    const CMatrix m = random_complex(rng, dim, dim);
    return 0.5 * (m + m.adjoint().eval());
}

/// Haar-ish random unitary from the QR of a Gaussian matrix; independent of
/// the spectral-decomposition path under test.
inline CMatrix random_unitary(Rng& rng, int dim) {
    const CMatrix m = random_complex(rng, dim, dim);
    Eigen::HouseholderQR<CMatrix> qr(m);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

inline DensityMatrix random_density(Rng& rng, int dim) {
    const CMatrix m = random_complex(rng, dim, dim);
    CMatrix rho = m * m.adjoint();
    rho /= rho.trace();
    return DensityMatrix(0.5 * (rho + rho.adjoint().eval()));
}

inline PureState random_pure(Rng& rng, int dim) {
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(rng.gaussian(), rng.gaussian());
    v /= v.norm();
    return PureState(std::move(v));
}

/// Taylor-series exp(-i h t) with scaling and squaring; brute-force oracle
/// for the spectral-decomposition propagators.
inline CMatrix expm_taylor(const CMatrix& h, double t) {
    const int dim = static_cast<int>(h.rows());
    CMatrix a = Complex(0.0, -t) * h;
    int squarings = 0;
    while (a.cwiseAbs().maxCoeff() > 0.25) {
        a *= 0.5;
        ++squarings;
    }
    CMatrix result = CMatrix::Identity(dim, dim);
    CMatrix term = CMatrix::Identity(dim, dim);
    for (int k = 1; k <= 24; ++k) {
        term = (term * a / static_cast<double>(k)).eval();
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = (result * result).eval();
    return result;
}

}  // namespace pulseforge::testing
