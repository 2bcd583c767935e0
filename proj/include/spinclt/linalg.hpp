#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>

namespace spinclt {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

namespace linalg {

/// Matrix exponential by scaling and squaring with a diagonal Pade approximant
/// (degrees 3..13, chosen from the 1-norm).
CMatrix expm(const CMatrix& a);

/// exp(i t H) for Hermitian H through its eigendecomposition.
CMatrix expm_i_hermitian(const CMatrix& h, double t = 1.0);

/// Largest singular value.
double op_norm(const CMatrix& a);

/// Frobenius norm of A - A^*.
double hermiticity_defect(const CMatrix& a);
bool is_hermitian(const CMatrix& a, double tol = 1e-12);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

/// Kronecker product of a list of factors, leftmost first.
CMatrix kron_all(std::span<const CMatrix> factors);
CVector kron_all(std::span<const CVector> factors);

/// (A_0 (x) A_1 (x) ...) psi without forming the Kronecker product.
CVector apply_kron(std::span<const CMatrix> factors, const CVector& psi);

/// Largest absolute entry of A - B.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// Ascending eigenvalues of a Hermitian matrix.
RVector eigvalsh(const CMatrix& h);

}  // namespace linalg
}  // namespace spinclt
