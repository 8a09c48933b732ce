#pragma once

// Dense complex linear algebra used throughout the library: row-major
// vectorization of qubit operators, Kronecker products, Hermitian
// eigendecomposition with a deterministic gauge, unitary propagators and the
// bath partial trace.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace finbath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Fixed-size carriers for qubit operators and their superoperators.
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr double kDefaultTol = 1e-10;

namespace matkit {

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
struct Spectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

bool is_square(const ComplexMatrix& m);
bool is_finite(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol);
bool is_traceless(const ComplexMatrix& m, double tol = kDefaultTol);
/// Hermitian, unit trace and positive semidefinite, all within `tol`.
bool is_density_matrix(const ComplexMatrix& m, double tol = kDefaultTol);

/// Throws InvalidArgument naming `what` unless `m` is a valid density matrix.
void require_density_matrix(const ComplexMatrix& m, const char* what,
                            double tol = kDefaultTol);

double max_abs(const ComplexMatrix& m);

/// vec(|j><k|) = |j> (x) |k>, i.e. (M00, M01, M10, M11).
Vec4 vec(const ComplexMatrix& m);
Mat2 devec(const ComplexVector& v);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Superoperator of rho -> A rho B in the row-major vec convention.
Mat4 sandwich(const Mat2& left, const Mat2& right);

/// Hermitian eigendecomposition. Within each eigenvalue cluster (gaps below
/// 1e-9 relative to max(1, |lambda|_max)) the basis is rebuilt by projecting
/// the standard basis vectors, so the result does not depend on the solver's
/// arbitrary rotation inside degenerate subspaces. Each eigenvector is then
/// rotated so that its first largest-modulus component is real and positive,
/// and vectors of a cluster are ordered by descending lexicographic moduli.
Spectrum hermitian_eig(const ComplexMatrix& m, double tol = kDefaultTol);

/// exp(-i H t) for Hermitian H, computed through hermitian_eig.
ComplexMatrix expm_hermitian_generator(const ComplexMatrix& h, double t,
                                       double tol = kDefaultTol);

/// Tr_B of an operator on C^2 (x) C^{d_B}; the system is the first factor.
Mat2 partial_trace_bath(const ComplexMatrix& rho_sb, std::size_t bath_dim);

/// Orthonormal basis of span(columns) obtained by projecting e_0, e_1, ... and
/// Gram-Schmidt; each vector phase fixed as in hermitian_eig.
ComplexMatrix canonical_basis(const ComplexMatrix& columns);

/// Rotates `v` in place so its first largest-modulus entry is real >= 0.
void fix_phase(Eigen::Ref<ComplexVector> v);

namespace pauli {
Mat2 identity();
Mat2 x();
Mat2 y();
Mat2 z();
/// |0><1|; |0> is the sigma_z = +1 (excited) state.
Mat2 plus();
/// |1><0|
Mat2 minus();
}  // namespace pauli

/// Neumaier compensated summation.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + c_; }

 private:
  T sum_{};
  T c_{};
};

template <>
class CompensatedSum<Complex> {
 public:
  void add(Complex x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<double> re_, im_;
};

}  // namespace matkit
}  // namespace finbath
