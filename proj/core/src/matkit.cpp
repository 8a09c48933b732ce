#include "finbath/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "finbath/errors.hpp"

namespace finbath::matkit {

bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols() && m.rows() > 0; }

bool is_finite(const ComplexMatrix& m) { return m.allFinite(); }

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return is_square(m) && max_abs(m - m.adjoint()) <= tol;
}

bool is_traceless(const ComplexMatrix& m, double tol) {
  return is_square(m) && std::abs(m.trace()) <= tol;
}

bool is_density_matrix(const ComplexMatrix& m, double tol) {
  if (!is_square(m) || !is_finite(m) || !is_hermitian(m, tol)) return false;
  if (std::abs(m.trace() - 1.0) > tol) return false;
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

void require_density_matrix(const ComplexMatrix& m, const char* what, double tol) {
  if (!is_density_matrix(m, tol)) {
    throw InvalidArgument(std::string(what) + " is not a valid density matrix");
  }
}

Vec4 vec(const ComplexMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw DimensionError("vec expects a 2x2 matrix, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  return Vec4(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

Mat2 devec(const ComplexVector& v) {
  if (v.size() != 4) {
    throw DimensionError("devec expects 4 components, got " + std::to_string(v.size()));
  }
  Mat2 m;
  m << v(0), v(1), v(2), v(3);
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Mat4 sandwich(const Mat2& left, const Mat2& right) {
  // vec(A X B) = (A (x) B^T) vec(X) for row-major stacking.
  return Eigen::kroneckerProduct(left, right.transpose()).eval();
}

void fix_phase(Eigen::Ref<ComplexVector> v) {
  if (v.size() == 0) return;
  const double largest = v.cwiseAbs().maxCoeff();
  if (largest == 0.0) return;
  Eigen::Index pivot = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= largest * (1.0 - 1e-9)) {
      pivot = i;
      break;
    }
  }
  v *= std::conj(v(pivot)) / std::abs(v(pivot));
}

namespace {

// Descending lexicographic order on component moduli.
bool lex_moduli_greater(const ComplexVector& a, const ComplexVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double da = std::abs(a(i));
    const double db = std::abs(b(i));
    if (std::abs(da - db) > 1e-12) return da > db;
  }
  return false;
}

}  // namespace

ComplexMatrix canonical_basis(const ComplexMatrix& columns) {
  const Eigen::Index n = columns.rows();
  const Eigen::Index k = columns.cols();
  ComplexMatrix out(n, k);
  if (k == 0) return out;
  // Projector onto the span; columns are assumed orthonormal up to rounding,
  // so orthonormalize them first.
  Eigen::HouseholderQR<ComplexMatrix> qr(columns);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, k);
  const ComplexMatrix projector = q * q.adjoint();

  Eigen::Index accepted = 0;
  for (Eigen::Index i = 0; i < n && accepted < k; ++i) {
    ComplexVector w = projector.col(i);
    for (Eigen::Index j = 0; j < accepted; ++j) {
      w -= out.col(j) * out.col(j).dot(w);
    }
    const double norm = w.norm();
    if (norm > 1e-6) {
      out.col(accepted++) = w / norm;
    }
  }
  // Projections of e_i always span a k-dimensional subspace, but guard against
  // rounding leaving fewer than k acceptable directions.
  if (accepted < k) out = q;

  std::vector<ComplexVector> vs;
  for (Eigen::Index j = 0; j < k; ++j) {
    ComplexVector v = out.col(j);
    fix_phase(v);
    vs.push_back(std::move(v));
  }
  std::stable_sort(vs.begin(), vs.end(), lex_moduli_greater);
  for (Eigen::Index j = 0; j < k; ++j) out.col(j) = vs[static_cast<std::size_t>(j)];
  return out;
}

Spectrum hermitian_eig(const ComplexMatrix& m, double tol) {
  if (!is_square(m)) throw DimensionError("hermitian_eig expects a square matrix");
  if (!is_finite(m)) throw InvalidArgument("hermitian_eig: non-finite entries");
  if (!is_hermitian(m, tol)) throw InvalidArgument("hermitian_eig: matrix is not Hermitian");

  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) throw Error("hermitian_eig: eigensolver failed");

  Spectrum s{es.eigenvalues(), es.eigenvectors()};
  const Eigen::Index n = s.eigenvalues.size();
  const double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
  const double gap = 1e-9 * scale;

  Eigen::Index begin = 0;
  while (begin < n) {
    Eigen::Index end = begin + 1;
    while (end < n && s.eigenvalues(end) - s.eigenvalues(end - 1) < gap) ++end;
    const Eigen::Index size = end - begin;
    if (size == 1) {
      ComplexVector v = s.eigenvectors.col(begin);
      fix_phase(v);
      s.eigenvectors.col(begin) = v;
    } else {
      s.eigenvectors.middleCols(begin, size) =
          canonical_basis(s.eigenvectors.middleCols(begin, size));
    }
    begin = end;
  }
  return s;
}

ComplexMatrix expm_hermitian_generator(const ComplexMatrix& h, double t, double tol) {
  const Spectrum s = hermitian_eig(h, tol);
  ComplexVector phases(s.eigenvalues.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::exp(Complex(0.0, -s.eigenvalues(i) * t));
  }
  return s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
}

Mat2 partial_trace_bath(const ComplexMatrix& rho_sb, std::size_t bath_dim) {
  const auto d = static_cast<Eigen::Index>(bath_dim);
  if (bath_dim == 0 || rho_sb.rows() != 2 * d || rho_sb.cols() != 2 * d) {
    throw DimensionError("partial_trace_bath: expected a " + std::to_string(2 * bath_dim) +
                         "x" + std::to_string(2 * bath_dim) + " matrix");
  }
  Mat2 out;
  for (Eigen::Index s = 0; s < 2; ++s) {
    for (Eigen::Index sp = 0; sp < 2; ++sp) {
      out(s, sp) = rho_sb.block(s * d, sp * d, d, d).trace();
    }
  }
  return out;
}

namespace pauli {

Mat2 identity() { return Mat2::Identity(); }

Mat2 x() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Mat2 y() {
  Mat2 m;
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

Mat2 z() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Mat2 plus() {
  Mat2 m = Mat2::Zero();
  m(0, 1) = 1.0;
  return m;
}

Mat2 minus() {
  Mat2 m = Mat2::Zero();
  m(1, 0) = 1.0;
  return m;
}

}  // namespace pauli
}  // namespace finbath::matkit
