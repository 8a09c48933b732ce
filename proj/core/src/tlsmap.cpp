#include "finbath/tlsmap.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "finbath/errors.hpp"

namespace finbath::tlsmap {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Mat4 assemble(const TlsMapParams& p, double one = 1.0) {
  Mat4 m;
  // clang-format off
  m << p.phi11,       p.phi12,             std::conj(p.phi12),  one - p.phi44,
       p.phi21,       p.phi22,             p.phi23,             p.phi24,
       std::conj(p.phi21), std::conj(p.phi23), std::conj(p.phi22), std::conj(p.phi24),
       one - p.phi11, -p.phi12,            -std::conj(p.phi12), p.phi44;
  // clang-format on
  return m;
}

Mat2 apply_super(const Mat4& s, const Mat2& x) { return matkit::devec(s * matkit::vec(x)); }

Mat2 phase_rotation(double phi) {
  Mat2 u = Mat2::Zero();
  u(0, 0) = std::exp(Complex(0.0, -phi));
  u(1, 1) = std::exp(Complex(0.0, phi));
  return u;
}

}  // namespace

TlsMap::TlsMap() : params_{}, matrix_(Mat4::Identity()) {}

Mat2 TlsMap::operator()(const Mat2& x) const { return apply_super(matrix_, x); }

TlsMap build_map(const TlsMapParams& p) {
  if (!std::isfinite(p.phi11) || !std::isfinite(p.phi44) || !finite(p.phi12) ||
      !finite(p.phi21) || !finite(p.phi22) || !finite(p.phi23) || !finite(p.phi24)) {
    throw InvalidArgument("build_map: non-finite map element");
  }
  return TlsMap(p, assemble(p));
}

Mat4 map_matrix_derivative(const TlsMapParams& d) { return assemble(d, 0.0); }

Mat2 apply_map(const TlsMap& map, const Mat2& rho, double tol) {
  matkit::require_density_matrix(rho, "apply_map input", tol);
  return map(rho);
}

double phase_covariance_residual(const TlsMap& map, double phi, const Mat2& rho) {
  const Mat2 u = phase_rotation(phi);
  const Mat2 lhs = u * map(rho) * u.adjoint();
  const Mat2 rhs = map(u * rho * u.adjoint());
  return matkit::max_abs(lhs - rhs);
}

// ---------------------------------------------------------------------------

MapSource make_map_source(std::function<TlsMap(double)> map,
                          std::function<Mat4(double)> derivative) {
  return MapSource{[m = std::move(map)](double t) { return m(t).matrix(); },
                   std::move(derivative)};
}

Mat4 map_derivative(const MapSource& source, double t, const DerivativeMode& mode) {
  if (std::holds_alternative<AnalyticDerivative>(mode) && source.derivative) {
    return source.derivative(t);
  }
  double h = std::holds_alternative<FiniteDifference>(mode) ? std::get<FiniteDifference>(mode).step
                                                            : 0.0;
  if (!(h > 0.0)) h = 1e-5 * std::max(1.0, std::abs(t));
  const auto& f = source.map;
  if (t - 2.0 * h >= 0.0) {
    return (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h);
  }
  // Maps are only defined for t >= 0.
  return (-25.0 * f(t) + 48.0 * f(t + h) - 36.0 * f(t + 2.0 * h) + 16.0 * f(t + 3.0 * h) -
          3.0 * f(t + 4.0 * h)) /
         (12.0 * h);
}

Mat4 generator_matrix(const MapSource& source, double t, const DerivativeMode& mode) {
  if (!source.map) throw InvalidArgument("generator_matrix: empty map source");
  const Mat4 phi = source.map(t);
  if (!phi.allFinite()) throw InvalidArgument("generator_matrix: non-finite map at t");
  const double det = std::abs(phi.determinant());
  if (det <= kSingularDeterminant) {
    throw SingularMap("map is not invertible at t = " + std::to_string(t) +
                          " (|det| = " + std::to_string(det) + ")",
                      t);
  }
  const Mat4 dphi = map_derivative(source, t, mode);
  if (!dphi.allFinite()) {
    throw NonFiniteDerivative("map derivative is not finite at t = " + std::to_string(t));
  }
  // L Phi = dPhi  <=>  Phi^T L^T = dPhi^T
  const Mat4 l = phi.transpose().partialPivLu().solve(dphi.transpose()).transpose();
  if (!l.allFinite()) throw NonFiniteDerivative("generator is not finite at t = " + std::to_string(t));
  return l;
}

StructureReport validate_generator_structure(const Mat4& l) {
  StructureReport report;
  auto check = [&](double violation, const char* relation) {
    if (!(violation <= report.max_violation)) {
      report.max_violation = std::isnan(violation) ? INFINITY : violation;
      report.worst_relation = relation;
    }
  };
  check(std::abs(l(0, 0).imag()), "l11 real");
  check(std::abs(l(0, 3).imag()), "l14 real");
  check(std::abs(l(0, 2) - std::conj(l(0, 1))), "l13 = l12*");
  check(std::abs(l(2, 0) - std::conj(l(1, 0))), "l31 = l21*");
  check(std::abs(l(2, 1) - std::conj(l(1, 2))), "l32 = l23*");
  check(std::abs(l(2, 2) - std::conj(l(1, 1))), "l33 = l22*");
  check(std::abs(l(2, 3) - std::conj(l(1, 3))), "l34 = l24*");
  check(std::abs(l(3, 0) + l(0, 0)), "l41 = -l11");
  check(std::abs(l(3, 1) + l(0, 1)), "l42 = -l12");
  check(std::abs(l(3, 2) + l(0, 2)), "l43 = -l13");
  check(std::abs(l(3, 3) + l(0, 3)), "l44 = -l14");
  return report;
}

TlsGenerator TlsGenerator::from_matrix(const Mat4& l, double tol) {
  if (!l.allFinite()) throw InvalidArgument("generator has non-finite entries");
  const StructureReport report = validate_generator_structure(l);
  const double bound = tol * std::max(1.0, matkit::max_abs(l));
  if (report.max_violation > bound) {
    throw StructuralViolation("generator violates " + report.worst_relation + " by " +
                              std::to_string(report.max_violation));
  }
  return TlsGenerator(l);
}

Mat2 TlsGenerator::operator()(const Mat2& rho) const { return apply_super(matrix_, rho); }

TlsGenerator generator_from_map(const MapSource& source, double t, const DerivativeMode& mode,
                                double tol) {
  return TlsGenerator::from_matrix(generator_matrix(source, t, mode), tol);
}

// ---------------------------------------------------------------------------

Mat4 choi_of_generator(const TlsGenerator& generator) {
  // C_{(a,i),(b,j)} = L_{(a,b),(i,j)}
  const Mat4& l = generator.matrix();
  Mat4 c;
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i)
      for (int b = 0; b < 2; ++b)
        for (int j = 0; j < 2; ++j) c(2 * a + i, 2 * b + j) = l(2 * a + b, 2 * i + j);
  return c;
}

Mat2 ChoiSpectrum::operator()(const Mat2& rho) const {
  Mat2 out = Mat2::Zero();
  for (const auto& term : terms) out += term.rate * term.op * rho * term.op.adjoint();
  return out;
}

ChoiSpectrum pseudo_kraus(const Mat4& choi, double tol) {
  const double hermitian_tol = tol * std::max(1.0, matkit::max_abs(choi));
  const matkit::Spectrum s = matkit::hermitian_eig(choi, hermitian_tol);
  const Eigen::Index n = s.eigenvalues.size();
  const double gap = 1e-9 * std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());

  // Clusters are emitted from the top down; members keep hermitian_eig order.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
  Eigen::Index begin = 0;
  while (begin < n) {
    Eigen::Index end = begin + 1;
    while (end < n && s.eigenvalues(end) - s.eigenvalues(end - 1) < gap) ++end;
    clusters.emplace_back(begin, end);
    begin = end;
  }
  ChoiSpectrum out;
  for (auto it = clusters.rbegin(); it != clusters.rend(); ++it) {
    for (Eigen::Index k = it->first; k < it->second; ++k) {
      out.terms.push_back({s.eigenvalues(k), matkit::devec(s.eigenvectors.col(k))});
    }
  }
  return out;
}

Mat2 GeneratorDecomposition::dissipator(const Mat2& rho) const {
  Mat2 out = Mat2::Zero();
  for (const auto& j : jumps) {
    const Mat2 ldl = j.op.adjoint() * j.op;
    out += j.rate * (j.op * rho * j.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

Mat2 GeneratorDecomposition::operator()(const Mat2& rho) const {
  const Complex i(0.0, 1.0);
  return -i * (hamiltonian * rho - rho * hamiltonian) + dissipator(rho);
}

Mat4 GeneratorDecomposition::superoperator() const {
  const Complex i(0.0, 1.0);
  const Mat2 id = Mat2::Identity();
  Mat4 out = -i * (matkit::sandwich(hamiltonian, id) - matkit::sandwich(id, hamiltonian));
  for (const auto& j : jumps) {
    const Mat2 ldl = j.op.adjoint() * j.op;
    out += j.rate * (matkit::sandwich(j.op, j.op.adjoint()) - 0.5 * matkit::sandwich(ldl, id) -
                     0.5 * matkit::sandwich(id, ldl));
  }
  return out;
}

GeneratorDecomposition canonical_form(const ChoiSpectrum& spectrum) {
  constexpr double d = 2.0;
  const Complex i(0.0, 1.0);
  GeneratorDecomposition out;
  Mat2 acc = Mat2::Zero();
  for (const auto& term : spectrum.terms) {
    const Complex tr = term.op.trace();
    acc += term.rate * (tr * term.op.adjoint() - std::conj(tr) * term.op);
    out.jumps.push_back({term.rate, term.op - (tr / d) * Mat2::Identity()});
  }
  out.hamiltonian = (-i / (2.0 * d)) * acc;
  return out;
}

GeneratorDecomposition canonical_master_equation(const MapSource& source, double t,
                                                 const DerivativeMode& mode, double tol) {
  const TlsGenerator l = generator_from_map(source, t, mode, tol);
  return canonical_form(pseudo_kraus(choi_of_generator(l), tol));
}

// ---------------------------------------------------------------------------

namespace {

// Locates a sign change of f inside [a, b] by bisection.
double bracket_root(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++k) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Trajectory propagate_until_singular(const DecompositionSource& source, const Mat2& rho0,
                                    const std::vector<double>& t_grid,
                                    const PropagationOptions& options) {
  matkit::require_density_matrix(rho0, "initial state");
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw InvalidArgument("propagate_master_equation: time grid must start at 0");
  }
  if (options.substeps < 1) throw InvalidArgument("propagate_master_equation: substeps < 1");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) {
      throw InvalidArgument("propagate_master_equation: time grid must increase strictly");
    }
  }

  const auto& indicator = options.singularity_indicator;
  Trajectory out;
  out.states.reserve(t_grid.size());
  out.states.push_back(rho0);
  Mat2 rho = rho0;
  double sign_prev = indicator ? indicator(0.0) : 0.0;

  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double t0 = t_grid[k - 1];
    const double h = (t_grid[k] - t0) / options.substeps;
    if (!(h > 0.0) || t0 + h == t0) {
      throw Error("propagate_master_equation: step size underflow at t = " + std::to_string(t0));
    }
    for (int s = 0; s < options.substeps; ++s) {
      const double t = t0 + s * h;
      const double t_next = (s + 1 == options.substeps) ? t_grid[k] : t + h;
      if (indicator) {
        const double sign_next = indicator(t_next);
        if ((sign_prev < 0.0 && sign_next > 0.0) || (sign_prev > 0.0 && sign_next < 0.0) ||
            sign_next == 0.0) {
          out.singular_at = sign_next == 0.0 ? t_next : bracket_root(indicator, t, t_next);
          return out;
        }
        sign_prev = sign_next;
      }
      const double hs = t_next - t;
      const GeneratorDecomposition g0 = source(t);
      const GeneratorDecomposition gm = source(t + 0.5 * hs);
      const GeneratorDecomposition g1 = source(t_next);
      const Mat2 k1 = g0(rho);
      const Mat2 k2 = gm(rho + 0.5 * hs * k1);
      const Mat2 k3 = gm(rho + 0.5 * hs * k2);
      const Mat2 k4 = g1(rho + hs * k3);
      rho += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.states.push_back(rho);
  }
  return out;
}

std::vector<Mat2> propagate_master_equation(const DecompositionSource& source, const Mat2& rho0,
                                            const std::vector<double>& t_grid,
                                            const PropagationOptions& options) {
  Trajectory tr = propagate_until_singular(source, rho0, t_grid, options);
  if (tr.singular_at) {
    throw SingularMap("generator diverges near t = " + std::to_string(*tr.singular_at),
                      *tr.singular_at);
  }
  return std::move(tr.states);
}

SteadyState steady_state(const TlsGenerator& generator, double tol) {
  const Mat4& l = generator.matrix();
  Eigen::JacobiSVD<Mat4> svd(l, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv(0));
  Eigen::Index rank = 0;
  while (rank < 4 && sv(rank) > cutoff) ++rank;
  const ComplexMatrix null = svd.matrixV().rightCols(4 - rank);

  SteadyState out;
  const ComplexMatrix basis = matkit::canonical_basis(null);
  for (Eigen::Index j = 0; j < basis.cols(); ++j) out.basis.push_back(matkit::devec(basis.col(j)));

  // Hermiticity preservation makes the null space closed under adjoint, so its
  // Hermitian part is a real space of the same dimension. Among its unit-trace
  // elements take the one of minimal Frobenius norm, which is gauge-free.
  // Pauli coordinates: X = (c0 I + c1 sx + c2 sy + c3 sz) / sqrt(2).
  const Mat2 paulis[4] = {matkit::pauli::identity(), matkit::pauli::x(), matkit::pauli::y(),
                          matkit::pauli::z()};
  Eigen::MatrixXd herm(4, 2 * out.basis.size());
  for (std::size_t j = 0; j < out.basis.size(); ++j) {
    const Mat2& b = out.basis[j];
    const Mat2 re = 0.5 * (b + b.adjoint());
    const Mat2 im = Complex(0.0, -0.5) * (b - b.adjoint());
    for (int p = 0; p < 4; ++p) {
      herm(p, 2 * j) = (paulis[p] * re).trace().real() / std::sqrt(2.0);
      herm(p, 2 * j + 1) = (paulis[p] * im).trace().real() / std::sqrt(2.0);
    }
  }
  if (herm.cols() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> hs(herm, Eigen::ComputeThinU);
  Eigen::Index hrank = 0;
  while (hrank < hs.singularValues().size() && hs.singularValues()(hrank) > 1e-8) ++hrank;
  if (hrank == 0) return out;
  const Eigen::MatrixXd q = hs.matrixU().leftCols(hrank);
  // Tr X = sqrt(2) c0, so the trace functional in these coordinates is sqrt(2) e0.
  const Eigen::VectorXd traces = std::sqrt(2.0) * q.row(0).transpose();
  const double tn = traces.squaredNorm();
  if (tn <= 1e-16) return out;
  const Eigen::VectorXd coords = q * (traces / tn);
  Mat2 rep = Mat2::Zero();
  for (int p = 0; p < 4; ++p) rep += (coords(p) / std::sqrt(2.0)) * paulis[p];
  out.representative = rep;
  return out;
}

}  // namespace finbath::tlsmap
