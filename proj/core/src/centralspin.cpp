#include "finbath/centralspin.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "finbath/errors.hpp"

namespace finbath::centralspin {

using matkit::CompensatedSum;

void validate(const CentralSpinParams& p) {
  if (p.n_bath < 1) throw InvalidArgument("central spin: bath size must be >= 1");
  if (!std::isfinite(p.omega0) || !std::isfinite(p.omega) || !std::isfinite(p.epsilon) ||
      !std::isfinite(p.beta)) {
    throw InvalidArgument("central spin: parameters must be finite");
  }
}

double coupling(const CentralSpinParams& p) { return p.epsilon / std::sqrt(double(p.n_bath)); }

std::vector<double> bath_weights(const CentralSpinParams& p) {
  validate(p);
  const int n_bath = p.n_bath;
  std::vector<double> w(static_cast<std::size_t>(n_bath) + 1);
  double top = -INFINITY;
  for (int n = 0; n <= n_bath; ++n) {
    w[n] = -0.5 * p.beta * p.omega * (1.0 - 2.0 * n / n_bath);
    top = std::max(top, w[n]);
  }
  CompensatedSum<double> z;
  for (double& x : w) {
    x = std::exp(x - top);
    z.add(x);
  }
  const double norm = z.value();
  for (double& x : w) x /= norm;
  return w;
}

namespace {

double coupling_element(const CentralSpinParams& p, int n) {
  const double nb = p.n_bath;
  const double j = 0.5 * nb;
  const double m = -0.5 * nb + n;
  return p.epsilon * std::sqrt(nb) * std::sqrt(j * (j + 1.0) - (m - 1.0) * m);
}

}  // namespace

SpectralBlock spectral_data(const CentralSpinParams& p, int n) {
  validate(p);
  if (n < 1 || n > p.n_bath) {
    throw InvalidArgument("spectral_data: level index " + std::to_string(n) + " out of range");
  }
  if (p.epsilon == 0.0) throw ZeroCoupling("spectral_data: eps = 0 leaves the blocks uncoupled");
  const double nb = p.n_bath;
  SpectralBlock out;
  out.a = coupling_element(p, n);
  const double b = p.omega - nb * p.omega0;
  const double s = std::sqrt(b * b + 4.0 * out.a * out.a);
  // chi+ chi- = -1; take the root free of cancellation and derive the other.
  if (b < 0.0) {
    out.chi_plus = (s - b) / (2.0 * out.a);
    out.chi_minus = -1.0 / out.chi_plus;
  } else {
    out.chi_minus = -(b + s) / (2.0 * out.a);
    out.chi_plus = -1.0 / out.chi_minus;
  }
  const double base = (nb - (2.0 * n - 1.0)) * p.omega;
  out.lambda_plus = (base + s) / (2.0 * nb);
  out.lambda_minus = (base - s) / (2.0 * nb);
  return out;
}

CentralSpinModel::CentralSpinModel(const CentralSpinParams& p)
    : params_(p), weights_(bath_weights(p)), free_(p.epsilon == 0.0) {
  if (free_) return;
  const double nb = p.n_bath;
  const double b = p.omega - nb * p.omega0;
  levels_.reserve(static_cast<std::size_t>(p.n_bath));
  for (int n = 1; n <= p.n_bath; ++n) {
    const double a = coupling_element(p, n);
    const double s = std::hypot(b, 2.0 * a);
    const double base = (nb - (2.0 * n - 1.0)) * p.omega;
    const double r = a / s;
    levels_.push_back({r * r, s / nb, (base + s) / (2.0 * nb), (base - s) / (2.0 * nb),
                       0.5 * (1.0 - b / s), 0.5 * (1.0 + b / s)});
  }
}

Propagators CentralSpinModel::propagators(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("propagators: t must be >= 0");
  const Complex i(0.0, 1.0);
  const double e00 = 0.5 * (params_.omega + params_.omega0);
  Propagators out;
  if (free_) {
    out.delta = std::exp(-i * params_.omega0 * t);
    out.ddelta = -i * params_.omega0 * out.delta;
    return out;
  }

  const auto n_bath = static_cast<std::size_t>(params_.n_bath);
  CompensatedSum<double> alpha, eta, dalpha, deta;
  CompensatedSum<Complex> delta, ddelta;
  alpha.add(weights_[0]);

  // delta = sum_k p_k A_k conj(B_k). A_k is the amplitude of |0,k> staying
  // in place, B_k that of |1,k> (which lives in block k + 1).
  auto amplitude_a = [&](std::size_t k, Complex& v, Complex& dv) {
    if (k == 0) {
      v = std::exp(-i * e00 * t);
      dv = -i * e00 * v;
      return;
    }
    const Level& l = levels_[k - 1];
    const Complex ep = std::exp(-i * l.lambda_plus * t);
    const Complex em = std::exp(-i * l.lambda_minus * t);
    v = l.c_plus * ep + l.c_minus * em;
    dv = -i * (l.lambda_plus * l.c_plus * ep + l.lambda_minus * l.c_minus * em);
  };
  auto amplitude_b = [&](std::size_t k, Complex& v, Complex& dv) {
    if (k == n_bath) {
      v = std::exp(i * e00 * t);
      dv = i * e00 * v;
      return;
    }
    const Level& l = levels_[k];
    const Complex ep = std::exp(-i * l.lambda_plus * t);
    const Complex em = std::exp(-i * l.lambda_minus * t);
    v = l.c_minus * ep + l.c_plus * em;
    dv = -i * (l.lambda_plus * l.c_minus * ep + l.lambda_minus * l.c_plus * em);
  };

  for (std::size_t n = 1; n <= n_bath; ++n) {
    const Level& l = levels_[n - 1];
    const double half = std::sin(0.5 * l.freq * t);
    const double transfer = 4.0 * l.ratio2 * half * half;  // 2 r^2 (1 - cos)
    const double dtransfer = 2.0 * l.ratio2 * l.freq * std::sin(l.freq * t);
    alpha.add(weights_[n] * (1.0 - transfer));
    dalpha.add(-weights_[n] * dtransfer);
    eta.add(weights_[n - 1] * transfer);
    deta.add(weights_[n - 1] * dtransfer);
  }
  for (std::size_t k = 0; k <= n_bath; ++k) {
    Complex a, da, b, db;
    amplitude_a(k, a, da);
    amplitude_b(k, b, db);
    delta.add(weights_[k] * a * std::conj(b));
    ddelta.add(weights_[k] * (da * std::conj(b) + a * std::conj(db)));
  }
  out.alpha = alpha.value();
  out.eta = eta.value();
  out.delta = delta.value();
  out.dalpha = dalpha.value();
  out.deta = deta.value();
  out.ddelta = ddelta.value();
  return out;
}

tlsmap::TlsMap exact_map(const Propagators& pr) {
  tlsmap::TlsMapParams m;
  m.phi11 = pr.alpha;
  m.phi44 = 1.0 - pr.eta;
  m.phi22 = pr.delta;
  return tlsmap::build_map(m);
}

Mat4 exact_map_derivative(const Propagators& pr) {
  tlsmap::TlsMapParams d;
  d.phi11 = pr.dalpha;
  d.phi44 = -pr.deta;
  d.phi22 = pr.ddelta;
  return tlsmap::map_matrix_derivative(d);
}

tlsmap::MapSource map_source(std::shared_ptr<const CentralSpinModel> model) {
  return {[model](double t) { return exact_map(model->propagators(t)).matrix(); },
          [model](double t) { return exact_map_derivative(model->propagators(t)); }};
}

Mat2 exact_state(const Propagators& pr, const Mat2& rho0) {
  matkit::require_density_matrix(rho0, "initial state");
  const double p00 = pr.alpha * rho0(0, 0).real() + pr.eta * rho0(1, 1).real();
  const Complex c = pr.delta * rho0(0, 1);
  Mat2 out;
  out << p00, c, std::conj(c), 1.0 - p00;
  return out;
}

Mat2 exact_state(const CentralSpinModel& model, const Mat2& rho0, double t) {
  return exact_state(model.propagators(t), rho0);
}

CsRates rates(const Propagators& pr, double t) {
  const double gap = pr.alpha - pr.eta;
  if (std::abs(gap) <= 1e-12) {
    throw DegenerateRates("alpha = eta: population rates diverge at t = " + std::to_string(t), t);
  }
  if (std::abs(pr.delta) <= 1e-12) {
    throw SingularCoherence("delta = 0: coherence rate diverges at t = " + std::to_string(t), t);
  }
  CsRates r;
  r.zeta = (pr.deta * (pr.alpha - 1.0) - pr.dalpha * (pr.eta - 1.0)) / gap;
  r.gamma = (pr.alpha * pr.deta - pr.eta * pr.dalpha) / gap;
  r.theta = pr.ddelta / pr.delta;
  r.nu_plus = r.gamma;
  r.nu_minus = -r.zeta;
  r.nu_z = 0.25 * (r.zeta - r.gamma - 2.0 * r.theta.real());
  return r;
}

CsRates rates(const CentralSpinModel& model, double t) { return rates(model.propagators(t), t); }

namespace {

struct Eigenpair {
  double value;
  Complex top;
  Complex bottom;
};

// Eigenpairs of [[p, c], [c*, q]], larger root first. Each vector is built
// from whichever of its two closed forms avoids cancellation, then rotated so
// the bottom entry is real and non-negative (top entry when bottom is zero).
std::array<Eigenpair, 2> hermitian_block(double p, double q, Complex c) {
  const double d = 0.5 * (p - q);
  const double r = std::hypot(d, std::abs(c));
  const double m = 0.5 * (p + q);
  if (r == 0.0) return {{{m, 1.0, 0.0}, {m, 0.0, 1.0}}};

  auto finish = [](double value, Complex top, Complex bottom) {
    const double norm = std::sqrt(std::norm(top) + std::norm(bottom));
    top /= norm;
    bottom /= norm;
    const Complex pivot = std::abs(bottom) > 0.0 ? bottom : top;
    const Complex phase = std::conj(pivot) / std::abs(pivot);
    return Eigenpair{value, top * phase, bottom * phase};
  };
  const Eigenpair upper = d >= 0.0 ? finish(m + r, d + r, std::conj(c)) : finish(m + r, c, r - d);
  const Eigenpair lower = d <= 0.0 ? finish(m - r, d - r, std::conj(c)) : finish(m - r, c, -d - r);
  return {upper, lower};
}

Mat2 diagonal(Complex top, Complex bottom) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = top;
  m(1, 1) = bottom;
  return m;
}

}  // namespace

tlsmap::ChoiSpectrum choi_spectrum_cs(const CsRates& r) {
  const auto block = hermitian_block(r.zeta, -r.gamma, r.theta);
  tlsmap::ChoiSpectrum out;
  out.terms.push_back({r.gamma, matkit::pauli::plus()});
  out.terms.push_back({-r.zeta, matkit::pauli::minus()});
  for (const auto& e : block) out.terms.push_back({e.value, diagonal(e.top, e.bottom)});
  return out;
}

tlsmap::GeneratorDecomposition canonical_decomposition_cs(const CsRates& r) {
  tlsmap::GeneratorDecomposition out;
  out.hamiltonian = (-0.5 * r.theta.imag()) * matkit::pauli::z();
  out.jumps = {{r.nu_plus, matkit::pauli::plus()},
               {r.nu_minus, matkit::pauli::minus()},
               {r.nu_z, matkit::pauli::z()}};
  return out;
}

Mat2 master_equation_cs(const CsRates& r, const Mat2& rho) {
  return canonical_decomposition_cs(r)(rho);
}

std::array<Mat2, 4> kraus_ops_cs(const Propagators& pr) {
  const auto block = hermitian_block(pr.alpha, 1.0 - pr.eta, pr.delta);
  // Rounding can push vanishing weights slightly negative.
  auto root = [](double x) { return std::sqrt(std::max(0.0, x)); };
  return {root(pr.eta) * matkit::pauli::plus(), root(1.0 - pr.alpha) * matkit::pauli::minus(),
          root(block[0].value) * diagonal(block[0].top, block[0].bottom),
          root(block[1].value) * diagonal(block[1].top, block[1].bottom)};
}

// ---------------------------------------------------------------------------

BruteForceEvolver::BruteForceEvolver(const CentralSpinParams& p) : params_(p) {
  validate(p);
  if (p.n_bath > kMaxBath) {
    throw BathTooLarge("brute force evolution supports N <= " + std::to_string(kMaxBath) +
                       ", got " + std::to_string(p.n_bath));
  }
  const Eigen::Index d = p.n_bath + 1;
  const double j = 0.5 * p.n_bath;
  ComplexMatrix jz = ComplexMatrix::Zero(d, d);
  ComplexMatrix jplus = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) jz(n, n) = j - double(n);
  // Level n has Jz = j - n, so J+ maps n to n - 1.
  for (Eigen::Index n = 1; n < d; ++n) {
    const double m = j - double(n);
    jplus(n - 1, n) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix jx = 0.5 * (jplus + jplus.adjoint());
  const ComplexMatrix jy = Complex(0.0, -0.5) * (jplus - jplus.adjoint());
  const ComplexMatrix id_b = ComplexMatrix::Identity(d, d);
  const ComplexMatrix id_s = ComplexMatrix::Identity(2, 2);

  hamiltonian_ = 0.5 * p.omega0 * matkit::kron(matkit::pauli::z(), id_b) +
                 (p.omega / p.n_bath) * matkit::kron(id_s, jz) +
                 coupling(p) * (matkit::kron(matkit::pauli::x(), jx) +
                                matkit::kron(matkit::pauli::y(), jy));
  hamiltonian_ = 0.5 * (hamiltonian_ + hamiltonian_.adjoint()).eval();

  const std::vector<double> w = bath_weights(p);
  bath_state_ = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) bath_state_(n, n) = w[static_cast<std::size_t>(n)];
  spectrum_ = matkit::hermitian_eig(hamiltonian_);
}

ComplexMatrix BruteForceEvolver::unitary(double t) const {
  ComplexVector phases(spectrum_.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -spectrum_.eigenvalues(k) * t));
  }
  return spectrum_.eigenvectors * phases.asDiagonal() * spectrum_.eigenvectors.adjoint();
}

Mat2 BruteForceEvolver::state(const Mat2& rho0, double t) const {
  matkit::require_density_matrix(rho0, "initial state");
  const ComplexMatrix u = unitary(t);
  const ComplexMatrix total = u * matkit::kron(rho0, bath_state_) * u.adjoint();
  return matkit::partial_trace_bath(total, static_cast<std::size_t>(params_.n_bath) + 1);
}

Mat2 brute_force_state(const CentralSpinParams& p, const Mat2& rho0, double t) {
  return BruteForceEvolver(p).state(rho0, t);
}

// ---------------------------------------------------------------------------

double perturbative_c(const CentralSpinParams& p, double t) {
  validate(p);
  const double nb = p.n_bath;
  const double den = nb * p.omega0 - p.omega;
  if (std::abs(den) < 1e-12) {
    throw ResonantDenominator("N w0 = w: second-order Hamiltonian is resonant");
  }
  return nb * (std::cos(p.omega * t / nb) - std::cos(p.omega0 * t)) / den;
}

double perturbative_s1(const CentralSpinParams& p) {
  validate(p);
  const double nb = p.n_bath;
  const double x = p.beta * p.omega;
  const double ratio = (nb + 2.0) / nb;
  // (N+2) sinh(x/2) - N sinh(x (N+2) / 2N); the linear terms cancel exactly,
  // so for small x sum the odd Taylor series from the cubic term on.
  if (x == 0.0) return nb * (nb + 2.0) / 6.0;
  double numerator = 0.0;
  if (std::abs(x) < 0.5) {
    double power = x / 2.0;  // (x/2)^k / k!
    double ratio_k = ratio;
    for (int k = 3; k < 41; k += 2) {
      power *= (x / 2.0) * (x / 2.0) / ((k - 1.0) * k);
      ratio_k *= ratio * ratio;
      numerator += power * ((nb + 2.0) - nb * ratio_k);
    }
  } else {
    numerator = (nb + 2.0) * std::sinh(0.5 * x) - nb * std::sinh(0.5 * x * ratio);
  }
  const double em1 = std::expm1(x / nb);
  const double value =
      -std::exp(x / (2.0 * nb)) * numerator / (std::sinh(x * (nb + 1.0) / (2.0 * nb)) * em1 * em1);
  if (!std::isfinite(value)) throw InvalidArgument("perturbative S1 overflows for beta*w = " + std::to_string(x));
  return value;
}

Mat2 perturbative_h_can(const CentralSpinParams& p, double t) {
  const double lam = coupling(p);
  const double scale = lam * lam * perturbative_c(p, t) * perturbative_s1(p);
  Mat2 h = 0.5 * p.omega0 * matkit::pauli::z();
  h(0, 0) += scale * std::exp(p.beta * p.omega / p.n_bath);
  h(1, 1) -= scale;
  return h;
}

}  // namespace finbath::centralspin
