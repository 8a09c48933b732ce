#pragma once

// Dissipative central spin model: a qubit coupled by flip-flop terms to N
// bath spins in their symmetric sector,
//
//   H = (w0/2) sz + (w/N) Jz + (eps/sqrt N)(sx Jx + sy Jy),
//
// with the bath initially in its Gibbs state. The reduced dynamics is the
// phase-covariant map rho00 -> alpha rho00 + eta rho11, rho01 -> delta rho01.

#include <array>
#include <memory>
#include <vector>

#include "finbath/matkit.hpp"
#include "finbath/tlsmap.hpp"

namespace finbath::centralspin {

struct CentralSpinParams {
  double omega0 = 1.5;
  double omega = 1.0;
  int n_bath = 50;
  double epsilon = 0.5;
  double beta = 0.5;
};

/// Throws InvalidArgument for N < 1 or non-finite entries.
void validate(const CentralSpinParams& p);

/// eps / sqrt(N)
double coupling(const CentralSpinParams& p);

/// Gibbs weights p_0..p_N of the bath levels Jz = N/2 - n.
std::vector<double> bath_weights(const CentralSpinParams& p);

/// Diagonalization data of the two-dimensional block {|0,n>, |1,n-1>}.
struct SpectralBlock {
  double a = 0.0;  // off-diagonal coupling a_n
  double chi_plus = 0.0;
  double chi_minus = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

/// Valid for 1 <= n <= N. Throws ZeroCoupling when eps = 0.
SpectralBlock spectral_data(const CentralSpinParams& p, int n);

struct Propagators {
  double alpha = 1.0;
  double eta = 0.0;
  Complex delta{1.0, 0.0};
  double dalpha = 0.0;
  double deta = 0.0;
  Complex ddelta{};
};

/// Precomputes the per-level data so that each time point costs O(N).
class CentralSpinModel {
 public:
  explicit CentralSpinModel(const CentralSpinParams& p);

  const CentralSpinParams& params() const noexcept { return params_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// alpha, eta, delta and their analytic time derivatives. t >= 0.
  Propagators propagators(double t) const;

 private:
  struct Level {
    double ratio2;  // (a_n / s_n)^2
    double freq;    // s_n / N
    double lambda_plus;
    double lambda_minus;
    double c_plus;   // chi+^2 / (1 + chi+^2)
    double c_minus;  // chi-^2 / (1 + chi-^2)
  };

  CentralSpinParams params_;
  std::vector<double> weights_;
  std::vector<Level> levels_;  // index n - 1
  bool free_ = false;
};

/// The map as a TlsMap (phi11 = alpha, phi44 = 1 - eta, phi22 = delta).
tlsmap::TlsMap exact_map(const Propagators& pr);
Mat4 exact_map_derivative(const Propagators& pr);

/// Map family with analytic derivative; shares the model.
tlsmap::MapSource map_source(std::shared_ptr<const CentralSpinModel> model);

/// rho00(t) = alpha rho00 + eta rho11, rho01(t) = delta rho01.
Mat2 exact_state(const Propagators& pr, const Mat2& rho0);
Mat2 exact_state(const CentralSpinModel& model, const Mat2& rho0, double t);

/// Generator elements l11 = zeta, l14 = Gamma, l22 = Theta and the
/// Lindblad rates nu+ = Gamma, nu- = -zeta, nu_z = (zeta - Gamma - 2 Re Theta)/4.
struct CsRates {
  double zeta = 0.0;
  double gamma = 0.0;
  Complex theta{};
  double nu_plus = 0.0;
  double nu_minus = 0.0;
  double nu_z = 0.0;
};

/// Throws DegenerateRates when |alpha - eta| <= 1e-12 and SingularCoherence
/// when |delta| <= 1e-12; `t` is only used for reporting.
CsRates rates(const Propagators& pr, double t);
CsRates rates(const CentralSpinModel& model, double t);

/// Closed-form Choi spectrum in the fixed order sigma+, sigma-, E3, E4 where
/// E3/E4 belong to the larger/smaller root of [[zeta, Theta], [Theta*, -Gamma]].
tlsmap::ChoiSpectrum choi_spectrum_cs(const CsRates& r);

/// H = -(Im Theta / 2) sz; jumps (nu+, s+), (nu-, s-), (nu_z, sz).
tlsmap::GeneratorDecomposition canonical_decomposition_cs(const CsRates& r);

Mat2 master_equation_cs(const CsRates& r, const Mat2& rho);

/// K1 = sqrt(eta) s+, K2 = sqrt(1 - alpha) s-, K3/K4 diagonal from the
/// population-coherence block of the channel's Choi matrix.
std::array<Mat2, 4> kraus_ops_cs(const Propagators& pr);

/// Dense evolution in the 2(N+1)-dimensional space. The Hamiltonian is
/// diagonalized once; each time point is then a matrix product.
class BruteForceEvolver {
 public:
  static constexpr int kMaxBath = 64;

  /// Throws BathTooLarge for N > kMaxBath.
  explicit BruteForceEvolver(const CentralSpinParams& p);

  const ComplexMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  ComplexMatrix unitary(double t) const;
  Mat2 state(const Mat2& rho0, double t) const;

 private:
  CentralSpinParams params_;
  ComplexMatrix hamiltonian_;
  ComplexMatrix bath_state_;
  matkit::Spectrum spectrum_;
};

Mat2 brute_force_state(const CentralSpinParams& p, const Mat2& rho0, double t);

/// N [cos(w t / N) - cos(w0 t)] / (N w0 - w); throws ResonantDenominator when
/// |N w0 - w| < 1e-12.
double perturbative_c(const CentralSpinParams& p, double t);

/// Thermal bath sum entering the second-order Hamiltonian. The beta*w -> 0
/// limit N(N+2)/6 is reached continuously.
double perturbative_s1(const CentralSpinParams& p);

/// (w0/2) sz + lambda^2 c(t) S1 diag(e^{beta w / N}, -1).
Mat2 perturbative_h_can(const CentralSpinParams& p, double t);

}  // namespace finbath::centralspin
