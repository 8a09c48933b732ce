#pragma once

// Pure dephasing of the central spin by a bath whose coupling switches
// between +b and -b (b = eps sqrt N) as a symmetric random telegraph process
// with rate gamma. The coherence picks up the averaged factor Lambda(t),
// which obeys Lambda'' + 2 gamma Lambda' + b^2 Lambda = 0, Lambda(0) = 1,
// Lambda'(0) = 0.

#include <array>
#include <cstdint>
#include <vector>

#include "finbath/matkit.hpp"
#include "finbath/tlsmap.hpp"

namespace finbath::rtn {

enum class Regime { Underdamped, Critical, Overdamped };

const char* to_string(Regime r);

struct RtnParams {
  double omega0 = 1.5;
  double epsilon = 0.5;
  int n_bath = 50;
  double gamma = 1.0;
};

/// Throws InvalidArgument unless gamma > 0, eps >= 0, N >= 1, all finite.
void validate(const RtnParams& p);

/// eps sqrt(N)
double switching_amplitude(const RtnParams& p);

/// (b/gamma)^2 within 1e-12 of 1 counts as critical.
Regime regime(const RtnParams& p);

struct DephasingFactor {
  double value = 1.0;
  double derivative = 0.0;
};

DephasingFactor lambda_rtn(const RtnParams& p, double t);

/// |Lambda'' + 2 gamma Lambda' + b^2 Lambda| with Lambda'' from fourth-order
/// differences of the analytic Lambda' (one-sided near t = 0).
double ode_residual_lambda(const RtnParams& p, double t);

tlsmap::TlsMap rtn_map(const RtnParams& p, double t);
Mat4 rtn_map_derivative(const RtnParams& p, double t);
tlsmap::MapSource rtn_map_source(const RtnParams& p);

/// Populations fixed, rho01 -> e^{-i w0 t} Lambda(t) rho01.
Mat2 rtn_state(const RtnParams& p, const Mat2& rho0, double t);

/// H = (w0/2) sz, single jump sz with rate -Lambda'/(2 Lambda). Throws
/// SingularCoherence when |Lambda| <= 1e-12.
tlsmap::GeneratorDecomposition canonical_decomposition_rtn(const RtnParams& p, double t);

Mat2 master_equation_rtn(const RtnParams& p, double t, const Mat2& rho);

/// K1 = sqrt((1 + Lambda)/2) U, K2 = sqrt((1 - Lambda)/2) U sz with
/// U = exp(-i w0 sz t / 2). Throws InvalidArgument if |Lambda| > 1.
std::array<Mat2, 2> rtn_kraus(const RtnParams& p, double t);

struct MonteCarloOptions {
  std::uint64_t seed = 0;
  std::size_t trajectories = 100000;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct MonteCarloResult {
  std::vector<double> t;
  std::vector<double> lambda;
  std::vector<double> std_error;
  /// Mean of sin(phase); zero in expectation.
  std::vector<double> imag_mean;
  std::vector<double> mean_switches;
  std::vector<double> switches_std_error;
};

/// Ensemble average of cos(phase) over simulated telegraph trajectories,
/// phases accumulated exactly over constant segments. Trajectory k draws from
/// its own generator seeded by (seed, k); trajectories are reduced in fixed
/// blocks in index order, so output is identical for any thread count.
MonteCarloResult monte_carlo_lambda(const RtnParams& p, const std::vector<double>& t_grid,
                                    const MonteCarloOptions& options);

struct Markovianity {
  bool markovian = true;
  double ratio = 0.0;  // (b/gamma)^2
};

Markovianity markovianity(const RtnParams& p);

/// Zeros of Lambda on [t_grid.front(), t_grid.back()], bracketed by sign
/// changes between consecutive grid points and refined by bisection.
std::vector<double> lambda_zeros(const RtnParams& p, const std::vector<double>& t_grid);

/// Tr[exp(-(2i/sqrt N) Jz I) rho_B] for a diagonal bath state with weights
/// over levels Jz = N/2 - n, where I is the integrated coupling.
Complex trace_dephasing_factor(int n_bath, const std::vector<double>& weights,
                               double coupling_integral);

/// Ohmic bosonic dephasing: chi = exp(-F), F = 2A ln(1 + W^2 t^2). `lhs` is
/// F'' - F'^2 + 2 gamma F', which a telegraph-like chi would need constant.
struct OhmicWitness {
  double chi = 1.0;
  double f = 0.0;
  double df = 0.0;
  double ddf = 0.0;
  double lhs = 0.0;
};

OhmicWitness bosonic_chi_ohmic(double coupling, double cutoff, double t, double gamma);

}  // namespace finbath::rtn
