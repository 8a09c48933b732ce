#include "finbath/rtn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "finbath/errors.hpp"

namespace finbath::rtn {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Underdamped: return "underdamped";
    case Regime::Critical: return "critical";
    case Regime::Overdamped: return "overdamped";
  }
  return "unknown";
}

void validate(const RtnParams& p) {
  if (!std::isfinite(p.omega0) || !std::isfinite(p.epsilon) || !std::isfinite(p.gamma)) {
    throw InvalidArgument("rtn: parameters must be finite");
  }
  if (!(p.gamma > 0.0)) throw InvalidArgument("rtn: switching rate gamma must be > 0");
  if (p.epsilon < 0.0) throw InvalidArgument("rtn: coupling amplitude eps must be >= 0");
  if (p.n_bath < 1) throw InvalidArgument("rtn: bath size must be >= 1");
}

double switching_amplitude(const RtnParams& p) { return p.epsilon * std::sqrt(double(p.n_bath)); }

Regime regime(const RtnParams& p) {
  validate(p);
  const double ratio = std::pow(switching_amplitude(p) / p.gamma, 2);
  if (std::abs(ratio - 1.0) <= 1e-12) return Regime::Critical;
  return ratio > 1.0 ? Regime::Underdamped : Regime::Overdamped;
}

DephasingFactor lambda_rtn(const RtnParams& p, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("lambda_rtn: t must be >= 0");
  const double b = switching_amplitude(p);
  const double g = p.gamma;
  const double decay = std::exp(-g * t);
  DephasingFactor out;
  switch (regime(p)) {
    case Regime::Underdamped: {
      // mu * gamma, evaluated without forming mu so that gamma -> 0 stays exact.
      const double w = std::sqrt((b - g) * (b + g));
      const double s = std::sin(w * t);
      out.value = decay * (std::cos(w * t) + (g / w) * s);
      out.derivative = -(b * b / w) * decay * s;
      break;
    }
    case Regime::Critical:
      out.value = decay * (1.0 + g * t);
      out.derivative = -g * g * t * decay;
      break;
    case Regime::Overdamped: {
      const double k = std::sqrt((g - b) * (g + b));
      // e^{-gt} cosh(kt) and e^{-gt} sinh(kt) without overflow; k - g = -b^2/(g + k).
      const double slow = std::exp(-(b * b / (g + k)) * t);
      const double fast = std::exp(-(g + k) * t);
      const double ch = 0.5 * (slow + fast);
      const double sh = 0.5 * slow * -std::expm1(-2.0 * k * t);
      out.value = ch + (g / k) * sh;
      out.derivative = -(b * b / k) * sh;
      break;
    }
  }
  return out;
}

double ode_residual_lambda(const RtnParams& p, double t) {
  const double b = switching_amplitude(p);
  const double h = 1e-3 / std::max({1.0, b, p.gamma});
  auto d = [&](double s) { return lambda_rtn(p, s).derivative; };
  double second;
  if (t - 2.0 * h >= 0.0) {
    second = (-d(t + 2.0 * h) + 8.0 * d(t + h) - 8.0 * d(t - h) + d(t - 2.0 * h)) / (12.0 * h);
  } else {
    second = (-25.0 * d(t) + 48.0 * d(t + h) - 36.0 * d(t + 2.0 * h) + 16.0 * d(t + 3.0 * h) -
              3.0 * d(t + 4.0 * h)) /
             (12.0 * h);
  }
  const DephasingFactor f = lambda_rtn(p, t);
  return std::abs(second + 2.0 * p.gamma * f.derivative + b * b * f.value);
}

tlsmap::TlsMap rtn_map(const RtnParams& p, double t) {
  const DephasingFactor f = lambda_rtn(p, t);
  tlsmap::TlsMapParams m;
  m.phi22 = f.value * std::exp(Complex(0.0, -p.omega0 * t));
  return tlsmap::build_map(m);
}

Mat4 rtn_map_derivative(const RtnParams& p, double t) {
  const DephasingFactor f = lambda_rtn(p, t);
  tlsmap::TlsMapParams d;
  d.phi11 = 0.0;
  d.phi44 = 0.0;
  d.phi22 = Complex(f.derivative, -p.omega0 * f.value) * std::exp(Complex(0.0, -p.omega0 * t));
  return tlsmap::map_matrix_derivative(d);
}

tlsmap::MapSource rtn_map_source(const RtnParams& p) {
  validate(p);
  return {[p](double t) { return rtn_map(p, t).matrix(); },
          [p](double t) { return rtn_map_derivative(p, t); }};
}

Mat2 rtn_state(const RtnParams& p, const Mat2& rho0, double t) {
  matkit::require_density_matrix(rho0, "initial state");
  return rtn_map(p, t)(rho0);
}

tlsmap::GeneratorDecomposition canonical_decomposition_rtn(const RtnParams& p, double t) {
  const DephasingFactor f = lambda_rtn(p, t);
  if (std::abs(f.value) <= 1e-12) {
    throw SingularCoherence("Lambda = 0: dephasing rate diverges at t = " + std::to_string(t), t);
  }
  tlsmap::GeneratorDecomposition out;
  out.hamiltonian = 0.5 * p.omega0 * matkit::pauli::z();
  out.jumps = {{-f.derivative / (2.0 * f.value), matkit::pauli::z()}};
  return out;
}

Mat2 master_equation_rtn(const RtnParams& p, double t, const Mat2& rho) {
  return canonical_decomposition_rtn(p, t)(rho);
}

std::array<Mat2, 2> rtn_kraus(const RtnParams& p, double t) {
  const double lam = lambda_rtn(p, t).value;
  if (std::abs(lam) > 1.0 + 1e-12) {
    throw InvalidArgument("rtn_kraus: |Lambda| = " + std::to_string(std::abs(lam)) + " exceeds 1");
  }
  Mat2 u = Mat2::Zero();
  u(0, 0) = std::exp(Complex(0.0, -0.5 * p.omega0 * t));
  u(1, 1) = std::conj(u(0, 0));
  const double w1 = std::sqrt(std::max(0.0, 0.5 * (1.0 + lam)));
  const double w2 = std::sqrt(std::max(0.0, 0.5 * (1.0 - lam)));
  return {w1 * u, w2 * u * matkit::pauli::z()};
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kBlock = 1024;

// Distributions are written out so that streams agree across standard
// library implementations.
double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

struct BlockSums {
  std::vector<double> cos_sum, cos_sq, sin_sum, switch_sum, switch_sq;

  explicit BlockSums(std::size_t n)
      : cos_sum(n, 0.0), cos_sq(n, 0.0), sin_sum(n, 0.0), switch_sum(n, 0.0), switch_sq(n, 0.0) {}
};

void run_trajectory(const RtnParams& p, const std::vector<double>& grid, std::uint64_t seed,
                    std::uint64_t index, BlockSums& acc) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index),
                    std::uint32_t(index >> 32)};
  std::mt19937_64 rng(seq);
  const double b = switching_amplitude(p);
  double sign = uniform01(rng) < 0.5 ? 1.0 : -1.0;
  double clock = 0.0;
  double phase = 0.0;
  double next = exponential(rng, p.gamma);
  double switches = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    while (next <= t) {
      phase += sign * b * (next - clock);
      clock = next;
      sign = -sign;
      switches += 1.0;
      next = clock + exponential(rng, p.gamma);
    }
    const double total = phase + sign * b * (t - clock);
    const double c = std::cos(total);
    acc.cos_sum[g] += c;
    acc.cos_sq[g] += c * c;
    acc.sin_sum[g] += std::sin(total);
    acc.switch_sum[g] += switches;
    acc.switch_sq[g] += switches * switches;
  }
}

double standard_error(double sum, double sum_sq, double n) {
  if (n < 2.0) return 0.0;
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return std::sqrt(var / n);
}

}  // namespace

MonteCarloResult monte_carlo_lambda(const RtnParams& p, const std::vector<double>& t_grid,
                                    const MonteCarloOptions& options) {
  validate(p);
  if (options.trajectories < 1) throw InvalidArgument("monte_carlo_lambda: need >= 1 trajectory");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] >= 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1]))) {
      throw InvalidArgument("monte_carlo_lambda: time grid must be non-negative and increasing");
    }
  }
  const std::size_t n_grid = t_grid.size();
  const std::size_t n_traj = options.trajectories;
  const std::size_t n_blocks = (n_traj + kBlock - 1) / kBlock;
  std::vector<BlockSums> blocks(n_blocks, BlockSums(n_grid));

  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t blk = cursor++; blk < n_blocks; blk = cursor++) {
      const std::size_t end = std::min(n_traj, (blk + 1) * kBlock);
      for (std::size_t k = blk * kBlock; k < end; ++k) {
        run_trajectory(p, t_grid, options.seed, k, blocks[blk]);
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_blocks)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  BlockSums total(n_grid);
  for (const auto& blk : blocks) {
    for (std::size_t g = 0; g < n_grid; ++g) {
      total.cos_sum[g] += blk.cos_sum[g];
      total.cos_sq[g] += blk.cos_sq[g];
      total.sin_sum[g] += blk.sin_sum[g];
      total.switch_sum[g] += blk.switch_sum[g];
      total.switch_sq[g] += blk.switch_sq[g];
    }
  }

  const double n = double(n_traj);
  MonteCarloResult out;
  out.t = t_grid;
  for (std::size_t g = 0; g < n_grid; ++g) {
    out.lambda.push_back(total.cos_sum[g] / n);
    out.std_error.push_back(standard_error(total.cos_sum[g], total.cos_sq[g], n));
    out.imag_mean.push_back(total.sin_sum[g] / n);
    out.mean_switches.push_back(total.switch_sum[g] / n);
    out.switches_std_error.push_back(standard_error(total.switch_sum[g], total.switch_sq[g], n));
  }
  return out;
}

Markovianity markovianity(const RtnParams& p) {
  validate(p);
  const double ratio = std::pow(switching_amplitude(p) / p.gamma, 2);
  return {regime(p) != Regime::Underdamped, ratio};
}

std::vector<double> lambda_zeros(const RtnParams& p, const std::vector<double>& t_grid) {
  std::vector<double> zeros;
  auto f = [&](double t) { return lambda_rtn(p, t).value; };
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double fk = f(t_grid[k]);
    if (fk == 0.0) {
      zeros.push_back(t_grid[k]);
      continue;
    }
    if (k == 0) continue;
    const double fp = f(t_grid[k - 1]);
    if (fp == 0.0 || (fp < 0.0) == (fk < 0.0)) continue;
    double a = t_grid[k - 1], c = t_grid[k], fa = fp;
    for (int it = 0; it < 200 && c - a > 1e-15 * std::max(1.0, c); ++it) {
      const double m = 0.5 * (a + c);
      const double fm = f(m);
      if (fm == 0.0) {
        a = c = m;
        break;
      }
      if ((fa < 0.0) == (fm < 0.0)) {
        a = m;
        fa = fm;
      } else {
        c = m;
      }
    }
    zeros.push_back(0.5 * (a + c));
  }
  return zeros;
}

Complex trace_dephasing_factor(int n_bath, const std::vector<double>& weights,
                               double coupling_integral) {
  if (n_bath < 1 || weights.size() != static_cast<std::size_t>(n_bath) + 1) {
    throw DimensionError("trace_dephasing_factor: expected N + 1 weights");
  }
  matkit::CompensatedSum<Complex> sum;
  const double scale = 2.0 / std::sqrt(double(n_bath));
  for (int n = 0; n <= n_bath; ++n) {
    const double jz = 0.5 * n_bath - n;
    sum.add(weights[static_cast<std::size_t>(n)] *
            std::exp(Complex(0.0, -scale * jz * coupling_integral)));
  }
  return sum.value();
}

OhmicWitness bosonic_chi_ohmic(double coupling, double cutoff, double t, double gamma) {
  if (!(coupling >= 0.0) || !(cutoff > 0.0) || !std::isfinite(t) || !std::isfinite(gamma)) {
    throw InvalidArgument("bosonic_chi_ohmic: need A >= 0, cutoff > 0 and finite t, gamma");
  }
  const double x2 = cutoff * cutoff * t * t;
  const double w2 = cutoff * cutoff;
  OhmicWitness out;
  out.f = 2.0 * coupling * std::log1p(x2);
  out.chi = std::exp(-out.f);
  out.df = 4.0 * coupling * w2 * t / (1.0 + x2);
  out.ddf = 4.0 * coupling * w2 * (1.0 - x2) / ((1.0 + x2) * (1.0 + x2));
  out.lhs = out.ddf - out.df * out.df + 2.0 * gamma * out.df;
  return out;
}

}  // namespace finbath::rtn
