#include <doctest.h>

#include <cmath>

#include "finbath/errors.hpp"
#include "finbath/rtn.hpp"
#include "finbath/tlsmap.hpp"
#include "oracles/oracles.hpp"

using namespace finbath;
using namespace finbath::rtn;
namespace pauli = finbath::matkit::pauli;

namespace {

// b = eps sqrt(N) = eps for a single bath spin.
RtnParams single_spin(double b, double gamma) {
  RtnParams p;
  p.n_bath = 1;
  p.epsilon = b;
  p.gamma = gamma;
  return p;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = a + (b - a) * k / (n - 1);
  return out;
}

Mat2 plus_state() { return 0.5 * (Mat2::Identity() + pauli::x()); }

}  // namespace

TEST_SUITE("rtn.lambda") {
  TEST_CASE("initial conditions in every regime") {
    for (double g : {0.5, 1.0, 3.5355339059327378, 5.0, 100.0}) {
      RtnParams p;
      p.gamma = g;
      const auto f = lambda_rtn(p, 0.0);
      CHECK(f.value == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(std::abs(f.derivative) < 1e-15);
    }
  }

  TEST_CASE("regime classification") {
    RtnParams p;
    CHECK(regime(p) == Regime::Underdamped);
    p.gamma = 5.0;
    CHECK(regime(p) == Regime::Overdamped);
    CHECK(regime(single_spin(2.0, 2.0)) == Regime::Critical);
    CHECK(std::string(to_string(Regime::Critical)) == "critical");
  }

  TEST_CASE("critical branch") {
    const RtnParams p = single_spin(1.3, 1.3);
    for (double t : {0.0, 0.4, 2.0, 9.0}) {
      const auto f = lambda_rtn(p, t);
      REQUIRE(f.value == doctest::Approx(std::exp(-1.3 * t) * (1.0 + 1.3 * t)).epsilon(1e-14));
      REQUIRE(f.derivative ==
              doctest::Approx(-1.3 * 1.3 * t * std::exp(-1.3 * t)).epsilon(1e-14));
    }
  }

  TEST_CASE("branches join continuously at the critical ratio") {
    for (double t : {0.1, 1.0, 4.0}) {
      const double c = lambda_rtn(single_spin(1.0, 1.0), t).value;
      const double under = lambda_rtn(single_spin(1.0 + 1e-6, 1.0), t).value;
      const double over = lambda_rtn(single_spin(1.0 - 1e-6, 1.0), t).value;
      REQUIRE(std::abs(under - c) <= 1e-5);
      REQUIRE(std::abs(over - c) <= 1e-5);
    }
  }

  TEST_CASE("slow switching recovers the static cosine") {
    RtnParams p;
    p.gamma = 1e-6;
    const double b = switching_amplitude(p);
    for (double t : linspace(0.0, 10.0, 101)) {
      REQUIRE(std::abs(lambda_rtn(p, t).value - std::cos(b * t)) <= 1e-4);
    }
  }

  TEST_CASE("satisfies the damped oscillator equation") {
    for (const RtnParams& p : {RtnParams{}, single_spin(2.0, 2.0), single_spin(0.5, 4.0)}) {
      for (double t : {0.0, 0.3, 1.7, 6.0}) REQUIRE(ode_residual_lambda(p, t) <= 1e-6);
    }
  }

  TEST_CASE("strong overdamping stays finite and monotone") {
    const RtnParams p = single_spin(1.0, 1e6);
    double prev = 1.0;
    for (double t : {1.0, 1e3, 1e6, 1e9}) {
      const double v = lambda_rtn(p, t).value;
      REQUIRE(std::isfinite(v));
      REQUIRE(v <= prev);
      REQUIRE(v >= 0.0);
      prev = v;
    }
  }

  TEST_CASE("first zero for unit switching rate") {
    const auto zeros = lambda_zeros(RtnParams{}, linspace(0.0, 10.0, 1001));
    REQUIRE(zeros.size() >= 3);
    CHECK(zeros.front() == doctest::Approx(0.5478).epsilon(1e-3));
    for (double z : zeros) CHECK(std::abs(lambda_rtn(RtnParams{}, z).value) < 1e-12);
    RtnParams over;
    over.gamma = 5.0;
    CHECK(lambda_zeros(over, linspace(0.0, 10.0, 1001)).empty());
  }

  TEST_CASE("invalid input") {
    RtnParams p;
    CHECK_THROWS_AS(lambda_rtn(p, -1.0), InvalidArgument);
    p.gamma = 0.0;
    CHECK_THROWS_AS(validate(p), InvalidArgument);
    p = RtnParams{};
    p.epsilon = -0.1;
    CHECK_THROWS_AS(validate(p), InvalidArgument);
  }
}

TEST_SUITE("rtn.map") {
  TEST_CASE("populations fixed, coherence rotated and scaled") {
    const RtnParams p;
    oracle::Rng rng(51);
    const Mat2 rho0 = oracle::random_qubit_state(rng);
    const double t = 1.2;
    const Mat2 rho = rtn_state(p, rho0, t);
    CHECK(std::abs(rho(0, 0) - rho0(0, 0)) < 1e-15);
    CHECK(std::abs(rho(1, 1) - rho0(1, 1)) < 1e-15);
    CHECK(std::abs(rho(0, 1) - std::exp(Complex(0, -p.omega0 * t)) * lambda_rtn(p, t).value *
                                   rho0(0, 1)) < 1e-15);
    CHECK(matkit::max_abs(rtn_state(p, rho0, 0.0) - rho0) < 1e-15);
  }

  TEST_CASE("critical dephasing of |+>") {
    const RtnParams p = single_spin(0.8, 0.8);
    const double t = 2.5;
    const Mat2 rho = rtn_state(p, plus_state(), t);
    CHECK(std::abs(std::abs(rho(0, 1)) - 0.5 * std::exp(-0.8 * t) * (1.0 + 0.8 * t)) < 1e-15);
  }

  TEST_CASE("analytic map derivative matches finite differences") {
    const RtnParams p;
    for (double t : {0.4, 2.0, 7.5}) {
      const Mat4 fd = oracle::five_point_derivative(
          [&](double s) { return Mat4(rtn_map(p, s).matrix()); }, t, 1e-4);
      REQUIRE(matkit::max_abs(rtn_map_derivative(p, t) - fd) <= 1e-8);
    }
  }
}

TEST_SUITE("rtn.master_equation") {
  TEST_CASE("generator matches the time derivative of the state") {
    const RtnParams p;
    oracle::Rng rng(52);
    const Mat2 rho0 = oracle::random_qubit_state(rng);
    for (double t : {0.2, 1.0, 3.1}) {
      const Mat2 fd = oracle::central_difference(
          [&](double s) { return rtn_state(p, rho0, s); }, t, 1e-5);
      REQUIRE(matkit::max_abs(master_equation_rtn(p, t, rtn_state(p, rho0, t)) - fd) <= 1e-6);
    }
  }

  TEST_CASE("t = 0: bare precession, no dephasing") {
    const auto d = canonical_decomposition_rtn(RtnParams{}, 0.0);
    CHECK(matkit::max_abs(d.hamiltonian - 0.75 * pauli::z()) == 0.0);
    REQUIRE(d.jumps.size() == 1);
    CHECK(std::abs(d.jumps[0].rate) < 1e-15);
  }

  TEST_CASE("closed form agrees with the generic pipeline") {
    const RtnParams p;
    const auto src = rtn_map_source(p);
    for (double t : {0.3, 1.0, 2.0}) {
      const auto closed = canonical_decomposition_rtn(p, t);
      const auto generic = tlsmap::canonical_master_equation(src, t);
      REQUIRE(matkit::max_abs(generic.hamiltonian - closed.hamiltonian) <= 1e-9);
      REQUIRE(matkit::max_abs(generic.superoperator() - closed.superoperator()) <= 1e-9);
    }
  }

  TEST_CASE("diverging rate at a zero of Lambda") {
    const RtnParams p;
    const double z = lambda_zeros(p, linspace(0.0, 2.0, 201)).front();
    try {
      canonical_decomposition_rtn(p, z);
      FAIL("expected SingularCoherence");
    } catch (const SingularCoherence& e) {
      CHECK(e.time() == z);
    }
  }
}

TEST_SUITE("rtn.kraus") {
  TEST_CASE("completeness and reconstruction") {
    const RtnParams p;
    oracle::Rng rng(53);
    for (double t : linspace(0.0, 10.0, 41)) {
      const auto k = rtn_kraus(p, t);
      Mat2 sum = k[0].adjoint() * k[0] + k[1].adjoint() * k[1];
      REQUIRE(matkit::max_abs(sum - Mat2::Identity()) <= 1e-12);
      const Mat2 rho0 = oracle::random_qubit_state(rng);
      const Mat2 out = k[0] * rho0 * k[0].adjoint() + k[1] * rho0 * k[1].adjoint();
      REQUIRE(matkit::max_abs(out - rtn_state(p, rho0, t)) <= 1e-12);
    }
  }

  TEST_CASE("special times") {
    const RtnParams p;
    const auto k0 = rtn_kraus(p, 0.0);
    CHECK(matkit::max_abs(k0[0] - Mat2::Identity()) < 1e-15);
    CHECK(matkit::max_abs(k0[1]) == 0.0);
    const double z = lambda_zeros(p, linspace(0.0, 2.0, 201)).front();
    const auto kz = rtn_kraus(p, z);
    CHECK(std::abs(matkit::max_abs(kz[0]) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(matkit::max_abs(kz[1]) - std::sqrt(0.5)) < 1e-12);
  }

  TEST_CASE("interaction picture: identity and sigma_z weighted by (1 +- Lambda)/2") {
    const RtnParams p;
    const double t = 1.4;
    const auto k = rtn_kraus(p, t);
    Mat2 u = Mat2::Zero();
    u(0, 0) = std::exp(Complex(0, -0.5 * p.omega0 * t));
    u(1, 1) = std::conj(u(0, 0));
    const double lam = lambda_rtn(p, t).value;
    CHECK(matkit::max_abs(u.adjoint() * k[0] - std::sqrt(0.5 * (1 + lam)) * Mat2::Identity()) <
          1e-15);
    CHECK(matkit::max_abs(u.adjoint() * k[1] - std::sqrt(0.5 * (1 - lam)) * pauli::z()) < 1e-15);
  }
}

TEST_SUITE("rtn.monte_carlo") {
  TEST_CASE("agrees with the closed form within four standard errors") {
    const RtnParams p;
    const auto grid = linspace(0.0, 5.0, 21);
    const auto mc = monte_carlo_lambda(p, grid, {7, 20000, 1});
    REQUIRE(mc.lambda.size() == grid.size());
    CHECK(mc.lambda[0] == 1.0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double exact = lambda_rtn(p, grid[k]).value;
      REQUIRE(std::abs(mc.lambda[k] - exact) <= 4.5 * mc.std_error[k]);
      REQUIRE(std::abs(mc.imag_mean[k]) <= 0.05);
    }
  }

  TEST_CASE("mean switch count is gamma t") {
    RtnParams p;
    p.gamma = 2.0;
    const auto grid = linspace(0.0, 4.0, 9);
    const auto mc = monte_carlo_lambda(p, grid, {8, 20000, 1});
    for (std::size_t k = 1; k < grid.size(); ++k) {
      REQUIRE(std::abs(mc.mean_switches[k] - p.gamma * grid[k]) <=
              4.5 * mc.switches_std_error[k]);
    }
  }

  TEST_CASE("rare switching follows the static cosine") {
    RtnParams p;
    p.gamma = 1e-3;
    const auto grid = linspace(0.0, 5.0, 26);
    const auto mc = monte_carlo_lambda(p, grid, {9, 10000, 1});
    const double b = switching_amplitude(p);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      REQUIRE(std::abs(mc.lambda[k] - std::cos(b * grid[k])) <= 0.01);
    }
  }

  TEST_CASE("bit-identical for any thread count") {
    const RtnParams p;
    const auto grid = linspace(0.0, 3.0, 7);
    const auto one = monte_carlo_lambda(p, grid, {10, 5000, 1});
    for (unsigned threads : {2u, 3u, 8u}) {
      const auto many = monte_carlo_lambda(p, grid, {10, 5000, threads});
      REQUIRE(many.lambda == one.lambda);
      REQUIRE(many.std_error == one.std_error);
      REQUIRE(many.mean_switches == one.mean_switches);
    }
  }

  TEST_CASE("error shrinks as the inverse square root of the sample size") {
    const RtnParams p;
    const std::vector<double> grid{0.0, 1.0};
    const auto small = monte_carlo_lambda(p, grid, {11, 2000, 1});
    const auto large = monte_carlo_lambda(p, grid, {11, 32000, 1});
    CHECK(small.std_error[1] / large.std_error[1] == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("rejects bad grids") {
    const RtnParams p;
    CHECK_THROWS_AS(monte_carlo_lambda(p, {0.0, 1.0, 1.0}, {1, 10, 1}), InvalidArgument);
    CHECK_THROWS_AS(monte_carlo_lambda(p, {-1.0, 1.0}, {1, 10, 1}), InvalidArgument);
    CHECK_THROWS_AS(monte_carlo_lambda(p, {0.0, 1.0}, {1, 0, 1}), InvalidArgument);
  }
}

TEST_SUITE("rtn.markovianity") {
  TEST_CASE("default parameters are non-Markovian") {
    const auto m = markovianity(RtnParams{});
    CHECK_FALSE(m.markovian);
    CHECK(m.ratio == doctest::Approx(12.5).epsilon(1e-14));
  }

  TEST_CASE("critical and overdamped switching are Markovian") {
    CHECK(markovianity(single_spin(1.0, 1.0)).markovian);
    const RtnParams p = single_spin(0.3, 3.0);
    CHECK(markovianity(p).markovian);
    double prev = 1.0;
    for (double t : linspace(0.05, 10.0, 200)) {
      const double lam = lambda_rtn(p, t).value;
      REQUIRE(lam > 0.0);
      REQUIRE(lam < prev);
      REQUIRE(canonical_decomposition_rtn(p, t).jumps[0].rate > 0.0);
      prev = lam;
    }
  }
}

TEST_SUITE("rtn.static_bath") {
  TEST_CASE("single spin, equal weights: cosine of the coupling integral") {
    for (double x : {0.0, 0.3, 2.0}) {
      const Complex c = trace_dephasing_factor(1, {0.5, 0.5}, x);
      REQUIRE(std::abs(c - std::cos(x)) < 1e-15);
    }
    CHECK_THROWS_AS(trace_dephasing_factor(2, {0.5, 0.5}, 1.0), DimensionError);
  }
}

TEST_SUITE("rtn.ohmic") {
  TEST_CASE("F' equals the spectral integral") {
    const double a = 0.1, cutoff = 5.0;
    for (double t : {0.0, 0.2, 1.0, 3.0}) {
      const auto w = bosonic_chi_ohmic(a, cutoff, t, 1.0);
      const double integral = oracle::adaptive_simpson(
          [&](double om) { return std::exp(-om / cutoff) * std::sin(om * t); }, 0.0,
          80.0 * cutoff, 1e-13);
      REQUIRE(std::abs(w.df - 4.0 * a * integral) <= 1e-8);
    }
  }

  TEST_CASE("t = 0 values") {
    const auto w = bosonic_chi_ohmic(0.1, 5.0, 0.0, 2.0);
    CHECK(w.chi == 1.0);
    CHECK(w.f == 0.0);
    CHECK(w.df == 0.0);
    CHECK(w.ddf == doctest::Approx(4.0 * 0.1 * 25.0));
    CHECK(w.lhs == doctest::Approx(w.ddf));
  }

  TEST_CASE("derivatives consistent with F") {
    const double t = 0.7, h = 1e-4;
    auto f = [](double s) { return bosonic_chi_ohmic(0.1, 5.0, s, 1.0).f; };
    auto df = [](double s) { return bosonic_chi_ohmic(0.1, 5.0, s, 1.0).df; };
    const auto w = bosonic_chi_ohmic(0.1, 5.0, t, 1.0);
    CHECK(std::abs(w.df - oracle::five_point_derivative(f, t, h)) < 1e-9);
    CHECK(std::abs(w.ddf - oracle::five_point_derivative(df, t, h)) < 1e-8);
    CHECK_THROWS_AS(bosonic_chi_ohmic(-0.1, 5.0, t, 1.0), InvalidArgument);
  }
}
