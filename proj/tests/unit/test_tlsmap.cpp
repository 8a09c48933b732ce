#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "finbath/centralspin.hpp"
#include "finbath/errors.hpp"
#include "finbath/rtn.hpp"
#include "finbath/tlsmap.hpp"
#include "oracles/oracles.hpp"

using namespace finbath;
using namespace finbath::tlsmap;
namespace pauli = finbath::matkit::pauli;

namespace {

const Complex I(0.0, 1.0);

Mat2 plus_state() { return 0.5 * Mat2::Ones(); }

MapSource constant_source(const Mat4& m) {
  return MapSource{[m](double) { return m; }, [](double) { return Mat4::Zero().eval(); }};
}

// rho -> e^{-i w0 sz t / 2} rho e^{i w0 sz t / 2}
MapSource unitary_source(double w0) {
  return make_map_source([w0](double t) {
    TlsMapParams p;
    p.phi22 = std::exp(Complex(0.0, -w0 * t));
    return build_map(p);
  });
}

std::shared_ptr<const centralspin::CentralSpinModel> fig1_model() {
  return std::make_shared<const centralspin::CentralSpinModel>(centralspin::CentralSpinParams{});
}

double overlap_phase_free(const Mat2& a, const Mat2& b) {
  return std::abs((a.adjoint() * b).trace());
}

std::vector<double> rates_of(const ChoiSpectrum& s) {
  std::vector<double> r;
  for (const auto& t : s.terms) r.push_back(t.rate);
  return r;
}

}  // namespace

TEST_SUITE("tlsmap.map") {
  TEST_CASE("build_map: identity parameters give the identity superoperator") {
    CHECK(build_map(TlsMapParams{}).matrix() == Mat4::Identity());
    CHECK(TlsMap().matrix() == Mat4::Identity());
  }

  TEST_CASE("build_map: dephasing elements give a diagonal superoperator") {
    const Complex f = 0.3 * std::exp(Complex(0.0, -1.5 * 2.0));
    TlsMapParams p;
    p.phi22 = f;
    const Mat4 m = build_map(p).matrix();
    CHECK(m == Mat4(Vec4(1.0, f, std::conj(f), 1.0).asDiagonal()));
  }

  TEST_CASE("build_map: central spin map at t = 0 is the identity") {
    const auto model = fig1_model();
    CHECK(matkit::max_abs(centralspin::exact_map(model->propagators(0.0)).matrix() -
                          Mat4::Identity()) < 1e-14);
  }

  TEST_CASE("build_map derives every dependent entry") {
    oracle::Rng rng(21);
    for (int k = 0; k < 100; ++k) {
      const TlsMapParams p = oracle::random_map_params(rng);
      const Mat4 m = build_map(p).matrix();
      REQUIRE(m(0, 2) == std::conj(m(0, 1)));
      REQUIRE(m(0, 3) == 1.0 - m(3, 3));
      REQUIRE(m(2, 0) == std::conj(m(1, 0)));
      REQUIRE(m(2, 1) == std::conj(m(1, 2)));
      REQUIRE(m(2, 2) == std::conj(m(1, 1)));
      REQUIRE(m(2, 3) == std::conj(m(1, 3)));
      REQUIRE(m(3, 0) == 1.0 - m(0, 0));
      REQUIRE(m(3, 1) == -m(0, 1));
      REQUIRE(m(3, 2) == -std::conj(m(0, 1)));
    }
  }

  TEST_CASE("build_map rejects non-finite elements") {
    TlsMapParams p;
    p.phi23 = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(build_map(p), InvalidArgument);
    p = TlsMapParams{};
    p.phi11 = INFINITY;
    CHECK_THROWS_AS(build_map(p), InvalidArgument);
  }

  TEST_CASE("apply_map") {
    oracle::Rng rng(22);
    const Mat2 rho = oracle::random_qubit_state(rng);
    CHECK(matkit::max_abs(apply_map(TlsMap(), rho) - rho) == 0.0);

    rtn::RtnParams rp;
    const double t = 0.37;
    const Mat2 out = apply_map(rtn::rtn_map(rp, t), plus_state());
    const double lam = rtn::lambda_rtn(rp, t).value;
    CHECK(std::abs(out(0, 1) - 0.5 * lam * std::exp(Complex(0.0, -rp.omega0 * t))) < 1e-15);
    CHECK(std::abs(out(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(out(1, 1) - 0.5) < 1e-15);

    centralspin::CentralSpinParams cp;
    cp.n_bath = 4;
    const centralspin::CentralSpinModel model(cp);
    const Mat2 cs = apply_map(centralspin::exact_map(model.propagators(1.0)), rho);
    CHECK(matkit::max_abs(cs - oracle::dense_central_spin_state(cp, rho, 1.0)) <= 1e-9);

    CHECK_THROWS_AS(apply_map(TlsMap(), pauli::z()), InvalidArgument);
  }

  TEST_CASE("apply_map keeps Hermiticity and unit trace for 1000 random states") {
    oracle::Rng rng(23);
    for (int k = 0; k < 1000; ++k) {
      const TlsMap m = build_map(oracle::random_map_params(rng));
      const Mat2 out = apply_map(m, oracle::random_qubit_state(rng));
      REQUIRE(std::abs(out.trace() - 1.0) <= 1e-12);
      REQUIRE(matkit::is_hermitian(out, 1e-12));
    }
  }

  TEST_CASE("phase_covariance_residual") {
    oracle::Rng rng(24);
    const Mat2 rho = oracle::random_qubit_state(rng);
    const TlsMap any = build_map(oracle::random_map_params(rng));
    CHECK(phase_covariance_residual(any, 0.0, rho) < 1e-15);

    const auto model = fig1_model();
    for (int k = 0; k < 50; ++k) {
      const TlsMap m = centralspin::exact_map(model->propagators(rng.uniform(0.0, 10.0)));
      REQUIRE(phase_covariance_residual(m, rng.uniform(-M_PI, M_PI),
                                        oracle::random_qubit_state(rng)) <= 1e-10);
    }

    TlsMapParams p;
    p.phi12 = 0.3;
    CHECK(phase_covariance_residual(build_map(p), M_PI / 4, plus_state()) > 1e-3);
  }
}

TEST_SUITE("tlsmap.generator") {
  TEST_CASE("a constant map has the zero generator") {
    const auto g = generator_from_map(constant_source(Mat4::Identity()), 2.0);
    CHECK(g.matrix() == Mat4::Zero());
    const auto fd = generator_from_map(
        MapSource{[](double) { return Mat4::Identity().eval(); }, {}}, 2.0);
    CHECK(matkit::max_abs(fd.matrix()) < 1e-12);
  }

  TEST_CASE("dephasing map: only l22 and l33 survive") {
    rtn::RtnParams p;
    const double t = 0.3;
    const auto l = generator_from_map(rtn::rtn_map_source(p), t).matrix();
    const auto f = rtn::lambda_rtn(p, t);
    const Complex l22 = (f.derivative - I * p.omega0 * f.value) / f.value;
    CHECK(std::abs(l(1, 1) - l22) < 1e-12);
    CHECK(std::abs(l(2, 2) - std::conj(l22)) < 1e-12);
    Mat4 rest = l;
    rest(1, 1) = rest(2, 2) = 0.0;
    CHECK(matkit::max_abs(rest) < 1e-13);
  }

  TEST_CASE("unitary map: finite differences reproduce l22 = -i w0") {
    const double w0 = 1.5;
    for (double t : {0.0, 1e-6, 0.4, 3.0, 25.0}) {
      const Mat4 l = generator_matrix(unitary_source(w0), t, FiniteDifference{});
      Mat4 expected = Mat4::Zero();
      expected(1, 1) = -I * w0;
      expected(2, 2) = I * w0;
      REQUIRE(matkit::max_abs(l - expected) <= 1e-7);
    }
  }

  TEST_CASE("finite differences agree with the analytic central spin derivative") {
    const auto src = centralspin::map_source(fig1_model());
    for (double t : {0.0, 0.01, 1.0, 4.2}) {
      const Mat4 a = map_derivative(src, t, AnalyticDerivative{});
      const Mat4 fd = map_derivative(src, t, FiniteDifference{});
      REQUIRE(matkit::max_abs(a - fd) <= 1e-7 * std::max(1.0, matkit::max_abs(a)));
    }
  }

  TEST_CASE("singular maps are rejected, not regularized") {
    rtn::RtnParams p;
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(0.01 * k);
    const auto zeros = rtn::lambda_zeros(p, grid);
    REQUIRE_FALSE(zeros.empty());
    CHECK_THROWS_AS(generator_matrix(rtn::rtn_map_source(p), zeros.front()), SingularMap);
    try {
      generator_matrix(constant_source(Mat4::Zero()), 1.25);
      FAIL("expected SingularMap");
    } catch (const SingularMap& e) {
      CHECK(e.time() == 1.25);
    }
  }

  TEST_CASE("non-finite derivatives are reported") {
    MapSource src{[](double) { return Mat4::Identity().eval(); },
                  [](double) { return Mat4::Constant(Complex(NAN, 0.0)).eval(); }};
    CHECK_THROWS_AS(generator_matrix(src, 1.0), NonFiniteDerivative);
  }

  TEST_CASE("validate_generator_structure") {
    const auto model = fig1_model();
    const Mat4 l = generator_matrix(centralspin::map_source(model), 0.7);
    CHECK(validate_generator_structure(l).max_violation <= 1e-10);
    CHECK(validate_generator_structure(Mat4::Zero()).max_violation == 0.0);

    Mat4 bad = Mat4::Zero();
    bad(0, 0) = 0.4;
    bad(3, 0) = 0.4;  // should be -l11
    const auto rep = validate_generator_structure(bad);
    CHECK(rep.max_violation == doctest::Approx(0.8));
    CHECK(rep.worst_relation == "l41 = -l11");
    CHECK_THROWS_AS(TlsGenerator::from_matrix(bad), StructuralViolation);
  }

  TEST_CASE("random generators satisfy every relation and annihilate the trace") {
    oracle::Rng rng(25);
    for (int k = 0; k < 200; ++k) {
      const Mat4 l = oracle::random_generator(rng);
      REQUIRE(validate_generator_structure(l).max_violation <= 1e-12);
      const auto g = TlsGenerator::from_matrix(l);
      REQUIRE(std::abs(g(oracle::random_mat2(rng)).trace()) <= 1e-12);
    }
  }
}

TEST_SUITE("tlsmap.choi") {
  TEST_CASE("zero generator has a zero Choi matrix and zero rates") {
    const Mat4 c = choi_of_generator(TlsGenerator());
    CHECK(c == Mat4::Zero());
    for (const auto& t : pseudo_kraus(c).terms) CHECK(t.rate == 0.0);
  }

  TEST_CASE("Choi block form and tracelessness") {
    oracle::Rng rng(26);
    for (int k = 0; k < 100; ++k) {
      const Mat4 l = oracle::random_generator(rng);
      const Mat4 c = choi_of_generator(TlsGenerator::from_matrix(l));
      Mat2 a, b;
      a << l(0, 0), l(0, 1), std::conj(l(0, 1)), l(0, 3);
      b << l(1, 0), l(1, 1), l(1, 2), l(1, 3);
      REQUIRE(matkit::max_abs(c.topLeftCorner<2, 2>() - a) <= 1e-13);
      REQUIRE(matkit::max_abs(c.topRightCorner<2, 2>() - b) <= 1e-13);
      REQUIRE(matkit::max_abs(c.bottomLeftCorner<2, 2>() - b.adjoint()) <= 1e-13);
      REQUIRE(matkit::max_abs(c.bottomRightCorner<2, 2>() + a) <= 1e-13);
      REQUIRE(std::abs(c.trace()) <= 1e-13);
      REQUIRE(matkit::is_hermitian(c, 1e-13));
    }
  }

  TEST_CASE("dephasing Choi spectrum and pseudo-Kraus operators") {
    rtn::RtnParams p;
    const double t = 0.3;
    const auto g = generator_from_map(rtn::rtn_map_source(p), t);
    const Complex l22 = g.matrix()(1, 1);
    const double m = std::abs(l22);
    const auto s = pseudo_kraus(choi_of_generator(g));
    REQUIRE(s.terms.size() == 4);
    CHECK(s.terms[0].rate == doctest::Approx(m));
    CHECK(std::abs(s.terms[1].rate) < 1e-14);
    CHECK(std::abs(s.terms[2].rate) < 1e-14);
    CHECK(s.terms[3].rate == doctest::Approx(-m));

    Mat2 e1 = Mat2::Zero(), e2 = Mat2::Zero();  // for -|l22| and +|l22|
    e1(0, 0) = -l22 / m;
    e1(1, 1) = 1.0;
    e2(0, 0) = l22 / m;
    e2(1, 1) = 1.0;
    e1 /= std::sqrt(2.0);
    e2 /= std::sqrt(2.0);
    // Equal up to the global phase fixed by the eigenvector convention.
    CHECK(overlap_phase_free(s.terms[3].op, e1) == doctest::Approx(1.0));
    CHECK(overlap_phase_free(s.terms[0].op, e2) == doctest::Approx(1.0));
  }

  TEST_CASE("central spin Choi eigenvalues match the closed forms") {
    const auto model = fig1_model();
    for (double t : {0.3, 0.7, 1.9, 5.2}) {
      const auto r = centralspin::rates(*model, t);
      const auto g = generator_from_map(centralspin::map_source(model), t);
      auto got = rates_of(pseudo_kraus(choi_of_generator(g)));
      const double root = std::sqrt((r.gamma + r.zeta) * (r.gamma + r.zeta) +
                                    4.0 * std::norm(r.theta));
      std::vector<double> expected{r.gamma, -r.zeta, 0.5 * (r.zeta - r.gamma + root),
                                   0.5 * (r.zeta - r.gamma - root)};
      std::sort(expected.begin(), expected.end(), std::greater<>());
      const double scale = std::max(1.0, std::abs(expected.front()));
      for (int k = 0; k < 4; ++k) REQUIRE(std::abs(got[k] - expected[k]) <= 1e-9 * scale);
    }
  }

  TEST_CASE("pseudo-Kraus decomposition reconstructs random generators") {
    oracle::Rng rng(27);
    for (int k = 0; k < 200; ++k) {
      const auto g = TlsGenerator::from_matrix(oracle::random_generator(rng));
      const auto s = pseudo_kraus(choi_of_generator(g));
      REQUIRE(s.terms.size() == 4);
      for (int b = 0; b < 4; ++b) {
        const Mat2 e = oracle::basis_matrix(b);
        REQUIRE(matkit::max_abs(s(e) - g(e)) <= 1e-9);
      }
      for (std::size_t i = 0; i < 4; ++i) {
        if (i > 0) REQUIRE(s.terms[i - 1].rate >= s.terms[i].rate);
        for (std::size_t j = 0; j < 4; ++j) {
          const Complex ip = (s.terms[i].op.adjoint() * s.terms[j].op).trace();
          REQUIRE(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-9);
        }
      }
    }
  }
}

TEST_SUITE("tlsmap.canonical") {
  TEST_CASE("dephasing: canonical Hamiltonian is the bare one") {
    rtn::RtnParams p;
    for (double t : {0.1, 0.3, 2.0}) {
      const auto d = canonical_master_equation(rtn::rtn_map_source(p), t);
      REQUIRE(matkit::max_abs(d.hamiltonian - 0.5 * p.omega0 * pauli::z()) <= 1e-12);
    }
  }

  TEST_CASE("central spin: H = -(Im Theta / 2) sz and gain/loss/dephasing jumps") {
    const auto model = fig1_model();
    const double t = 0.7;
    const auto r = centralspin::rates(*model, t);
    const auto d = canonical_master_equation(centralspin::map_source(model), t);
    CHECK(matkit::max_abs(d.hamiltonian + 0.5 * r.theta.imag() * pauli::z()) <= 1e-10);

    bool saw_plus = false, saw_minus = false;
    double nu_z = 0.0;
    for (const auto& j : d.jumps) {
      if (matkit::max_abs(j.op) < 1e-12 || std::abs(j.rate) < 1e-14) continue;
      if (overlap_phase_free(j.op, pauli::plus()) > 1.0 - 1e-12) {
        saw_plus = true;
        CHECK(j.rate == doctest::Approx(r.gamma).epsilon(1e-10));
      } else if (overlap_phase_free(j.op, pauli::minus()) > 1.0 - 1e-12) {
        saw_minus = true;
        CHECK(j.rate == doctest::Approx(-r.zeta).epsilon(1e-10));
      } else {
        // Traceless diagonal: proportional to sz.
        REQUIRE(std::abs(j.op(0, 1)) + std::abs(j.op(1, 0)) < 1e-12);
        REQUIRE(std::abs(j.op(0, 0) + j.op(1, 1)) < 1e-12);
        nu_z += j.rate * std::norm(j.op(0, 0));
      }
    }
    CHECK(saw_plus);
    CHECK(saw_minus);
    CHECK(nu_z == doctest::Approx(r.nu_z).epsilon(1e-9));
  }

  TEST_CASE("purely unitary generator round-trips its Hamiltonian") {
    oracle::Rng rng(28);
    for (int k = 0; k < 100; ++k) {
      Mat2 h = oracle::random_hermitian(rng, 2);
      h -= 0.5 * h.trace() * Mat2::Identity();
      const auto g = TlsGenerator::from_matrix(oracle::lindblad_superop(h, {}));
      const auto d = canonical_form(pseudo_kraus(choi_of_generator(g)));
      REQUIRE(matkit::max_abs(d.hamiltonian - h) <= 1e-10);
      // The spectrum contains a +-|h| pair whose dissipators cancel.
      GeneratorDecomposition dissipative_only;
      dissipative_only.jumps = d.jumps;
      REQUIRE(matkit::max_abs(dissipative_only.superoperator()) <= 1e-10);
    }
  }

  TEST_CASE("canonical form of random generators") {
    oracle::Rng rng(29);
    for (int k = 0; k < 200; ++k) {
      const auto g = TlsGenerator::from_matrix(oracle::random_generator(rng));
      const auto d = canonical_form(pseudo_kraus(choi_of_generator(g)));
      REQUIRE(std::abs(d.hamiltonian.trace()) <= 1e-10);
      REQUIRE(matkit::is_hermitian(d.hamiltonian, 1e-10));
      for (const auto& j : d.jumps) REQUIRE(std::abs(j.op.trace()) <= 1e-10);
      for (int b = 0; b < 4; ++b) {
        const Mat2 e = oracle::basis_matrix(b);
        REQUIRE(matkit::max_abs(d(e) - g(e)) <= 1e-9);
      }
      REQUIRE(matkit::max_abs(d.superoperator() - g.matrix()) <= 1e-9);
    }
  }
}

TEST_SUITE("tlsmap.propagation") {
  TEST_CASE("zero generator keeps the state") {
    oracle::Rng rng(30);
    const Mat2 rho = oracle::random_qubit_state(rng);
    const auto traj = propagate_master_equation([](double) { return GeneratorDecomposition{}; },
                                                rho, {0.0, 0.5, 1.0, 7.0});
    REQUIRE(traj.size() == 4);
    for (const auto& s : traj) CHECK(matkit::max_abs(s - rho) == 0.0);
  }

  TEST_CASE("central spin master equation reproduces the map before the first crossing") {
    const auto model = fig1_model();
    oracle::Rng rng(31);
    const Mat2 rho0 = oracle::random_qubit_state(rng);
    std::vector<double> grid;
    for (int k = 0; k <= 50; ++k) grid.push_back(0.01 * k);
    const auto traj = propagate_master_equation(
        [&](double t) {
          return canonical_master_equation(centralspin::map_source(model), t);
        },
        rho0, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      REQUIRE(matkit::max_abs(traj[k] - centralspin::exact_state(*model, rho0, grid[k])) <= 1e-6);
      REQUIRE(std::abs(traj[k].trace() - 1.0) <= 1e-8);
    }
  }

  TEST_CASE("crossing a singular generator is detected through the indicator") {
    const auto model = fig1_model();
    std::vector<double> grid;
    for (int k = 0; k <= 100; ++k) grid.push_back(0.01 * k);
    PropagationOptions opt;
    opt.singularity_indicator = [&](double t) {
      const auto pr = model->propagators(t);
      return pr.alpha - pr.eta;
    };
    const auto source = [&](double t) {
      return centralspin::canonical_decomposition_cs(centralspin::rates(*model, t));
    };
    const auto tr = propagate_until_singular(source, Mat2::Identity() * 0.5, grid, opt);
    REQUIRE(tr.singular_at.has_value());
    const auto pr = model->propagators(*tr.singular_at);
    CHECK(std::abs(pr.alpha - pr.eta) < 1e-12);
    CHECK(tr.states.size() == 58);  // grid points 0 .. 0.57
    CHECK_THROWS_AS(propagate_master_equation(source, Mat2::Identity() * 0.5, grid, opt),
                    SingularMap);
  }

  TEST_CASE("Markovian dephasing never re-coheres") {
    rtn::RtnParams p;
    p.gamma = 10.0 * rtn::switching_amplitude(p);
    REQUIRE(rtn::markovianity(p).markovian);
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(0.05 * k);
    const auto traj = propagate_master_equation(
        [&](double t) { return canonical_master_equation(rtn::rtn_map_source(p), t); },
        plus_state(), grid);
    for (std::size_t k = 1; k < traj.size(); ++k) {
      REQUIRE(std::abs(traj[k](0, 1)) <= std::abs(traj[k - 1](0, 1)) + 1e-15);
    }
  }

  TEST_CASE("more substeps reduce the integration error") {
    rtn::RtnParams p;
    p.gamma = 5.0;
    const std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0};
    auto error = [&](int substeps) {
      PropagationOptions opt;
      opt.substeps = substeps;
      const auto traj = propagate_master_equation(
          [&](double t) { return rtn::canonical_decomposition_rtn(p, t); }, plus_state(), grid,
          opt);
      return matkit::max_abs(traj.back() - rtn::rtn_state(p, plus_state(), 2.0));
    };
    CHECK(error(20) < error(2));
  }

  TEST_CASE("grid validation") {
    const auto zero = [](double) { return GeneratorDecomposition{}; };
    const Mat2 rho = plus_state();
    CHECK_THROWS_AS(propagate_master_equation(zero, rho, {0.1, 0.2}), InvalidArgument);
    CHECK_THROWS_AS(propagate_master_equation(zero, rho, {0.0, 0.2, 0.2}), InvalidArgument);
    PropagationOptions opt;
    opt.substeps = 0;
    CHECK_THROWS_AS(propagate_master_equation(zero, rho, {0.0, 1.0}, opt), InvalidArgument);
    CHECK_THROWS_AS(propagate_master_equation(zero, pauli::x(), {0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(
        propagate_master_equation(zero, rho, {0.0, 1e-300, std::nextafter(1e-300, 1.0)}), Error);
  }
}

TEST_SUITE("tlsmap.steady_state") {
  TEST_CASE("central spin fixed point") {
    const auto model = fig1_model();
    const double t = 1.9;
    const auto r = centralspin::rates(*model, t);
    const auto g = generator_from_map(centralspin::map_source(model), t);
    const auto ss = steady_state(g);
    REQUIRE(ss.basis.size() == 1);
    REQUIRE(ss.representative.has_value());
    const double x = -r.gamma / r.zeta;
    Mat2 expected = Mat2::Zero();
    expected(0, 0) = x / (1.0 + x);
    expected(1, 1) = 1.0 / (1.0 + x);
    CHECK(matkit::max_abs(*ss.representative - expected) <= 1e-9);
    for (const auto& b : ss.basis) CHECK(matkit::max_abs(g(b)) <= 1e-8);
  }

  TEST_CASE("dephasing keeps both populations") {
    const auto g = generator_from_map(rtn::rtn_map_source(rtn::RtnParams{}), 0.3);
    const auto ss = steady_state(g);
    REQUIRE(ss.basis.size() == 2);
    CHECK(matkit::max_abs(ss.basis[0] - oracle::basis_matrix(0)) < 1e-12);
    CHECK(matkit::max_abs(ss.basis[1] - oracle::basis_matrix(3)) < 1e-12);
    REQUIRE(ss.representative.has_value());
    CHECK(matkit::max_abs(*ss.representative - 0.5 * Mat2::Identity()) < 1e-12);
  }

  TEST_CASE("zero generator: everything is stationary") {
    const auto ss = steady_state(TlsGenerator());
    CHECK(ss.basis.size() == 4);
    REQUIRE(ss.representative.has_value());
    CHECK(matkit::max_abs(*ss.representative - 0.5 * Mat2::Identity()) < 1e-12);
  }

  TEST_CASE("random generators: the null space is annihilated") {
    oracle::Rng rng(32);
    for (int k = 0; k < 200; ++k) {
      const auto g = TlsGenerator::from_matrix(oracle::random_generator(rng));
      const auto ss = steady_state(g);
      REQUIRE(ss.basis.size() >= 1);
      for (const auto& b : ss.basis) REQUIRE(matkit::max_abs(g(b)) <= 1e-8);
      if (ss.representative) {
        REQUIRE(std::abs(ss.representative->trace() - 1.0) <= 1e-10);
        REQUIRE(matkit::is_hermitian(*ss.representative, 1e-10));
        REQUIRE(matkit::max_abs(g(*ss.representative)) <= 1e-8);
      }
    }
  }
}
