#include "finbath/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <sstream>
#include <utility>

#include "finbath/centralspin.hpp"
#include "finbath/errors.hpp"
#include "finbath/rtn.hpp"
#include "finbath/thermo.hpp"
#include "finbath/tlsmap.hpp"

namespace finbath::verify {

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

std::string fixed(double x) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << x;
  return os.str();
}

template <class Fn>
CheckResult timed(std::string name, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = std::move(name);
  try {
    Outcome o = fn();
    r.passed = o.passed;
    r.detail = std::move(o.detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[k] = a + (b - a) * k / (n - 1);
  return t;
}

Outcome bound(double value, double tol, const std::string& label) {
  return {value <= tol, label + " " + sci(value) + " (tol " + sci(tol) + ")"};
}

// A full-rank state with a complex coherence, so that no map entry is masked.
Mat2 generic_state() {
  Mat2 rho;
  rho << 0.6, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.4;
  return rho;
}

Mat2 kraus_apply(const std::vector<Mat2>& ks, const Mat2& rho) {
  Mat2 out = Mat2::Zero();
  for (const Mat2& k : ks) out += k * rho * k.adjoint();
  return out;
}

double kraus_completeness(const std::vector<Mat2>& ks) {
  Mat2 s = Mat2::Zero();
  for (const Mat2& k : ks) s += k.adjoint() * k;
  return matkit::max_abs(s - Mat2::Identity());
}

std::vector<double> sorted_rates(const tlsmap::ChoiSpectrum& s) {
  std::vector<double> r;
  for (const auto& term : s.terms) r.push_back(term.rate);
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

double rate_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return HUGE_VAL;
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

// Times away from the 1e-3 neighbourhood of any singular point.
const std::vector<double> kProbeTimes{0.3, 0.7, 1.0, 1.9, 3.3, 5.2, 7.1, 9.4};

// ---------------------------------------------------------------------------
// Central spin

struct CsContext {
  centralspin::CentralSpinParams params;
  Mat2 rho0;
  std::shared_ptr<const centralspin::CentralSpinModel> model;
  tlsmap::MapSource source;
};

CsContext make_cs(const centralspin::CentralSpinParams& p, const Mat2& rho0, bool fault) {
  CsContext c{p, rho0, std::make_shared<const centralspin::CentralSpinModel>(p), {}};
  c.source = centralspin::map_source(c.model);
  if (fault) {
    auto map = c.source.map;
    auto der = c.source.derivative;
    c.source.map = [map](double t) {
      Mat4 m = map(t);
      m(3, 3) += 1e-3 * t;
      return m;
    };
    c.source.derivative = [der](double t) {
      Mat4 m = der(t);
      m(3, 3) += 1e-3;
      return m;
    };
  }
  return c;
}

bool cs_regular(const centralspin::Propagators& pr) {
  return std::abs(pr.alpha - pr.eta) > 1e-3 && std::abs(pr.delta) > 1e-3;
}

CheckResult brute_force(const centralspin::CentralSpinParams& base, int n) {
  return timed("cs-brute-force-N" + std::to_string(n), [&] {
    centralspin::CentralSpinParams p = base;
    p.n_bath = n;
    const centralspin::CentralSpinModel model(p);
    const centralspin::BruteForceEvolver dense(p);
    const Mat2 rho0 = generic_state();
    double worst = 0.0;
    for (double t : linspace(0.0, 10.0, 100)) {
      worst = std::max(worst, matkit::max_abs(centralspin::exact_state(model, rho0, t) -
                                              dense.state(rho0, t)));
    }
    return bound(worst, 1e-9, "max |closed form - dense| =");
  });
}

CheckResult cs_kraus(const CsContext& c) {
  return timed("cs-kraus-channel", [&] {
    double completeness = 0.0, reconstruction = 0.0;
    for (double t : linspace(0.0, 10.0, 101)) {
      const auto pr = c.model->propagators(t);
      const auto arr = centralspin::kraus_ops_cs(pr);
      const std::vector<Mat2> ks(arr.begin(), arr.end());
      completeness = std::max(completeness, kraus_completeness(ks));
      reconstruction = std::max(reconstruction, matkit::max_abs(kraus_apply(ks, c.rho0) -
                                                                centralspin::exact_state(pr, c.rho0)));
    }
    const bool ok = completeness <= 1e-10 && reconstruction <= 1e-9;
    return Outcome{ok, "completeness " + sci(completeness) + " (tol 1e-10), reconstruction " +
                           sci(reconstruction) + " (tol 1e-9)"};
  });
}

CheckResult cs_round_trip(const CsContext& c) {
  return timed("cs-map-ode-round-trip", [&] {
    const auto grid = linspace(0.0, 10.0, 1001);
    auto model = c.model;
    tlsmap::PropagationOptions opt;
    opt.singularity_indicator = [model](double t) {
      const auto pr = model->propagators(t);
      return pr.alpha - pr.eta;
    };
    const auto traj = tlsmap::propagate_until_singular(
        [model](double t) {
          return centralspin::canonical_decomposition_cs(centralspin::rates(*model, t));
        },
        c.rho0, grid, opt);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      worst = std::max(worst, matkit::max_abs(traj.states[k] -
                                              centralspin::exact_state(*model, c.rho0, grid[k])));
    }
    Outcome o = bound(worst, 1e-6, "max |RK4 - map| =");
    const double reached = grid[traj.states.size() - 1];
    o.detail += " on [0, " + fixed(reached) + "]";
    if (traj.singular_at) {
      o.detail += "; generator singular (alpha = eta) at t = " + fixed(*traj.singular_at);
    }
    o.passed = o.passed && traj.states.size() >= 2;
    return o;
  });
}

CheckResult cs_structure(const CsContext& c) {
  return timed("cs-generator-structure", [&] {
    double worst = 0.0;
    std::string relation;
    for (double t : kProbeTimes) {
      if (!cs_regular(c.model->propagators(t))) continue;
      const Mat4 l = tlsmap::generator_matrix(c.source, t);
      const auto rep = tlsmap::validate_generator_structure(l);
      const double rel = rep.max_violation / std::max(1.0, matkit::max_abs(l));
      if (rel > worst) {
        worst = rel;
        relation = rep.worst_relation + " at t = " + fixed(t);
      }
    }
    Outcome o = bound(worst, 1e-10, "max relative violation");
    if (!relation.empty()) o.detail += ", " + relation;
    return o;
  });
}

CheckResult cs_pipeline(const CsContext& c) {
  return timed("cs-pipeline", [&] {
    double h_gap = 0.0, sup_gap = 0.0, spec_gap = 0.0;
    int used = 0;
    for (double t : kProbeTimes) {
      const auto pr = c.model->propagators(t);
      if (!cs_regular(pr)) continue;
      ++used;
      const auto r = centralspin::rates(pr, t);
      const auto gen = tlsmap::generator_from_map(c.source, t);
      const auto spectrum = tlsmap::pseudo_kraus(tlsmap::choi_of_generator(gen));
      const auto dec = tlsmap::canonical_form(spectrum);
      const auto ref = centralspin::canonical_decomposition_cs(r);
      const Mat4 ref_sup = ref.superoperator();
      const double scale = std::max(1.0, matkit::max_abs(ref_sup));
      h_gap = std::max(h_gap, matkit::max_abs(dec.hamiltonian - ref.hamiltonian) / scale);
      sup_gap = std::max(sup_gap, matkit::max_abs(dec.superoperator() - ref_sup) / scale);
      spec_gap = std::max(spec_gap, rate_gap(sorted_rates(spectrum),
                                             sorted_rates(centralspin::choi_spectrum_cs(r))) /
                                        scale);
    }
    const double worst = std::max({h_gap, sup_gap, spec_gap});
    return Outcome{worst <= 1e-8 && used > 0,
                   std::to_string(used) + " times; H " + sci(h_gap) + ", generator " +
                       sci(sup_gap) + ", Choi rates " + sci(spec_gap) + " (tol 1e-8)"};
  });
}

CheckResult cs_phase_covariance(const CsContext& c) {
  return timed("cs-phase-covariance", [&] {
    double worst = 0.0;
    for (double t : linspace(0.0, 10.0, 21)) {
      const auto map = centralspin::exact_map(c.model->propagators(t));
      for (double phi : {0.3, 1.1, 2.5}) {
        worst = std::max(worst, tlsmap::phase_covariance_residual(map, phi, c.rho0));
      }
    }
    return bound(worst, 1e-12, "max residual");
  });
}

CheckResult cs_finite_difference(const CsContext& c) {
  return timed("cs-generator-vs-finite-difference", [&] {
    const double t = 1.0;
    const Mat4 exact = tlsmap::generator_matrix(c.source, t);
    const Mat4 fd = tlsmap::generator_matrix(c.source, t, tlsmap::FiniteDifference{});
    return bound(matkit::max_abs(exact - fd) / std::max(1.0, matkit::max_abs(exact)), 1e-6,
                 "relative gap at t = 1:");
  });
}

CheckResult cs_thermo(const CsContext& c) {
  return timed("cs-thermo-identities", [&] {
    const double w0 = c.params.omega0;
    const auto energy = [&](double t) {
      const Mat2 rho = centralspin::exact_state(*c.model, c.rho0, t);
      return 0.5 * w0 * (rho(0, 0) - rho(1, 1)).real();
    };
    const Mat2 mixed = 0.5 * Mat2::Identity();
    double first_law = 0.0, current = 0.0, maximally_mixed = 0.0;
    int bloch_gaps = 0;
    const double h = 1e-4;
    for (double t : linspace(0.0, 10.0, 201)) {
      if (t > 0.0) {
        maximally_mixed = std::max(
            maximally_mixed, std::abs(thermo::charging_power_cs(*c.model, mixed, t).power));
      }
      try {
        const auto ps = thermo::charging_power_cs(*c.model, c.rho0, t);
        first_law =
            std::max(first_law, std::abs(ps.power - ps.heat_current - ps.passive_current));
      } catch (const BlochOriginSingularity&) {
        ++bloch_gaps;
      }
      if (t >= 2.0 * h) {
        const double fd = (-energy(t + 2 * h) + 8 * energy(t + h) - 8 * energy(t - h) +
                           energy(t - 2 * h)) /
                          (12 * h);
        current = std::max(current, std::abs(thermo::heat_current_cs(*c.model, c.rho0, t) - fd));
      }
    }
    const bool ok = first_law <= 1e-8 && current <= 1e-6 && maximally_mixed <= 1e-8;
    std::string d = "P - J - J_passive " + sci(first_law) + " (tol 1e-8), J vs d<H>/dt " +
                    sci(current) + " (tol 1e-6), P at p = 0 " + sci(maximally_mixed) +
                    " (tol 1e-8)";
    if (bloch_gaps > 0) d += "; " + std::to_string(bloch_gaps) + " points at the Bloch origin";
    return Outcome{ok, d};
  });
}

CheckResult cs_perturbative(const centralspin::CentralSpinParams& base) {
  return timed("cs-perturbative-convergence", [&] {
    std::vector<double> gaps;
    std::string d;
    for (double eps : {0.5, 0.1, 0.05}) {
      centralspin::CentralSpinParams p = base;
      p.epsilon = eps;
      const centralspin::CentralSpinModel model(p);
      double gap = 0.0;
      for (double t : linspace(0.0, 25.0, 2501)) {
        const auto pr = model.propagators(t);
        if (std::abs(pr.delta) <= 1e-12) continue;
        const double exact = -0.5 * (pr.ddelta / pr.delta).imag();
        const Mat2 hp = centralspin::perturbative_h_can(p, t);
        const double second_order = 0.5 * (hp(0, 0) - hp(1, 1)).real();
        gap = std::max(gap, std::abs(exact - second_order));
      }
      gaps.push_back(gap);
      d += (d.empty() ? "sup gaps " : ", ") + sci(gap);
    }
    const bool ok = gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] * 10.0 <= gaps[0];
    return Outcome{ok, d + " for eps = 0.5, 0.1, 0.05"};
  });
}

void central_spin_suites(const centralspin::CentralSpinParams& p, const Mat2& rho0,
                         const VerifyOptions& o, std::vector<CheckResult>& out) {
  for (int n : {1, 2, 4, 8}) out.push_back(brute_force(p, n));
  const CsContext c = make_cs(p, rho0, o.inject_phi44_fault);
  out.push_back(cs_kraus(c));
  out.push_back(cs_round_trip(c));
  out.push_back(cs_structure(c));
  out.push_back(cs_pipeline(c));
  out.push_back(cs_phase_covariance(c));
  out.push_back(cs_finite_difference(c));
  out.push_back(cs_thermo(c));
  out.push_back(cs_perturbative(p));
}

// ---------------------------------------------------------------------------
// Random telegraph noise

std::string tag(const rtn::RtnParams& p) {
  return "gamma=" + csv::format_double(p.gamma);
}

CheckResult rtn_round_trip(const rtn::RtnParams& p, const Mat2& rho0) {
  return timed("rtn-map-ode-round-trip[" + tag(p) + "]", [&] {
    const auto grid = linspace(0.0, 10.0, 1001);
    tlsmap::PropagationOptions opt;
    opt.singularity_indicator = [p](double t) { return rtn::lambda_rtn(p, t).value; };
    const auto traj = tlsmap::propagate_until_singular(
        [p](double t) { return rtn::canonical_decomposition_rtn(p, t); }, rho0, grid, opt);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      worst = std::max(worst, matkit::max_abs(traj.states[k] - rtn::rtn_state(p, rho0, grid[k])));
    }
    Outcome o = bound(worst, 1e-6, "max |RK4 - map| =");
    o.detail += " on [0, " + fixed(grid[traj.states.size() - 1]) + "]";
    if (traj.singular_at) o.detail += "; Lambda vanishes at t = " + fixed(*traj.singular_at);
    o.passed = o.passed && traj.states.size() >= 2;
    return o;
  });
}

CheckResult rtn_pipeline(const rtn::RtnParams& p) {
  return timed("rtn-pipeline[" + tag(p) + "]", [&] {
    const auto source = rtn::rtn_map_source(p);
    const Mat2 h_ref = 0.5 * p.omega0 * matkit::pauli::z();
    double h_gap = 0.0, sup_gap = 0.0;
    int used = 0;
    for (double t : kProbeTimes) {
      if (std::abs(rtn::lambda_rtn(p, t).value) <= 1e-3) continue;
      ++used;
      const auto dec = tlsmap::canonical_master_equation(source, t);
      const Mat4 ref = rtn::canonical_decomposition_rtn(p, t).superoperator();
      const double scale = std::max(1.0, matkit::max_abs(ref));
      h_gap = std::max(h_gap, matkit::max_abs(dec.hamiltonian - h_ref) / scale);
      sup_gap = std::max(sup_gap, matkit::max_abs(dec.superoperator() - ref) / scale);
    }
    return Outcome{std::max(h_gap, sup_gap) <= 1e-8 && used > 0,
                   std::to_string(used) + " times; H " + sci(h_gap) + ", generator " +
                       sci(sup_gap) + " (tol 1e-8)"};
  });
}

CheckResult rtn_kraus(const rtn::RtnParams& p, const Mat2& rho0) {
  return timed("rtn-kraus-channel[" + tag(p) + "]", [&] {
    double completeness = 0.0, reconstruction = 0.0;
    for (double t : linspace(0.0, 10.0, 101)) {
      const auto arr = rtn::rtn_kraus(p, t);
      const std::vector<Mat2> ks(arr.begin(), arr.end());
      completeness = std::max(completeness, kraus_completeness(ks));
      reconstruction = std::max(
          reconstruction, matkit::max_abs(kraus_apply(ks, rho0) - rtn::rtn_state(p, rho0, t)));
    }
    return Outcome{completeness <= 1e-10 && reconstruction <= 1e-9,
                   "completeness " + sci(completeness) + " (tol 1e-10), reconstruction " +
                       sci(reconstruction) + " (tol 1e-9)"};
  });
}

CheckResult rtn_thermo(const rtn::RtnParams& p, const Mat2& rho0) {
  return timed("rtn-thermo[" + tag(p) + "]", [&] {
    double current = 0.0, max_power = -HUGE_VAL;
    for (double t : linspace(0.0, 10.0, 201)) {
      current = std::max(current, std::abs(thermo::heat_current_rtn(p, rho0, t)));
      try {
        max_power = std::max(max_power, thermo::charging_power_rtn(p, rho0, t));
      } catch (const BlochOriginSingularity&) {
      }
    }
    bool ok = current <= 1e-12;
    std::string d = "max |J| " + sci(current) + " (tol 1e-12)";
    if (rtn::regime(p) == rtn::Regime::Overdamped) {
      ok = ok && max_power <= 0.0;
      d += ", overdamped max P " + sci(max_power) + " (must be <= 0)";
    }
    return Outcome{ok, d};
  });
}

CheckResult rtn_monte_carlo(const rtn::RtnParams& p, std::uint64_t seed, std::size_t n_traj,
                            unsigned threads) {
  return timed("rtn-monte-carlo[" + tag(p) + "]", [&] {
    const auto grid = linspace(0.0, 10.0, 50);
    rtn::MonteCarloOptions opt;
    opt.seed = seed;
    opt.trajectories = n_traj;
    opt.threads = threads;
    const auto mc = rtn::monte_carlo_lambda(p, grid, opt);
    // Two-sided family-wise threshold: a correct estimator trips it with
    // probability 1e-3 over the 49 random grid points. A flat 3 se bound would
    // trip for about one seed in eight.
    const double limit = 4.26;
    int outside = 0, within_abs = 0;
    double worst_z = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double diff = std::abs(mc.lambda[k] - rtn::lambda_rtn(p, grid[k]).value);
      const double se = mc.std_error[k];
      if (diff > limit * se + 1e-15) ++outside;
      if (se > 0.0) worst_z = std::max(worst_z, diff / se);
      if (diff <= 0.01) ++within_abs;
    }
    const double frac = static_cast<double>(within_abs) / grid.size();
    return Outcome{outside == 0 && frac >= 0.95,
                   std::to_string(n_traj) + " trajectories, seed " + std::to_string(seed) +
                       ": worst |diff|/se " + fixed(worst_z) + " (limit 4.26), " +
                       std::to_string(outside) + " points beyond the limit, " + fixed(100 * frac) +
                       "% within 0.01 (need 95%)"};
  });
}

CheckResult bosonic_witness() {
  return timed("bosonic-no-go-witness", [&] {
    const double a = 0.1, cutoff = 5.0;
    const auto grid = linspace(0.1, 5.0, 491);
    double weakest = HUGE_VAL;
    bool chi_positive = true;
    for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      double lo = HUGE_VAL, hi = -HUGE_VAL, peak = 0.0;
      for (double t : grid) {
        const auto w = rtn::bosonic_chi_ohmic(a, cutoff, t, gamma);
        lo = std::min(lo, w.lhs);
        hi = std::max(hi, w.lhs);
        peak = std::max(peak, std::abs(w.lhs));
        chi_positive = chi_positive && w.chi > 0.0;
      }
      weakest = std::min(weakest, (hi - lo) / peak);
    }
    const rtn::RtnParams under{};
    const auto zeros = rtn::lambda_zeros(under, linspace(0.0, 10.0, 1001));
    return Outcome{weakest > 1e-3 && chi_positive && !zeros.empty(),
                   "smallest relative spread " + sci(weakest) + " (need > 1e-3), chi > 0: " +
                       (chi_positive ? "yes" : "no") + ", underdamped Lambda zeros on [0, 10]: " +
                       std::to_string(zeros.size())};
  });
}

void rtn_suites(const rtn::RtnParams& p, const Mat2& rho0, std::uint64_t seed,
                std::size_t n_traj, unsigned threads, std::vector<CheckResult>& out) {
  out.push_back(rtn_round_trip(p, rho0));
  out.push_back(rtn_pipeline(p));
  out.push_back(rtn_kraus(p, rho0));
  out.push_back(rtn_thermo(p, rho0));
  out.push_back(rtn_monte_carlo(p, seed, n_traj, threads));
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& o) {
  std::vector<CheckResult> out;
  if (o.config) {
    const auto& c = *o.config;
    if (c.model == scenario::ModelKind::CentralSpin) {
      central_spin_suites(c.cs, c.rho0(), o, out);
    } else {
      rtn_suites(c.rtn, c.rho0(), c.seed, c.mc_trajectories, o.threads, out);
    }
  } else {
    const scenario::ScenarioConfig defaults;
    central_spin_suites(centralspin::CentralSpinParams{}, generic_state(), o, out);
    rtn::RtnParams under{};
    rtn_suites(under, generic_state(), o.seed.value_or(defaults.seed),
               o.mc_trajectories.value_or(defaults.mc_trajectories), o.threads, out);
    rtn::RtnParams over{};
    over.gamma = 5.0;
    out.push_back(rtn_round_trip(over, generic_state()));
    out.push_back(rtn_pipeline(over));
    out.push_back(rtn_thermo(over, defaults.rho0()));
  }
  out.push_back(bosonic_witness());
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

}  // namespace finbath::verify
