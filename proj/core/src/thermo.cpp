#include "finbath/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "finbath/errors.hpp"

namespace finbath::thermo {

double Bloch::norm() const { return std::sqrt(x * x + y * y + z * z); }

Bloch bloch(const Mat2& rho) {
  matkit::require_density_matrix(rho, "bloch input");
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

double heat_current_cs(const centralspin::CentralSpinModel& model, const Mat2& rho0, double t) {
  matkit::require_density_matrix(rho0, "initial state");
  const centralspin::Propagators pr = model.propagators(t);
  const double p00 = rho0(0, 0).real();
  return model.params().omega0 * (pr.deta + (pr.dalpha - pr.deta) * p00);
}

double heat_current_rtn(const rtn::RtnParams& p, const Mat2& rho0, double t) {
  matkit::require_density_matrix(rho0, "initial state");
  const Mat2 drho = matkit::devec(rtn::rtn_map_derivative(p, t) * matkit::vec(rho0));
  return (0.5 * p.omega0 * matkit::pauli::z() * drho).trace().real();
}

namespace {

void require_positive_frequency(double omega0) {
  if (!(omega0 > 0.0)) throw InvalidArgument("ergotropy requires w0 > 0");
}

}  // namespace

double ergotropy(const Mat2& rho, double omega0) {
  require_positive_frequency(omega0);
  const Bloch b = bloch(rho);
  return 0.5 * omega0 * (b.z + b.norm());
}

double ergotropy_passive(const Mat2& rho, double omega0) {
  require_positive_frequency(omega0);
  matkit::require_density_matrix(rho, "ergotropy input");
  const Mat2 h = 0.5 * omega0 * matkit::pauli::z();
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  const auto& pops = es.eigenvalues();  // ascending
  // Largest population in the ground level -w0/2.
  const double passive = -0.5 * omega0 * pops(1) + 0.5 * omega0 * pops(0);
  return (h * rho).trace().real() - passive;
}

PowerSample charging_power_cs(const centralspin::CentralSpinModel& model, const Mat2& rho0,
                              double t) {
  matkit::require_density_matrix(rho0, "initial state");
  const double w0 = model.params().omega0;
  const centralspin::Propagators pr = model.propagators(t);
  const double p00 = rho0(0, 0).real();
  const double p11 = rho0(1, 1).real();
  const Complex c0 = rho0(0, 1);

  const Complex c = pr.delta * c0;
  const Complex dc = pr.ddelta * c0;
  const double x = 2.0 * c.real(), dx = 2.0 * dc.real();
  const double y = -2.0 * c.imag(), dy = -2.0 * dc.imag();
  const double z = 2.0 * (pr.alpha * p00 + pr.eta * p11) - 1.0;
  const double dz = 2.0 * (pr.dalpha * p00 + pr.deta * p11);
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r <= 1e-12) {
    throw BlochOriginSingularity("Bloch vector vanishes at t = " + std::to_string(t), t);
  }
  const double dr = (x * dx + y * dy + z * dz) / r;

  PowerSample out;
  out.heat_current = heat_current_cs(model, rho0, t);
  out.passive_current = 0.5 * w0 * dr;
  out.power = 0.5 * w0 * (dz + dr);
  const double mismatch = std::abs(out.power - (out.heat_current + out.passive_current));
  if (mismatch > 1e-8 * std::max(1.0, std::abs(out.power))) {
    throw Error("charging power differs from J + J_passive by " + std::to_string(mismatch));
  }
  return out;
}

namespace {

struct RtnErgoTerms {
  double z0;
  double coherence2;  // |rho01(0)|^2
};

RtnErgoTerms rtn_terms(const Mat2& rho0) {
  matkit::require_density_matrix(rho0, "initial state");
  return {(rho0(0, 0) - rho0(1, 1)).real(), std::norm(rho0(0, 1))};
}

}  // namespace

double ergotropy_rtn(const rtn::RtnParams& p, const Mat2& rho0, double t) {
  require_positive_frequency(p.omega0);
  const RtnErgoTerms s = rtn_terms(rho0);
  const double lam = rtn::lambda_rtn(p, t).value;
  return 0.5 * p.omega0 * (s.z0 + std::sqrt(s.z0 * s.z0 + 4.0 * s.coherence2 * lam * lam));
}

double charging_power_rtn(const rtn::RtnParams& p, const Mat2& rho0, double t) {
  const RtnErgoTerms s = rtn_terms(rho0);
  const rtn::DephasingFactor f = rtn::lambda_rtn(p, t);
  const double den = std::sqrt(s.z0 * s.z0 + 4.0 * s.coherence2 * f.value * f.value);
  if (den <= 1e-12) {
    throw BlochOriginSingularity("Bloch vector vanishes at t = " + std::to_string(t), t);
  }
  return 2.0 * p.omega0 * s.coherence2 * f.value * f.derivative / den;
}

ThermoSample sample_cs(const centralspin::CentralSpinModel& model, const Mat2& rho0, double t) {
  const PowerSample ps = charging_power_cs(model, rho0, t);
  const Mat2 rho = centralspin::exact_state(model, rho0, t);
  ThermoSample out;
  out.t = t;
  out.heat_current = ps.heat_current;
  out.passive_current = ps.passive_current;
  out.power = ps.power;
  out.bloch = bloch(rho);
  out.ergotropy = ergotropy(rho, model.params().omega0);
  return out;
}

ThermoSample sample_rtn(const rtn::RtnParams& p, const Mat2& rho0, double t) {
  ThermoSample out;
  out.t = t;
  out.power = charging_power_rtn(p, rho0, t);
  out.heat_current = heat_current_rtn(p, rho0, t);
  out.passive_current = out.power - out.heat_current;
  out.bloch = bloch(rtn::rtn_state(p, rho0, t));
  out.ergotropy = ergotropy_rtn(p, rho0, t);
  return out;
}

Mat2 mixed_initial_state(double p, Complex a0, Complex a1) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("mixing probability must lie in [0, 1]");
  const double norm = std::sqrt(std::norm(a0) + std::norm(a1));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("initial amplitudes must be finite and not both zero");
  }
  Eigen::Vector2cd psi(a0 / norm, a1 / norm);
  return p * (psi * psi.adjoint()) + (1.0 - p) * 0.5 * Mat2::Identity();
}

}  // namespace finbath::thermo
