#pragma once

// Thermodynamic observables of the central qubit with bare Hamiltonian
// H_S = (w0/2) sz: heat current, ergotropy and the charging power
// P = dW/dt = J + J_passive.

#include "finbath/centralspin.hpp"
#include "finbath/matkit.hpp"
#include "finbath/rtn.hpp"

namespace finbath::thermo {

struct Bloch {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

/// k = Tr[sigma_k rho]. Validates rho.
Bloch bloch(const Mat2& rho);

/// d/dt Tr[H_S rho(t)] = w0 [eta' + (alpha' - eta') rho00(0)].
double heat_current_cs(const centralspin::CentralSpinModel& model, const Mat2& rho0, double t);

/// Tr[H_S d/dt rho(t)] from the map derivative; zero for pure dephasing.
double heat_current_rtn(const rtn::RtnParams& p, const Mat2& rho0, double t);

/// (w0/2) (z + |r|). Requires w0 > 0.
double ergotropy(const Mat2& rho, double omega0);

/// Tr[H_S rho] - Tr[H_S rho_passive], with rho's eigenvalues sorted against
/// the energy levels in opposite order.
double ergotropy_passive(const Mat2& rho, double omega0);

struct PowerSample {
  double power = 0.0;
  double heat_current = 0.0;
  double passive_current = 0.0;
};

/// P from analytic Bloch derivatives. Throws BlochOriginSingularity when the
/// Bloch vector length is at most 1e-12, and Error if P differs from
/// J + J_passive by more than 1e-8.
PowerSample charging_power_cs(const centralspin::CentralSpinModel& model, const Mat2& rho0,
                              double t);

/// (w0/2) [z0 + sqrt(z0^2 + 4 |rho01(0)|^2 Lambda^2)]; z is constant.
double ergotropy_rtn(const rtn::RtnParams& p, const Mat2& rho0, double t);

/// 2 w0 |rho01(0)|^2 Lambda Lambda' / sqrt(z0^2 + 4 |rho01(0)|^2 Lambda^2).
/// Throws BlochOriginSingularity when the denominator is at most 1e-12.
double charging_power_rtn(const rtn::RtnParams& p, const Mat2& rho0, double t);

struct ThermoSample {
  double t = 0.0;
  double heat_current = 0.0;
  double passive_current = 0.0;
  double ergotropy = 0.0;
  double power = 0.0;
  Bloch bloch;
};

ThermoSample sample_cs(const centralspin::CentralSpinModel& model, const Mat2& rho0, double t);
ThermoSample sample_rtn(const rtn::RtnParams& p, const Mat2& rho0, double t);

/// p |psi><psi| + (1 - p) I/2 with |psi> = a0|0> + a1|1> normalized.
Mat2 mixed_initial_state(double p, Complex a0, Complex a1);

}  // namespace finbath::thermo
