#pragma once

// JSON-configured runs of either model, producing one CSV table per
// requested output kind.
//
// {
//   "name": "fig1a",                       optional, prefixes file names
//   "model": "central-spin" | "rtn",
//   "params": {...},                       model keys; omitted keys take
//                                          the Fig. 1 defaults
//   "initial_state": {"amplitudes": [[re, im], [re, im]], "mixing_p": 1.0},
//   "t_max": 10.0, "n_points": 1001,
//   "outputs": ["state", "rates", "choi", "kraus", "thermo",
//               "master-eq-check", "mc", "canonical-hamiltonian"],
//   "seed": 12345, "mc_trajectories": 100000
// }

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finbath/centralspin.hpp"
#include "finbath/csv.hpp"
#include "finbath/matkit.hpp"
#include "finbath/rtn.hpp"

namespace finbath::scenario {

enum class ModelKind { CentralSpin, Rtn };

enum class OutputKind {
  State,
  Rates,
  Choi,
  Kraus,
  Thermo,
  MasterEqCheck,
  MonteCarlo,
  CanonicalHamiltonian
};

const char* to_string(ModelKind m);
const char* to_string(OutputKind o);

struct InitialState {
  Complex a0{std::sqrt(3.0) / 2.0, 0.0};
  Complex a1{0.5, 0.0};
  double mixing_p = 1.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ModelKind model = ModelKind::CentralSpin;
  centralspin::CentralSpinParams cs;
  rtn::RtnParams rtn;
  InitialState initial_state;
  double t_max = 10.0;
  int n_points = 1001;
  std::vector<OutputKind> outputs{OutputKind::Thermo};
  std::uint64_t seed = 20250101;
  std::size_t mc_trajectories = 100000;
  /// Sorted-key JSON of the effective configuration; hashed into CSV headers.
  std::string canonical_json;

  Mat2 rho0() const;
  std::vector<double> time_grid() const;
  std::string config_hash() const;
};

/// Overrides applied on top of the document before validation, so that they
/// are part of the canonical form and the hash.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> mc_trajectories;
};

/// Throws ConfigError with a dotted field path.
ScenarioConfig parse_config(std::string_view json_text, const Overrides& overrides = {});
ScenarioConfig load_config(const std::string& path, const Overrides& overrides = {});

struct Artifact {
  std::string filename;
  csv::Table table;
  /// Grid times skipped because the quantity is undefined there.
  std::vector<double> excluded_t;
  /// Set when a propagation stopped at a singularity; later rows are absent.
  std::optional<double> stopped_at;
};

struct RunOptions {
  unsigned threads = 0;
};

Artifact run_output(const ScenarioConfig& config, OutputKind kind, const RunOptions& options = {});
std::vector<Artifact> run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Central spin rates table: t, zeta, Gamma, Re Theta, Im Theta, nu+, nu-, nu_z.
Artifact emit_rates(const ScenarioConfig& config);

}  // namespace finbath::scenario
