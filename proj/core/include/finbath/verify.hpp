#pragma once

// Self-check suites: every closed form is compared against an independent
// computation (dense evolution, finite differences, RK4 propagation, Monte
// Carlo) at fixed tolerances.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finbath/scenario.hpp"

namespace finbath::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  /// When set, only the suites of its model run, at its parameters, seed and
  /// trajectory count.
  std::optional<scenario::ScenarioConfig> config;
  /// Adds 1e-3 t to the phi44 entry of the central spin map, which breaks
  /// trace annihilation of the generator.
  bool inject_phi44_fault = false;
  unsigned threads = 0;
  /// Monte Carlo settings when no config is given.
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> mc_trajectories;
};

std::vector<CheckResult> run_verification(const VerifyOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace finbath::verify
