#pragma once

// Named scenario sets reproducing the published heat-current and charging
// power curves. fig1a..fig1d are central spin runs differing only in the
// initial mixing p; fig1e sweeps the telegraph switching rate.

#include <string>
#include <vector>

#include "finbath/scenario.hpp"

namespace finbath::presets {

/// fig1a, fig1b, fig1c, fig1d, fig1e, hcan.
std::vector<std::string> names();

/// Throws ConfigError for an unknown name.
std::vector<scenario::ScenarioConfig> preset(const std::string& name,
                                             const scenario::Overrides& overrides = {});

/// Switching rates of the fig1e sweep; the last one is overdamped.
std::vector<double> fig1e_gammas();

}  // namespace finbath::presets
