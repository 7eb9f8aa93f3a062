#pragma once

// Committed per-stage durations and integrator settings for the corpus
// schedules. The values come from convergence sweeps over the uniform stage
// duration (see README.md for the measured curves).

#include "hqc/sim.hpp"

namespace hqc::calibration {

/// 3-qubit repetition code, transversal X: infidelity ~2e-6 at this duration.
inline constexpr double kRepetitionStageDuration = 20.0;

/// Steane code, transversal X and H: infidelity ~4e-6 at this duration.
inline constexpr double kSteaneStageDuration = 20.0;

/// Two Steane blocks, transversal CNOT with the weight-6 rewrite.
inline constexpr double kSteaneCnotStageDuration = 10.0;

/// Integrator settings for the 14-qubit run. The discretisation error is
/// orders of magnitude below the adiabatic error at these densities.
inline SimOptions steane_cnot_sim_options() {
  SimOptions o;
  o.steps_per_unit = 64;
  o.max_step_norm = 0.07;
  return o;
}

}  // namespace hqc::calibration
