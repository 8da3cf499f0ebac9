#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rltbd/state.hpp"
#include "rltbd/tbd_sensor.hpp"

namespace rltbd {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;  // the figure compared against `limit`
  double limit = 0.0;
  std::string detail;
};

using GradientFn =
    std::function<StateVector(const SensorModel&, const Measurement&, const StateVector&)>;

struct SelftestOptions {
  bool quick = false;            // trims the Monte-Carlo check budgets
  std::uint64_t seed = 20240901;
  // Replaces the analytic gradient inside the derivative checks. Exists so a
  // deliberately broken gradient can prove the checks have teeth.
  GradientFn gradient_override;
};

/// Fast numerical self-checks on the shipped configuration:
///   gradient_fd       analytic likelihood gradient vs central differences
///   fisher_identity   Fisher matrix vs Monte-Carlo mean of score outer products
///   kalman_agreement  MCMC filter vs exact Kalman posterior on a linear model
std::vector<CheckResult> run_selftest(const SelftestOptions& opts = {});

}  // namespace rltbd
