#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rltbd/filters.hpp"
#include "rltbd/motion_model.hpp"
#include "rltbd/tbd_sensor.hpp"

namespace rltbd {

/// Single-target scenario: a constant-velocity track through the sensor
/// window, observed once per step.
struct ScenarioConfig {
  int k_steps = 30;
  double speed = 50.0;           // [m/s]
  double start_range = 24000.0;  // [m]
  double start_bearing = 0.0;    // [rad]
  double heading = 1.5707963267948966;  // [rad], east-referenced CCW
  double init_position_side = 1000.0;   // initialization box edge [m]
  double init_velocity_side = 10.0;     // initialization box edge [m/s]

  bool operator==(const ScenarioConfig&) const = default;
};

/// The trajectory truth leaves the sensor window, so the scenario cannot be
/// realized as configured.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::vector<StateVector> trajectory;    // k_steps + 1 states, index = step
  std::vector<Measurement> measurements;  // k_steps frames; frame i belongs to step i + 1
};

/// Initial state implied by the config: position at (start_range,
/// start_bearing), velocity of magnitude `speed` along `heading`.
StateVector scenario_start_state(const ScenarioConfig& cfg);

/// Noiseless constant-velocity trajectory plus one simulated image per step.
/// Throws ScenarioError if any trajectory state falls outside the sensor
/// window, std::invalid_argument on k_steps < 0 or speed <= 0.
Scenario generate_scenario(const ScenarioConfig& cfg, const SensorModel& sensor,
                           const NcvModel& motion, Rng& rng);

/// n particles uniform on an axis-aligned box centred on `truth`, with the
/// configured position and velocity edge lengths.
EmpiricalPosterior init_particles(const StateVector& truth, int n, const ScenarioConfig& cfg,
                                  Rng& rng);

/// Number of distinct support points under exact (bitwise) equality;
/// MCMC rejections and resampling ties produce exact duplicates.
int distinct_count(const std::vector<StateVector>& particles);

enum class FilterKind { rlmcf, smcmc_prior, bootstrap };

struct FilterSpec {
  FilterKind kind = FilterKind::rlmcf;
  std::string label;  // names the filter in outputs; must be unique
  FilterConfig config;
};

/// One filter's trace through one run.
struct FilterRunTrace {
  std::vector<StateVector> estimates;  // one per completed step
  std::vector<int> distinct_counts;    // one per completed step
  std::vector<double> joint_rates;     // MCMC filters only
  std::vector<double> refine_rates;    // refinement filters only
  bool failed = false;
  int failed_at_step = 0;  // 1-based step of the failure, 0 if none
  std::string failure;
};

struct RunResult {
  int run_index = 0;
  std::vector<FilterRunTrace> traces;  // aligned with the batch's filter list
};

struct StepRmse {
  double x = 0.0;
  double y = 0.0;
};

struct BatchFilterMetrics {
  std::string label;
  std::vector<StepRmse> rmse;  // k_steps entries, pooled over completed runs
  int completed_runs = 0;
  int failed_runs = 0;
  int distinct_final_min = 0;  // over completed runs, at the last step
  int distinct_final_max = 0;
};

struct BatchMetrics {
  int n_runs = 0;
  int k_steps = 0;
  std::vector<StateVector> trajectory;  // shared truth, k_steps + 1 states
  std::vector<BatchFilterMetrics> filters;
};

/// Runs every filter over `n_runs` Monte-Carlo repetitions of the scenario.
/// Each run draws fresh measurement noise and initialization under
/// substreams of `master_seed`, so a batch is reproducible seed-for-seed. A
/// run where a filter degenerates is dropped from that filter's error
/// pooling and counted in failed_runs. Pass `runs_out` to keep per-run
/// traces (estimates, diversity) for serialization.
BatchMetrics run_batch(const ScenarioConfig& scenario_cfg, const SensorModel& sensor,
                       const NcvModel& motion, const std::vector<FilterSpec>& filters, int n_runs,
                       std::uint64_t master_seed, std::vector<RunResult>* runs_out = nullptr);

/// Pooled per-step RMSE over runs: entry k is the root mean square, across
/// runs, of the step-(k+1) estimate errors. All runs must have k_steps
/// estimates; truth has k_steps + 1 states.
std::vector<StepRmse> pooled_rmse(const std::vector<std::vector<StateVector>>& estimates_per_run,
                                  const std::vector<StateVector>& trajectory);

/// Mean over steps >= from_step (1-based) of sqrt(rmse_x^2 + rmse_y^2).
double time_averaged_position_rmse(const std::vector<StepRmse>& rmse, int from_step);

}  // namespace rltbd
