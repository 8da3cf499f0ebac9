#include "rltbd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rltbd {

namespace {

// Substream tags under one (master, run) pair. Filters get 1 + their index,
// so adding a filter never shifts the scenario noise or other filters' draws.
constexpr std::uint64_t kScenarioStream = 0;

void check_in_window(const SensorModel& sensor, const StateVector& state, int step) {
  const Polar p = polar_of(state);
  if (p.range < sensor.range_min || p.range > sensor.range_max ||
      p.bearing < sensor.bearing_min || p.bearing > sensor.bearing_max) {
    std::ostringstream msg;
    msg << "generate_scenario: trajectory leaves the sensor window at step " << step
        << " (range " << p.range << ", bearing " << p.bearing << ")";
    throw ScenarioError(msg.str());
  }
}

}  // namespace

StateVector scenario_start_state(const ScenarioConfig& cfg) {
  StateVector s;
  s[kPosX] = cfg.start_range * std::cos(cfg.start_bearing);
  s[kPosY] = cfg.start_range * std::sin(cfg.start_bearing);
  s[kVelX] = cfg.speed * std::cos(cfg.heading);
  s[kVelY] = cfg.speed * std::sin(cfg.heading);
  return s;
}

Scenario generate_scenario(const ScenarioConfig& cfg, const SensorModel& sensor,
                           const NcvModel& motion, Rng& rng) {
  if (cfg.k_steps < 0) {
    throw std::invalid_argument("generate_scenario: k_steps must be non-negative");
  }
  if (!(cfg.speed > 0.0)) {
    throw std::invalid_argument("generate_scenario: speed must be positive");
  }
  if (!(cfg.start_range > 0.0)) {
    throw std::invalid_argument("generate_scenario: start_range must be positive");
  }

  Scenario sc;
  sc.trajectory.reserve(cfg.k_steps + 1);
  sc.trajectory.push_back(scenario_start_state(cfg));
  check_in_window(sensor, sc.trajectory.front(), 0);
  for (int k = 1; k <= cfg.k_steps; ++k) {
    sc.trajectory.push_back(transition_mean(motion, sc.trajectory.back()));
    check_in_window(sensor, sc.trajectory.back(), k);
  }

  sc.measurements.reserve(cfg.k_steps);
  for (int k = 1; k <= cfg.k_steps; ++k) {
    sc.measurements.push_back(simulate_measurement(sensor, sc.trajectory[k], rng));
  }
  return sc;
}

EmpiricalPosterior init_particles(const StateVector& truth, int n, const ScenarioConfig& cfg,
                                  Rng& rng) {
  if (n <= 0) {
    throw std::invalid_argument("init_particles: n must be positive");
  }
  if (!(cfg.init_position_side > 0.0) || !(cfg.init_velocity_side > 0.0)) {
    throw std::invalid_argument("init_particles: box sides must be positive");
  }
  EmpiricalPosterior out;
  out.particles.resize(n);
  for (int i = 0; i < n; ++i) {
    StateVector& p = out.particles[i];
    for (int c = 0; c < kStateDim; ++c) {
      const double side =
          (c == kPosX || c == kPosY) ? cfg.init_position_side : cfg.init_velocity_side;
      p[c] = truth[c] + side * (draw_uniform(rng) - 0.5);
    }
  }
  return out;
}

int distinct_count(const std::vector<StateVector>& particles) {
  std::vector<StateVector> sorted = particles;
  std::sort(sorted.begin(), sorted.end(), [](const StateVector& a, const StateVector& b) {
    for (int c = 0; c < kStateDim; ++c) {
      if (a[c] != b[c]) {
        return a[c] < b[c];
      }
    }
    return false;
  });
  const auto last = std::unique(sorted.begin(), sorted.end(),
                                [](const StateVector& a, const StateVector& b) {
                                  return (a.array() == b.array()).all();
                                });
  return static_cast<int>(std::distance(sorted.begin(), last));
}

namespace {

FilterRunTrace run_filter_over_scenario(const FilterSpec& spec, const ScenarioConfig& sc_cfg,
                                        const Scenario& scenario, const SensorModel& sensor,
                                        const NcvModel& motion, Rng& rng) {
  FilterRunTrace trace;
  const int k_steps = static_cast<int>(scenario.measurements.size());
  const StateVector truth0 = scenario.trajectory.front();

  EmpiricalPosterior posterior;
  ParticleCloud cloud;
  {
    EmpiricalPosterior init =
        init_particles(truth0, spec.config.n_particles, sc_cfg, rng);
    if (spec.kind == FilterKind::bootstrap) {
      cloud.particles = std::move(init.particles);
    } else {
      posterior = std::move(init);
    }
  }

  for (int k = 1; k <= k_steps; ++k) {
    const TbdObservation obs(sensor, scenario.measurements[k - 1]);
    try {
      switch (spec.kind) {
        case FilterKind::rlmcf: {
          McmcStepResult step = rlmcf_step(posterior, obs, motion, spec.config, rng);
          posterior = std::move(step.posterior);
          trace.joint_rates.push_back(step.diag.joint_rate());
          trace.refine_rates.push_back(step.diag.refine_rate());
          trace.estimates.push_back(point_estimate(posterior));
          trace.distinct_counts.push_back(distinct_count(posterior.particles));
          break;
        }
        case FilterKind::smcmc_prior: {
          McmcStepResult step = smcmc_prior_step(posterior, obs, motion, spec.config, rng);
          posterior = std::move(step.posterior);
          trace.joint_rates.push_back(step.diag.joint_rate());
          trace.estimates.push_back(point_estimate(posterior));
          trace.distinct_counts.push_back(distinct_count(posterior.particles));
          break;
        }
        case FilterKind::bootstrap: {
          cloud = bootstrap_step(cloud, obs, motion, spec.config, rng);
          trace.estimates.push_back(point_estimate(cloud));
          trace.distinct_counts.push_back(distinct_count(cloud.particles));
          break;
        }
      }
    } catch (const DegenerateLikelihoodError& e) {
      trace.failed = true;
      trace.failed_at_step = k;
      trace.failure = e.what();
      break;
    }
  }
  return trace;
}

RunResult run_single(int run_index, const ScenarioConfig& sc_cfg, const SensorModel& sensor,
                     const NcvModel& motion, const std::vector<FilterSpec>& filters,
                     std::uint64_t master_seed) {
  Rng scenario_rng = make_rng(master_seed, static_cast<std::uint64_t>(run_index), kScenarioStream);
  const Scenario scenario = generate_scenario(sc_cfg, sensor, motion, scenario_rng);

  RunResult result;
  result.run_index = run_index;
  result.traces.reserve(filters.size());
  for (std::size_t f = 0; f < filters.size(); ++f) {
    Rng filter_rng = make_rng(master_seed, static_cast<std::uint64_t>(run_index), 1 + f);
    result.traces.push_back(
        run_filter_over_scenario(filters[f], sc_cfg, scenario, sensor, motion, filter_rng));
  }
  return result;
}

}  // namespace

BatchMetrics run_batch(const ScenarioConfig& scenario_cfg, const SensorModel& sensor,
                       const NcvModel& motion, const std::vector<FilterSpec>& filters, int n_runs,
                       std::uint64_t master_seed, std::vector<RunResult>* runs_out) {
  if (n_runs <= 0) {
    throw std::invalid_argument("run_batch: n_runs must be positive");
  }
  if (filters.empty()) {
    throw std::invalid_argument("run_batch: no filters configured");
  }
  for (std::size_t a = 0; a < filters.size(); ++a) {
    for (std::size_t b = a + 1; b < filters.size(); ++b) {
      if (filters[a].label == filters[b].label) {
        throw std::invalid_argument("run_batch: duplicate filter label '" + filters[a].label +
                                    "'");
      }
    }
  }

  // Runs are independent given their substreams; results land by index, so
  // the schedule cannot change any output.
  std::vector<RunResult> runs(n_runs);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned width = std::min<unsigned>(hw, static_cast<unsigned>(n_runs));
  if (width <= 1) {
    for (int r = 0; r < n_runs; ++r) {
      runs[r] = run_single(r, scenario_cfg, sensor, motion, filters, master_seed);
    }
  } else {
    std::vector<std::future<RunResult>> pending;
    for (int r = 0; r < n_runs; ++r) {
      pending.push_back(std::async(std::launch::async, run_single, r, std::cref(scenario_cfg),
                                   std::cref(sensor), std::cref(motion), std::cref(filters),
                                   master_seed));
      if (pending.size() == width || r == n_runs - 1) {
        for (auto& fut : pending) {
          RunResult rr = fut.get();
          const int idx = rr.run_index;
          runs[idx] = std::move(rr);
        }
        pending.clear();
      }
    }
  }

  BatchMetrics metrics;
  metrics.n_runs = n_runs;
  metrics.k_steps = scenario_cfg.k_steps;
  {
    // The truth trajectory is noiseless, hence identical across runs.
    Rng tmp = make_rng(master_seed, 0, kScenarioStream);
    metrics.trajectory = generate_scenario(scenario_cfg, sensor, motion, tmp).trajectory;
  }

  for (std::size_t f = 0; f < filters.size(); ++f) {
    BatchFilterMetrics fm;
    fm.label = filters[f].label;

    std::vector<std::vector<StateVector>> completed;
    std::vector<int> finals;
    for (const RunResult& rr : runs) {
      const FilterRunTrace& tr = rr.traces[f];
      if (tr.failed) {
        ++fm.failed_runs;
        continue;
      }
      completed.push_back(tr.estimates);
      finals.push_back(tr.distinct_counts.back());
    }
    fm.completed_runs = static_cast<int>(completed.size());
    if (!completed.empty()) {
      fm.rmse = pooled_rmse(completed, metrics.trajectory);
      fm.distinct_final_min = *std::min_element(finals.begin(), finals.end());
      fm.distinct_final_max = *std::max_element(finals.begin(), finals.end());
    }
    metrics.filters.push_back(std::move(fm));
  }

  if (runs_out != nullptr) {
    *runs_out = std::move(runs);
  }
  return metrics;
}

std::vector<StepRmse> pooled_rmse(const std::vector<std::vector<StateVector>>& estimates_per_run,
                                  const std::vector<StateVector>& trajectory) {
  if (estimates_per_run.empty()) {
    throw std::invalid_argument("pooled_rmse: no runs");
  }
  const std::size_t k_steps = trajectory.size() - 1;
  for (const auto& run : estimates_per_run) {
    if (run.size() != k_steps) {
      throw std::invalid_argument("pooled_rmse: a run is missing estimates");
    }
  }

  std::vector<StepRmse> out(k_steps);
  for (std::size_t k = 0; k < k_steps; ++k) {
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& run : estimates_per_run) {
      const double ex = run[k][kPosX] - trajectory[k + 1][kPosX];
      const double ey = run[k][kPosY] - trajectory[k + 1][kPosY];
      sx += ex * ex;
      sy += ey * ey;
    }
    const double n = static_cast<double>(estimates_per_run.size());
    out[k].x = std::sqrt(sx / n);
    out[k].y = std::sqrt(sy / n);
  }
  return out;
}

double time_averaged_position_rmse(const std::vector<StepRmse>& rmse, int from_step) {
  if (from_step < 1 || static_cast<std::size_t>(from_step) > rmse.size()) {
    throw std::invalid_argument("time_averaged_position_rmse: from_step out of range");
  }
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = static_cast<std::size_t>(from_step) - 1; k < rmse.size(); ++k) {
    sum += std::sqrt(rmse[k].x * rmse[k].x + rmse[k].y * rmse[k].y);
    ++count;
  }
  return sum / count;
}

}  // namespace rltbd
