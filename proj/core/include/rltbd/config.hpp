#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rltbd/experiment.hpp"
#include "rltbd/motion_model.hpp"
#include "rltbd/tbd_sensor.hpp"

namespace rltbd {

struct MotionSettings {
  double dt = 1.0;
  double sigma_ax = 0.1;
  double sigma_ay = 0.1;

  bool operator==(const MotionSettings&) const = default;
};

/// One entry of the "filters" list. Only the fields that apply to the named
/// filter may appear in the file: n_burn_in belongs to the MCMC filters,
/// resampling to the bootstrap filter.
struct FilterEntry {
  std::string name;   // "rlmcf" | "smcmc_prior" | "bootstrap"
  std::string label;  // output column name; defaults to `name`
  int n_particles = 0;
  int n_burn_in = 0;
  std::string resampling = "systematic";  // "systematic" | "multinomial"

  bool operator==(const FilterEntry&) const = default;
};

struct ProposalSettings {
  double epsilon = 1.0;
  std::string metric = "riemann";  // "riemann" | "identity"

  bool operator==(const ProposalSettings&) const = default;
};

/// Whole experiment description, mirroring the JSON config file: sections
/// motion, sensor, scenario (which also carries n_runs and master_seed),
/// proposal, filters, output.
struct ExperimentConfig {
  MotionSettings motion;
  SensorSettings sensor;
  ScenarioConfig scenario;
  int n_runs = 50;
  std::uint64_t master_seed = 1;
  ProposalSettings proposal;
  std::vector<FilterEntry> filters;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// The stock single-target experiment: 30 steps at 50 m/s across a
/// 22-26 km, +-30 degree window, 80 dB peak SNR over 1e-4 noise, with the
/// Riemann-Langevin filter at 400 particles against 3000-particle
/// prior-MCMC and 5000-particle bootstrap baselines, 50 runs.
ExperimentConfig default_config();

/// Parses and fully validates a config. Unknown sections or keys, missing
/// required keys, wrong types, and values any module would reject all throw
/// std::invalid_argument with the offending path in the message.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Inverse of parse_config: parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Model builders; each revalidates through the module constructors.
NcvModel motion_from(const ExperimentConfig& cfg);
SensorModel sensor_from(const ExperimentConfig& cfg);
std::vector<FilterSpec> filter_specs_from(const ExperimentConfig& cfg);

}  // namespace rltbd
