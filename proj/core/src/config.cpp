#include "rltbd/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace rltbd {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void check_keys(const Json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    fail(path, "expected an object");
  }
  const std::set<std::string> allowed_set(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (allowed_set.find(item.key()) == allowed_set.end()) {
      fail(path + "." + item.key(), "unknown key");
    }
  }
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(path + "." + key, "missing");
  }
  return *it;
}

double get_number(const Json& obj, const std::string& path, const char* key) {
  const Json& v = require(obj, path, key);
  if (!v.is_number()) {
    fail(path + "." + key, "expected a number");
  }
  return v.get<double>();
}

double get_number_or(const Json& obj, const std::string& path, const char* key, double fallback) {
  if (obj.find(key) == obj.end()) {
    return fallback;
  }
  return get_number(obj, path, key);
}

int get_int(const Json& obj, const std::string& path, const char* key) {
  const Json& v = require(obj, path, key);
  if (!v.is_number_integer()) {
    fail(path + "." + key, "expected an integer");
  }
  return v.get<int>();
}

int get_int_or(const Json& obj, const std::string& path, const char* key, int fallback) {
  if (obj.find(key) == obj.end()) {
    return fallback;
  }
  return get_int(obj, path, key);
}

std::uint64_t get_seed_or(const Json& obj, const std::string& path, const char* key,
                          std::uint64_t fallback) {
  if (obj.find(key) == obj.end()) {
    return fallback;
  }
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0)) {
    fail(path + "." + key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string_or(const Json& obj, const std::string& path, const char* key,
                          const std::string& fallback) {
  if (obj.find(key) == obj.end()) {
    return fallback;
  }
  const Json& v = obj.at(key);
  if (!v.is_string()) {
    fail(path + "." + key, "expected a string");
  }
  return v.get<std::string>();
}

std::string get_string(const Json& obj, const std::string& path, const char* key) {
  const Json& v = require(obj, path, key);
  if (!v.is_string()) {
    fail(path + "." + key, "expected a string");
  }
  return v.get<std::string>();
}

FilterKind kind_of(const std::string& name, const std::string& path) {
  if (name == "rlmcf") {
    return FilterKind::rlmcf;
  }
  if (name == "smcmc_prior") {
    return FilterKind::smcmc_prior;
  }
  if (name == "bootstrap") {
    return FilterKind::bootstrap;
  }
  fail(path, "unknown filter name '" + name + "'");
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.motion = MotionSettings{1.0, 0.1, 0.1};

  cfg.sensor.range_psf_const = 1.56e6;
  cfg.sensor.bearing_psf_const = 1.88e-4;
  cfg.sensor.range_res = 500.0;
  cfg.sensor.bearing_res = 0.005;
  cfg.sensor.range_min = 22000.0;
  cfg.sensor.range_max = 26000.0;
  cfg.sensor.bearing_min = -0.5235987755982988;
  cfg.sensor.bearing_max = 0.5235987755982988;
  cfg.sensor.sigma_w = 1e-4;
  cfg.sensor.snr_db = 80.0;
  cfg.sensor.gate_threshold = 0.0;

  cfg.scenario = ScenarioConfig{};
  cfg.n_runs = 50;
  cfg.master_seed = 1;

  cfg.proposal = ProposalSettings{};

  FilterEntry rl;
  rl.name = "rlmcf";
  rl.label = "rlmcf";
  rl.n_particles = 400;
  rl.n_burn_in = 100;
  FilterEntry smcmc;
  smcmc.name = "smcmc_prior";
  smcmc.label = "smcmc_prior";
  smcmc.n_particles = 3000;
  smcmc.n_burn_in = 100;
  FilterEntry boot;
  boot.name = "bootstrap";
  boot.label = "bootstrap";
  boot.n_particles = 5000;
  cfg.filters = {rl, smcmc, boot};

  cfg.output_dir = "out";
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  check_keys(root, "$", {"motion", "sensor", "scenario", "proposal", "filters", "output"});

  const ExperimentConfig defaults = default_config();
  ExperimentConfig cfg = defaults;

  if (root.contains("motion")) {
    const Json& m = root["motion"];
    check_keys(m, "motion", {"dt", "sigma_ax", "sigma_ay"});
    cfg.motion.dt = get_number_or(m, "motion", "dt", defaults.motion.dt);
    cfg.motion.sigma_ax = get_number_or(m, "motion", "sigma_ax", defaults.motion.sigma_ax);
    cfg.motion.sigma_ay = get_number_or(m, "motion", "sigma_ay", defaults.motion.sigma_ay);
  }

  if (root.contains("sensor")) {
    const Json& s = root["sensor"];
    check_keys(s, "sensor",
               {"range_psf_const", "bearing_psf_const", "range_res", "bearing_res", "range_min",
                "range_max", "bearing_min", "bearing_max", "sigma_w", "snr_db",
                "gate_threshold"});
    SensorSettings& d = cfg.sensor;
    d.range_psf_const = get_number_or(s, "sensor", "range_psf_const", d.range_psf_const);
    d.bearing_psf_const = get_number_or(s, "sensor", "bearing_psf_const", d.bearing_psf_const);
    d.range_res = get_number_or(s, "sensor", "range_res", d.range_res);
    d.bearing_res = get_number_or(s, "sensor", "bearing_res", d.bearing_res);
    d.range_min = get_number_or(s, "sensor", "range_min", d.range_min);
    d.range_max = get_number_or(s, "sensor", "range_max", d.range_max);
    d.bearing_min = get_number_or(s, "sensor", "bearing_min", d.bearing_min);
    d.bearing_max = get_number_or(s, "sensor", "bearing_max", d.bearing_max);
    d.sigma_w = get_number_or(s, "sensor", "sigma_w", d.sigma_w);
    d.snr_db = get_number_or(s, "sensor", "snr_db", d.snr_db);
    d.gate_threshold = get_number_or(s, "sensor", "gate_threshold", d.gate_threshold);
  }

  if (root.contains("scenario")) {
    const Json& s = root["scenario"];
    check_keys(s, "scenario",
               {"k_steps", "speed", "start_range", "start_bearing", "heading",
                "init_position_side", "init_velocity_side", "n_runs", "master_seed"});
    ScenarioConfig& d = cfg.scenario;
    d.k_steps = get_int_or(s, "scenario", "k_steps", d.k_steps);
    d.speed = get_number_or(s, "scenario", "speed", d.speed);
    d.start_range = get_number_or(s, "scenario", "start_range", d.start_range);
    d.start_bearing = get_number_or(s, "scenario", "start_bearing", d.start_bearing);
    d.heading = get_number_or(s, "scenario", "heading", d.heading);
    d.init_position_side =
        get_number_or(s, "scenario", "init_position_side", d.init_position_side);
    d.init_velocity_side =
        get_number_or(s, "scenario", "init_velocity_side", d.init_velocity_side);
    cfg.n_runs = get_int_or(s, "scenario", "n_runs", defaults.n_runs);
    cfg.master_seed = get_seed_or(s, "scenario", "master_seed", defaults.master_seed);
  }

  if (root.contains("proposal")) {
    const Json& p = root["proposal"];
    check_keys(p, "proposal", {"epsilon", "metric"});
    cfg.proposal.epsilon = get_number_or(p, "proposal", "epsilon", defaults.proposal.epsilon);
    cfg.proposal.metric = get_string_or(p, "proposal", "metric", defaults.proposal.metric);
  }

  if (root.contains("filters")) {
    const Json& fl = root["filters"];
    if (!fl.is_array() || fl.empty()) {
      fail("filters", "expected a non-empty array");
    }
    cfg.filters.clear();
    int idx = 0;
    for (const Json& f : fl) {
      const std::string path = "filters[" + std::to_string(idx) + "]";
      FilterEntry e;
      e.name = get_string(f, path, "name");
      const FilterKind kind = kind_of(e.name, path + ".name");
      if (kind == FilterKind::bootstrap) {
        check_keys(f, path, {"name", "label", "n_particles", "resampling"});
        e.resampling = get_string_or(f, path, "resampling", "systematic");
        if (e.resampling != "systematic" && e.resampling != "multinomial") {
          fail(path + ".resampling", "expected 'systematic' or 'multinomial'");
        }
      } else {
        check_keys(f, path, {"name", "label", "n_particles", "n_burn_in"});
        e.n_burn_in = get_int_or(f, path, "n_burn_in", 0);
      }
      e.label = get_string_or(f, path, "label", e.name);
      e.n_particles = get_int(f, path, "n_particles");
      cfg.filters.push_back(std::move(e));
      ++idx;
    }
  }

  if (root.contains("output")) {
    const Json& o = root["output"];
    check_keys(o, "output", {"dir"});
    cfg.output_dir = get_string_or(o, "output", "dir", defaults.output_dir);
  }

  // Semantic validation: run every value through the module that owns it, so
  // a config either loads completely or not at all.
  motion_from(cfg);
  sensor_from(cfg);
  filter_specs_from(cfg);
  if (cfg.scenario.k_steps < 0) {
    fail("scenario.k_steps", "must be non-negative");
  }
  if (!(cfg.scenario.speed > 0.0)) {
    fail("scenario.speed", "must be positive");
  }
  if (!(cfg.scenario.init_position_side > 0.0) || !(cfg.scenario.init_velocity_side > 0.0)) {
    fail("scenario init box", "sides must be positive");
  }
  if (cfg.n_runs <= 0) {
    fail("scenario.n_runs", "must be positive");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  Json root;
  root["motion"] = {{"dt", cfg.motion.dt},
                    {"sigma_ax", cfg.motion.sigma_ax},
                    {"sigma_ay", cfg.motion.sigma_ay}};
  root["sensor"] = {{"range_psf_const", cfg.sensor.range_psf_const},
                    {"bearing_psf_const", cfg.sensor.bearing_psf_const},
                    {"range_res", cfg.sensor.range_res},
                    {"bearing_res", cfg.sensor.bearing_res},
                    {"range_min", cfg.sensor.range_min},
                    {"range_max", cfg.sensor.range_max},
                    {"bearing_min", cfg.sensor.bearing_min},
                    {"bearing_max", cfg.sensor.bearing_max},
                    {"sigma_w", cfg.sensor.sigma_w},
                    {"snr_db", cfg.sensor.snr_db},
                    {"gate_threshold", cfg.sensor.gate_threshold}};
  root["scenario"] = {{"k_steps", cfg.scenario.k_steps},
                      {"speed", cfg.scenario.speed},
                      {"start_range", cfg.scenario.start_range},
                      {"start_bearing", cfg.scenario.start_bearing},
                      {"heading", cfg.scenario.heading},
                      {"init_position_side", cfg.scenario.init_position_side},
                      {"init_velocity_side", cfg.scenario.init_velocity_side},
                      {"n_runs", cfg.n_runs},
                      {"master_seed", cfg.master_seed}};
  root["proposal"] = {{"epsilon", cfg.proposal.epsilon}, {"metric", cfg.proposal.metric}};
  root["filters"] = Json::array();
  for (const FilterEntry& e : cfg.filters) {
    Json f;
    f["name"] = e.name;
    f["label"] = e.label;
    f["n_particles"] = e.n_particles;
    if (e.name == "bootstrap") {
      f["resampling"] = e.resampling;
    } else {
      f["n_burn_in"] = e.n_burn_in;
    }
    root["filters"].push_back(std::move(f));
  }
  root["output"] = {{"dir", cfg.output_dir}};
  return root.dump(2) + "\n";
}

NcvModel motion_from(const ExperimentConfig& cfg) {
  return build_ncv(cfg.motion.dt, cfg.motion.sigma_ax, cfg.motion.sigma_ay);
}

SensorModel sensor_from(const ExperimentConfig& cfg) { return make_sensor_model(cfg.sensor); }

std::vector<FilterSpec> filter_specs_from(const ExperimentConfig& cfg) {
  if (cfg.filters.empty()) {
    throw std::invalid_argument("config: filters: expected a non-empty array");
  }
  if (!(cfg.proposal.epsilon > 0.0)) {
    throw std::invalid_argument("config: proposal.epsilon: must be positive");
  }
  MetricMode mode;
  if (cfg.proposal.metric == "riemann") {
    mode = MetricMode::riemann;
  } else if (cfg.proposal.metric == "identity") {
    mode = MetricMode::identity;
  } else {
    throw std::invalid_argument("config: proposal.metric: expected 'riemann' or 'identity'");
  }

  std::vector<FilterSpec> specs;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < cfg.filters.size(); ++i) {
    const FilterEntry& e = cfg.filters[i];
    const std::string path = "config: filters[" + std::to_string(i) + "]";
    FilterSpec spec;
    spec.kind = kind_of(e.name, path + ".name");
    spec.label = e.label.empty() ? e.name : e.label;
    if (!labels.insert(spec.label).second) {
      throw std::invalid_argument(path + ": duplicate label '" + spec.label + "'");
    }
    if (e.n_particles <= 0) {
      throw std::invalid_argument(path + ".n_particles: must be positive");
    }
    if (e.n_burn_in < 0) {
      throw std::invalid_argument(path + ".n_burn_in: must be non-negative");
    }
    spec.config.n_particles = e.n_particles;
    spec.config.n_burn_in = e.n_burn_in;
    spec.config.proposal.epsilon = cfg.proposal.epsilon;
    spec.config.proposal.metric = mode;
    spec.config.refine = spec.kind == FilterKind::rlmcf;
    spec.config.resampling = e.resampling == "multinomial" ? ResamplingScheme::multinomial
                                                           : ResamplingScheme::systematic;
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace rltbd
