#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rltbd/config.hpp"
#include "rltbd/csv.hpp"
#include "rltbd/experiment.hpp"
#include "rltbd/selftest.hpp"

namespace rltbd::cli {

namespace {

namespace fs = std::filesystem;

ExperimentConfig load_or_default(const CommonOptions& opts) {
  ExperimentConfig cfg =
      opts.config_path.empty() ? default_config() : load_config(opts.config_path);
  if (!opts.out_dir.empty()) {
    cfg.output_dir = opts.out_dir;
  }
  if (opts.seed.has_value()) {
    cfg.master_seed = *opts.seed;
  }
  return cfg;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<StateVector>& trajectory) {
  out << "step,x,vx,y,vy\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const StateVector& s = trajectory[k];
    out << format_int(static_cast<std::int64_t>(k)) << ',' << format_double(s[kPosX]) << ','
        << format_double(s[kVelX]) << ',' << format_double(s[kPosY]) << ','
        << format_double(s[kVelY]) << '\n';
  }
}

}  // namespace

int cmd_simulate(const CommonOptions& opts) {
  const ExperimentConfig cfg = load_or_default(opts);
  const SensorModel sensor = sensor_from(cfg);
  const NcvModel motion = motion_from(cfg);

  // Stream (run 0, component 0) matches the batch runner, so these frames
  // are exactly what run 0 of `run` sees under the same seed.
  Rng rng = make_rng(cfg.master_seed, 0, 0);
  const Scenario scenario = generate_scenario(cfg.scenario, sensor, motion, rng);

  const fs::path dir = fs::path(cfg.output_dir) / "scenario";
  fs::create_directories(dir);

  {
    std::ofstream out = open_csv(dir / "trajectory.csv");
    write_trajectory_csv(out, scenario.trajectory);
  }
  for (std::size_t i = 0; i < scenario.measurements.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.csv", i + 1);
    std::ofstream out = open_csv(dir / name);
    write_frame_csv(out, sensor, scenario.measurements[i]);
  }

  std::cout << "scenario: " << scenario.measurements.size() << " frames of " << sensor.n_range
            << " x " << sensor.n_bearing << " cells (" << sensor.cell_count
            << " per frame), amplitude " << format_double(sensor.amplitude) << ", noise sigma "
            << format_double(sensor.sigma_w) << "\n"
            << "wrote " << (dir / "trajectory.csv").string() << " and "
            << scenario.measurements.size() << " frame files under " << dir.string() << "\n";
  return 0;
}

int cmd_run(const RunOptions& opts) {
  ExperimentConfig cfg = load_or_default(opts);
  if (opts.n_runs.has_value()) {
    if (*opts.n_runs <= 0) {
      throw std::invalid_argument("--runs must be positive");
    }
    cfg.n_runs = *opts.n_runs;
  }

  std::vector<FilterSpec> specs = filter_specs_from(cfg);
  if (!opts.filters.empty()) {
    std::vector<FilterSpec> kept;
    for (const std::string& want : opts.filters) {
      bool found = false;
      for (const FilterSpec& s : specs) {
        if (s.label == want) {
          kept.push_back(s);
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::invalid_argument("--filter '" + want + "' does not match a configured label");
      }
    }
    specs = std::move(kept);
  }

  const SensorModel sensor = sensor_from(cfg);
  const NcvModel motion = motion_from(cfg);

  std::vector<RunResult> runs;
  const BatchMetrics metrics =
      run_batch(cfg.scenario, sensor, motion, specs, cfg.n_runs, cfg.master_seed, &runs);

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  {
    std::ofstream out = open_csv(dir / "metrics.csv");
    out << "step,filter,rmse_x,rmse_y\n";
    for (int k = 1; k <= metrics.k_steps; ++k) {
      for (const BatchFilterMetrics& fm : metrics.filters) {
        if (fm.rmse.empty()) {
          continue;  // no completed runs to pool
        }
        out << format_int(k) << ',' << fm.label << ',' << format_double(fm.rmse[k - 1].x) << ','
            << format_double(fm.rmse[k - 1].y) << '\n';
      }
    }
  }

  {
    std::ofstream out = open_csv(dir / "diversity.csv");
    out << "run,filter,step,distinct_count\n";
    for (const RunResult& rr : runs) {
      for (std::size_t f = 0; f < specs.size(); ++f) {
        const FilterRunTrace& tr = rr.traces[f];
        for (std::size_t k = 0; k < tr.distinct_counts.size(); ++k) {
          out << format_int(rr.run_index) << ',' << specs[f].label << ','
              << format_int(static_cast<std::int64_t>(k + 1)) << ','
              << format_int(tr.distinct_counts[k]) << '\n';
        }
      }
    }
  }

  for (const RunResult& rr : runs) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%04d", rr.run_index);
    const fs::path run_dir = dir / "runs" / name;
    fs::create_directories(run_dir);
    std::ofstream out = open_csv(run_dir / "estimates.csv");
    out << "step,filter,x,vx,y,vy\n";
    for (std::size_t f = 0; f < specs.size(); ++f) {
      const FilterRunTrace& tr = rr.traces[f];
      for (std::size_t k = 0; k < tr.estimates.size(); ++k) {
        const StateVector& e = tr.estimates[k];
        out << format_int(static_cast<std::int64_t>(k + 1)) << ',' << specs[f].label << ','
            << format_double(e[kPosX]) << ',' << format_double(e[kVelX]) << ','
            << format_double(e[kPosY]) << ',' << format_double(e[kVelY]) << '\n';
      }
    }
  }

  bool any_failed = false;
  bool any_lost = false;
  std::cout << "batch: " << metrics.n_runs << " runs, " << metrics.k_steps << " steps, seed "
            << cfg.master_seed << "\n";
  for (const BatchFilterMetrics& fm : metrics.filters) {
    std::cout << "  " << fm.label << ": " << fm.completed_runs << "/" << metrics.n_runs
              << " runs completed";
    if (fm.completed_runs > 0) {
      std::cout << ", time-avg position RMSE "
                << format_double(time_averaged_position_rmse(fm.rmse, 1)) << " m"
                << ", final-step distinct particles [" << fm.distinct_final_min << ", "
                << fm.distinct_final_max << "]";
    }
    std::cout << "\n";
    if (fm.failed_runs > 0) {
      any_failed = true;
    }
    if (fm.completed_runs == 0) {
      any_lost = true;
    }
  }
  std::cout << "wrote metrics.csv, diversity.csv and " << runs.size() << " run directories under "
            << dir.string() << "\n";

  if (any_lost) {
    return 1;
  }
  return any_failed ? 2 : 0;
}

int cmd_selftest(bool quick) {
  SelftestOptions opts;
  opts.quick = quick;
  const std::vector<CheckResult> results = run_selftest(opts);
  bool all_passed = true;
  for (const CheckResult& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": measured "
              << format_double(r.measured) << " vs limit " << format_double(r.limit) << " ("
              << r.detail << ")\n";
    all_passed = all_passed && r.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace rltbd::cli
