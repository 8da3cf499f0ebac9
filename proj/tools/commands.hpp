#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rltbd::cli {

struct CommonOptions {
  std::string config_path;  // empty = built-in defaults
  std::string out_dir;      // empty = config's output dir
  std::optional<std::uint64_t> seed;
};

struct RunOptions : CommonOptions {
  std::optional<int> n_runs;
  std::vector<std::string> filters;  // labels to keep; empty = all
};

/// Writes the noiseless trajectory and one simulated image per step under
/// <out>/scenario/. Returns 0 on success.
int cmd_simulate(const CommonOptions& opts);

/// Runs the configured filter batch; writes metrics.csv, diversity.csv and
/// per-run estimates under <out>/. Returns 0 when every run of every filter
/// completed, 2 when some runs degenerated, 1 when a filter lost every run.
int cmd_run(const RunOptions& opts);

/// Numerical self-checks; prints one line per check. Returns 0 only if all
/// pass.
int cmd_selftest(bool quick);

}  // namespace rltbd::cli
