#include <benchmark/benchmark.h>

#include "rltbd/config.hpp"
#include "rltbd/experiment.hpp"
#include "rltbd/filters.hpp"
#include "rltbd/proposals.hpp"

namespace {

using namespace rltbd;

// Shared fixtures at the stock experiment scale: 8 x 209 cell images.
struct Fixture {
  ExperimentConfig cfg = default_config();
  SensorModel sensor = sensor_from(cfg);
  NcvModel motion = motion_from(cfg);
  StateVector truth = scenario_start_state(cfg.scenario);
  Measurement z;
  StateVector prev;

  Fixture() {
    Rng rng = make_rng(7, 0, 0);
    z = simulate_measurement(sensor, truth, rng);
    prev = truth;
    prev[kPosX] -= motion.dt * truth[kVelX];
    prev[kPosY] -= motion.dt * truth[kVelY];
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_LogLikelihood(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood(f.sensor, f.z, f.truth));
  }
}
BENCHMARK(BM_LogLikelihood);

void BM_Gradient(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood_gradient(f.sensor, f.z, f.truth));
  }
}
BENCHMARK(BM_Gradient);

void BM_Fisher(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(likelihood_fisher(f.sensor, f.truth));
  }
}
BENCHMARK(BM_Fisher);

void BM_RlMoments(benchmark::State& state) {
  Fixture& f = fixture();
  RlProposalParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rl_moments(f.sensor, f.z, f.motion, f.truth, f.prev, params));
  }
}
BENCHMARK(BM_RlMoments);

void BM_RlmcfStep(benchmark::State& state) {
  Fixture& f = fixture();
  Rng rng = make_rng(7, 0, 1);
  EmpiricalPosterior prior;
  prior.particles.assign(400, f.prev);
  FilterConfig fc;
  fc.n_particles = static_cast<int>(state.range(0));
  fc.n_burn_in = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rlmcf_step(prior, f.z, f.sensor, f.motion, fc, rng));
  }
}
BENCHMARK(BM_RlmcfStep)->Arg(100)->Arg(400);

void BM_BootstrapStep(benchmark::State& state) {
  Fixture& f = fixture();
  Rng rng = make_rng(7, 0, 2);
  ParticleCloud prior;
  prior.particles.assign(static_cast<std::size_t>(state.range(0)), f.prev);
  FilterConfig fc;
  fc.n_particles = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_step(prior, f.z, f.sensor, f.motion, fc, rng));
  }
}
BENCHMARK(BM_BootstrapStep)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
