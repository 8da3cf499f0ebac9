#include "rltbd/selftest.hpp"

#include <cmath>
#include <sstream>

#include "rltbd/config.hpp"
#include "rltbd/experiment.hpp"
#include "rltbd/filters.hpp"
#include "rltbd/linear_gaussian.hpp"

namespace rltbd {

namespace {

CheckResult check_gradient_fd(const SelftestOptions& opts) {
  CheckResult res;
  res.name = "gradient_fd";
  res.limit = 1e-5;

  const ExperimentConfig cfg = default_config();
  const SensorModel sensor = sensor_from(cfg);
  Rng rng = make_rng(opts.seed, 0, 1);

  StateVector truth = scenario_start_state(cfg.scenario);
  const Measurement z = simulate_measurement(sensor, truth, rng);
  // Evaluate slightly off the truth so the gradient is far from zero.
  StateVector at = truth;
  at[kPosX] += 40.0;
  at[kPosY] += 25.0;

  const GradientFn gradient =
      opts.gradient_override ? opts.gradient_override
                             : GradientFn(
                                   [](const SensorModel& m, const Measurement& zz,
                                      const StateVector& s) {
                                     return log_likelihood_gradient(m, zz, s);
                                   });
  const StateVector g = gradient(sensor, z, at);

  const double h = 1e-3;  // [m]; curvature scale is tens of metres
  StateVector fd = StateVector::Zero();
  for (const int c : {kPosX, kPosY}) {
    StateVector plus = at;
    StateVector minus = at;
    plus[c] += h;
    minus[c] -= h;
    fd[c] = (log_likelihood(sensor, z, plus) - log_likelihood(sensor, z, minus)) / (2.0 * h);
  }

  const double denom = fd.norm();
  res.measured = denom > 0.0 ? (g - fd).norm() / denom : (g - fd).norm();
  res.passed = res.measured < res.limit;
  std::ostringstream d;
  d << "relative error between analytic and central-difference gradient, step " << h << " m";
  res.detail = d.str();
  return res;
}

CheckResult check_fisher_identity(const SelftestOptions& opts) {
  CheckResult res;
  res.name = "fisher_identity";
  res.limit = 0.05;

  const ExperimentConfig cfg = default_config();
  const SensorModel sensor = sensor_from(cfg);
  const StateVector at = scenario_start_state(cfg.scenario);
  const Matrix4 fisher = likelihood_fisher(sensor, at);

  const GradientFn gradient =
      opts.gradient_override ? opts.gradient_override
                             : GradientFn(
                                   [](const SensorModel& m, const Measurement& zz,
                                      const StateVector& s) {
                                     return log_likelihood_gradient(m, zz, s);
                                   });

  // E[g g^T] at the true state equals the Fisher matrix; estimate the left
  // side from fresh measurements.
  const int n = opts.quick ? 2000 : 8000;
  Rng rng = make_rng(opts.seed, 0, 2);
  Matrix4 acc = Matrix4::Zero();
  for (int i = 0; i < n; ++i) {
    const Measurement z = simulate_measurement(sensor, at, rng);
    const StateVector g = gradient(sensor, z, at);
    acc += g * g.transpose();
  }
  acc /= static_cast<double>(n);

  res.measured = (acc - fisher).norm() / fisher.norm();
  res.passed = res.measured < res.limit;
  std::ostringstream d;
  d << "relative Frobenius gap between Fisher matrix and mean score outer product, " << n
    << " samples";
  res.detail = d.str();
  return res;
}

CheckResult check_kalman_agreement(const SelftestOptions& opts) {
  CheckResult res;
  res.name = "kalman_agreement";
  res.limit = 3.0;

  // Linear position observations make the exact posterior computable, so the
  // MCMC filter can be checked end to end: its replicate-averaged posterior
  // mean must sit within three standard errors of the Kalman mean.
  const NcvModel motion = build_ncv(1.0, 1.0, 1.0);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, kStateDim);
  H(0, kPosX) = 1.0;
  H(1, kPosY) = 1.0;
  const double noise_var = 25.0;  // 5 m measurement noise
  const int k_steps = 5;
  const int replicates = 20;

  const StateVector truth0{100.0, 3.0, -50.0, -2.0};
  GaussianBelief belief;
  belief.mean = truth0 + StateVector{2.0, 0.5, -1.0, 0.2};
  belief.cov = Matrix4::Identity() * 16.0;
  belief.cov(kVelX, kVelX) = belief.cov(kVelY, kVelY) = 4.0;

  Rng scenario_rng = make_rng(opts.seed, 0, 3);
  std::vector<StateVector> truth(k_steps + 1);
  truth[0] = truth0;
  std::vector<Eigen::VectorXd> zs;
  GaussianBelief kalman = belief;
  for (int k = 1; k <= k_steps; ++k) {
    truth[k] = transition_sample(motion, truth[k - 1], scenario_rng);
    Eigen::VectorXd z = H * truth[k];
    z[0] += std::sqrt(noise_var) * draw_normal(scenario_rng);
    z[1] += std::sqrt(noise_var) * draw_normal(scenario_rng);
    zs.push_back(z);
    kalman = kalman_update(kalman_predict(motion, kalman), H, z, noise_var);
  }

  FilterConfig fc;
  fc.n_particles = opts.quick ? 400 : 1000;
  fc.n_burn_in = 200;
  fc.proposal.epsilon = 1.0;
  fc.proposal.metric = MetricMode::riemann;

  std::vector<StateVector> means(replicates);
  for (int rep = 0; rep < replicates; ++rep) {
    Rng rng = make_rng(opts.seed, static_cast<std::uint64_t>(rep), 4);
    EmpiricalPosterior posterior;
    posterior.particles.resize(fc.n_particles);
    // Start from the same Gaussian belief the Kalman recursion starts from.
    const Eigen::LLT<Matrix4> llt(belief.cov);
    const Matrix4 L = llt.matrixL();
    for (int i = 0; i < fc.n_particles; ++i) {
      StateVector xi;
      for (int c = 0; c < kStateDim; ++c) {
        xi[c] = draw_normal(rng);
      }
      posterior.particles[i] = belief.mean + L * xi;
    }
    for (int k = 1; k <= k_steps; ++k) {
      const LinearGaussianObservation obs(H, zs[k - 1], noise_var);
      McmcStepResult step = rlmcf_step(posterior, obs, motion, fc, rng);
      posterior = std::move(step.posterior);
    }
    means[rep] = point_estimate(posterior);
  }

  StateVector mean = StateVector::Zero();
  for (const StateVector& m : means) {
    mean += m;
  }
  mean /= static_cast<double>(replicates);
  StateVector var = StateVector::Zero();
  for (const StateVector& m : means) {
    var += (m - mean).cwiseProduct(m - mean);
  }
  var /= static_cast<double>(replicates - 1);

  double worst = 0.0;
  for (int c = 0; c < kStateDim; ++c) {
    const double se = std::max(std::sqrt(var[c] / replicates), 1e-9);
    worst = std::max(worst, std::abs(mean[c] - kalman.mean[c]) / se);
  }
  res.measured = worst;
  res.passed = res.measured < res.limit;
  std::ostringstream d;
  d << "worst per-component |replicate mean - Kalman mean| in standard errors, " << replicates
    << " replicates of " << fc.n_particles << " particles";
  res.detail = d.str();
  return res;
}

}  // namespace

std::vector<CheckResult> run_selftest(const SelftestOptions& opts) {
  std::vector<CheckResult> results;
  results.push_back(check_gradient_fd(opts));
  results.push_back(check_fisher_identity(opts));
  results.push_back(check_kalman_agreement(opts));
  return results;
}

}  // namespace rltbd
