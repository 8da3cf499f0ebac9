#include "rltbd/proposals.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "rltbd/gaussian.hpp"

namespace rltbd {

namespace {

std::atomic<std::uint64_t> g_jitter_count{0};

}  // namespace

Matrix4 metric_tensor(const ObservationModel& obs, const NcvModel& motion,
                      const StateVector& x_k) {
  return obs.fisher(x_k) + motion.Q_inv;
}

Matrix4 metric_tensor(const SensorModel& sensor, const NcvModel& motion, const StateVector& x_k) {
  return likelihood_fisher(sensor, x_k) + motion.Q_inv;
}

RlMoments rl_moments_from_metric(const Matrix4& metric, const StateVector& x_k,
                                 const StateVector& total_gradient, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("rl_moments: epsilon must be positive");
  }

  Matrix4 used = metric;
  Eigen::LLT<Matrix4> llt(used);
  if (llt.info() != Eigen::Success) {
    // Near-singular metric: retry once with a trace-scaled diagonal bump.
    used.diagonal().array() += 1e-10 * metric.trace() / kStateDim;
    llt.compute(used);
    g_jitter_count.fetch_add(1, std::memory_order_relaxed);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("rl_moments: metric is not positive definite even after jitter");
    }
  }

  const double e2 = epsilon * epsilon;
  RlMoments mo;
  mo.mean = x_k + (0.5 * e2) * llt.solve(total_gradient);
  mo.covariance = e2 * llt.solve(Matrix4::Identity());
  mo.precision = used / e2;

  const Matrix4 chol_lower = llt.matrixL();
  const double logdet_metric = 2.0 * chol_lower.diagonal().array().log().sum();
  mo.log_det = kStateDim * std::log(e2) - logdet_metric;

  // M = epsilon L^{-T} gives M M^T = epsilon^2 (L L^T)^{-1} = covariance.
  mo.sample_factor =
      epsilon * chol_lower.transpose()
                    .triangularView<Eigen::Upper>()
                    .solve(Matrix4::Identity());
  return mo;
}

namespace {

RlMoments moments_impl(const ObservationModel& obs, const NcvModel& motion,
                       const StateVector& x_k, const StateVector& x_prev,
                       const RlProposalParams& params) {
  const StateVector grad = obs.gradient(x_k) + transition_loggrad(motion, x_k, x_prev);
  const Matrix4 metric = params.metric == MetricMode::riemann
                             ? metric_tensor(obs, motion, x_k)
                             : Matrix4::Identity();
  return rl_moments_from_metric(metric, x_k, grad, params.epsilon);
}

}  // namespace

RlMoments rl_moments(const ObservationModel& obs, const NcvModel& motion, const StateVector& x_k,
                     const StateVector& x_prev, const RlProposalParams& params) {
  return moments_impl(obs, motion, x_k, x_prev, params);
}

RlMoments rl_moments(const SensorModel& sensor, const Measurement& z, const NcvModel& motion,
                     const StateVector& x_k, const StateVector& x_prev,
                     const RlProposalParams& params) {
  const TbdObservation obs(sensor, z);
  return moments_impl(obs, motion, x_k, x_prev, params);
}

StateVector rl_sample(const RlMoments& moments, Rng& rng) {
  StateVector xi;
  for (int i = 0; i < kStateDim; ++i) {
    xi[i] = draw_normal(rng);
  }
  return moments.mean + moments.sample_factor * xi;
}

double rl_logpdf(const RlMoments& moments, const StateVector& x) {
  const StateVector d = x - moments.mean;
  return -0.5 * (kStateDim * kLog2Pi + moments.log_det + d.dot(moments.precision * d));
}

std::uint64_t rl_jitter_count() { return g_jitter_count.load(std::memory_order_relaxed); }

void reset_rl_jitter_count() { g_jitter_count.store(0, std::memory_order_relaxed); }

}  // namespace rltbd
