#pragma once

#include <cstdint>

#include "rltbd/motion_model.hpp"
#include "rltbd/observation_model.hpp"
#include "rltbd/rng.hpp"

namespace rltbd {

enum class MetricMode {
  riemann,   // likelihood Fisher + Q^{-1}
  identity,  // plain Langevin preconditioning
};

struct RlProposalParams {
  double epsilon = 1.0;  // step size; proposal covariance is epsilon^2 G^{-1}
  MetricMode metric = MetricMode::riemann;
};

/// Gaussian proposal q(. | x_k, x_prev) in precomputed form. `precision`
/// and `log_det` serve density evaluation; `sample_factor` (a matrix M with
/// M M^T = covariance) serves sampling.
struct RlMoments {
  StateVector mean = StateVector::Zero();
  Matrix4 covariance = Matrix4::Identity();
  Matrix4 precision = Matrix4::Identity();
  double log_det = 0.0;  // log det covariance
  Matrix4 sample_factor = Matrix4::Identity();
};

/// Position-space curvature the proposal preconditions with: the likelihood
/// Fisher information plus Q^{-1}. The Fisher term alone has rank <= 2 (the
/// image carries no velocity information); the transition term is the exact
/// negative Hessian of log p(x_k | x_prev) and restores full rank.
Matrix4 metric_tensor(const ObservationModel& obs, const NcvModel& motion, const StateVector& x_k);
Matrix4 metric_tensor(const SensorModel& sensor, const NcvModel& motion, const StateVector& x_k);

/// Langevin-with-metric proposal moments at x_k:
///   mean = x_k + (epsilon^2 / 2) G^{-1} grad,
///   cov  = epsilon^2 G^{-1},
/// where grad is the gradient of log p(y|x_k) + log p(x_k|x_prev) and G
/// either the metric tensor or the identity, per params. Throws
/// std::invalid_argument unless epsilon > 0.
RlMoments rl_moments(const ObservationModel& obs, const NcvModel& motion, const StateVector& x_k,
                     const StateVector& x_prev, const RlProposalParams& params);
RlMoments rl_moments(const SensorModel& sensor, const Measurement& z, const NcvModel& motion,
                     const StateVector& x_k, const StateVector& x_prev,
                     const RlProposalParams& params);

/// Moment assembly from an explicit metric and total drift gradient. Exposed
/// so degenerate metrics can be exercised directly; the overloads above call
/// through here.
RlMoments rl_moments_from_metric(const Matrix4& metric, const StateVector& x_k,
                                 const StateVector& total_gradient, double epsilon);

/// mean + M xi, xi ~ N(0, I), four variates in state order.
StateVector rl_sample(const RlMoments& moments, Rng& rng);

/// log q(x | moments): Gaussian log-density under the proposal.
double rl_logpdf(const RlMoments& moments, const StateVector& x);

/// How many metric factorizations have fallen back to the diagonal-jitter
/// path since the last reset. Process-wide; only ticks on near-singular
/// metrics, so a quiet counter is itself a health signal.
std::uint64_t rl_jitter_count();
void reset_rl_jitter_count();

}  // namespace rltbd
