#pragma once

#include <Eigen/Dense>

#include "rltbd/motion_model.hpp"
#include "rltbd/observation_model.hpp"

namespace rltbd {

/// Linear observation z = H x + v, v ~ N(0, noise_var I). Gives the filters
/// a model with an exactly known posterior, so the Kalman recursion below
/// can referee them.
class LinearGaussianObservation final : public ObservationModel {
 public:
  /// H must have kStateDim columns; noise_var > 0.
  LinearGaussianObservation(Eigen::MatrixXd H, Eigen::VectorXd z, double noise_var);

  double log_likelihood(const StateVector& state) const override;
  StateVector gradient(const StateVector& state) const override;
  Matrix4 fisher(const StateVector& state) const override;

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& z() const { return z_; }
  double noise_var() const { return noise_var_; }

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd z_;
  double noise_var_;
  Matrix4 fisher_;  // H^T H / noise_var, state-independent
};

struct GaussianBelief {
  StateVector mean = StateVector::Zero();
  Matrix4 cov = Matrix4::Identity();
};

/// Exact propagation through the motion model: (A m, A P A^T + Q).
GaussianBelief kalman_predict(const NcvModel& motion, const GaussianBelief& prior);

/// Exact measurement update for z = H x + N(0, noise_var I).
GaussianBelief kalman_update(const GaussianBelief& predicted, const Eigen::MatrixXd& H,
                             const Eigen::VectorXd& z, double noise_var);

}  // namespace rltbd
