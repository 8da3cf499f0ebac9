#include "rltbd/linear_gaussian.hpp"

#include <stdexcept>

#include "rltbd/gaussian.hpp"

namespace rltbd {

LinearGaussianObservation::LinearGaussianObservation(Eigen::MatrixXd H, Eigen::VectorXd z,
                                                     double noise_var)
    : H_(std::move(H)), z_(std::move(z)), noise_var_(noise_var) {
  if (H_.cols() != kStateDim) {
    throw std::invalid_argument("LinearGaussianObservation: H must have one column per state");
  }
  if (H_.rows() != z_.size()) {
    throw std::invalid_argument("LinearGaussianObservation: z length must match rows of H");
  }
  if (!(noise_var_ > 0.0)) {
    throw std::invalid_argument("LinearGaussianObservation: noise_var must be positive");
  }
  fisher_ = (H_.transpose() * H_) / noise_var_;
}

double LinearGaussianObservation::log_likelihood(const StateVector& state) const {
  const Eigen::VectorXd resid = z_ - H_ * state;
  return -0.5 * (H_.rows() * (kLog2Pi + std::log(noise_var_)) +
                 resid.squaredNorm() / noise_var_);
}

StateVector LinearGaussianObservation::gradient(const StateVector& state) const {
  return H_.transpose() * (z_ - H_ * state) / noise_var_;
}

Matrix4 LinearGaussianObservation::fisher(const StateVector&) const { return fisher_; }

GaussianBelief kalman_predict(const NcvModel& motion, const GaussianBelief& prior) {
  GaussianBelief out;
  out.mean = motion.A * prior.mean;
  out.cov = motion.A * prior.cov * motion.A.transpose() + motion.Q;
  return out;
}

GaussianBelief kalman_update(const GaussianBelief& predicted, const Eigen::MatrixXd& H,
                             const Eigen::VectorXd& z, double noise_var) {
  if (H.cols() != kStateDim || H.rows() != z.size()) {
    throw std::invalid_argument("kalman_update: H/z dimensions disagree");
  }
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("kalman_update: noise_var must be positive");
  }
  const Eigen::MatrixXd S = H * predicted.cov * H.transpose() +
                            noise_var * Eigen::MatrixXd::Identity(H.rows(), H.rows());
  const Eigen::MatrixXd K = predicted.cov * H.transpose() * S.llt().solve(
                                Eigen::MatrixXd::Identity(H.rows(), H.rows()));
  GaussianBelief out;
  out.mean = predicted.mean + K * (z - H * predicted.mean);
  const Matrix4 ikh = Matrix4::Identity() - K * H;
  // Joseph form keeps the covariance symmetric positive definite.
  out.cov = ikh * predicted.cov * ikh.transpose() + noise_var * K * K.transpose();
  return out;
}

}  // namespace rltbd
