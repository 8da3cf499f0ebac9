#include "rltbd/motion_model.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "rltbd/gaussian.hpp"

namespace rltbd {

NcvModel build_ncv(double dt, double sigma_ax, double sigma_ay) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("build_ncv: dt must be positive");
  }
  if (!(sigma_ax > 0.0) || !(sigma_ay > 0.0)) {
    throw std::invalid_argument("build_ncv: acceleration intensities must be positive");
  }

  NcvModel m;
  m.dt = dt;
  m.sigma_ax = sigma_ax;
  m.sigma_ay = sigma_ay;

  Eigen::Matrix2d block_a;
  block_a << 1.0, dt,
             0.0, 1.0;
  Eigen::Matrix2d block_q;
  block_q << dt * dt * dt / 3.0, dt * dt / 2.0,
             dt * dt / 2.0,      dt;

  m.A.setZero();
  m.A.block<2, 2>(0, 0) = block_a;
  m.A.block<2, 2>(2, 2) = block_a;

  m.Q.setZero();
  m.Q.block<2, 2>(0, 0) = (sigma_ax * sigma_ax) * block_q;
  m.Q.block<2, 2>(2, 2) = (sigma_ay * sigma_ay) * block_q;

  Eigen::LLT<Matrix4> llt(m.Q);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("build_ncv: process-noise covariance is not positive definite");
  }
  m.Q_chol = llt.matrixL();
  m.Q_inv = llt.solve(Matrix4::Identity());
  m.Q_logdet = 2.0 * m.Q_chol.diagonal().array().log().sum();
  return m;
}

StateVector transition_mean(const NcvModel& m, const StateVector& prev) {
  return m.A * prev;
}

StateVector transition_sample(const NcvModel& m, const StateVector& prev, Rng& rng) {
  StateVector xi;
  for (int i = 0; i < kStateDim; ++i) {
    xi[i] = draw_normal(rng);
  }
  return m.A * prev + m.Q_chol * xi;
}

double transition_logpdf(const NcvModel& m, const StateVector& next, const StateVector& prev) {
  const StateVector d = next - m.A * prev;
  return -0.5 * (kStateDim * kLog2Pi + m.Q_logdet + d.dot(m.Q_inv * d));
}

StateVector transition_loggrad(const NcvModel& m, const StateVector& next, const StateVector& prev) {
  return -m.Q_inv * (next - m.A * prev);
}

}  // namespace rltbd
