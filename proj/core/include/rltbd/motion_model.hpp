#pragma once

#include "rltbd/rng.hpp"
#include "rltbd/state.hpp"

namespace rltbd {

/// Nearly-constant-velocity motion model on the (x, vx, y, vy) state.
///
/// The transition is x_k = A x_{k-1} + w, w ~ N(0, Q), where A advances
/// position by dt * velocity and Q is the continuous white-noise-acceleration
/// covariance, built per axis from its acceleration intensity.
struct NcvModel {
  double dt = 1.0;        // [s]
  double sigma_ax = 0.1;  // [m/s^2]
  double sigma_ay = 0.1;  // [m/s^2]

  Matrix4 A = Matrix4::Identity();
  Matrix4 Q = Matrix4::Identity();
  // Q appears inside every acceptance ratio, so its inverse, log-determinant
  // and lower Cholesky factor are computed once here.
  Matrix4 Q_inv = Matrix4::Identity();
  double Q_logdet = 0.0;
  Matrix4 Q_chol = Matrix4::Identity();
};

/// Builds the model. Throws std::invalid_argument unless dt > 0 and both
/// acceleration intensities are > 0.
NcvModel build_ncv(double dt, double sigma_ax, double sigma_ay);

/// A * prev.
StateVector transition_mean(const NcvModel& m, const StateVector& prev);

/// A * prev + L xi with xi ~ N(0, I), L the stored Cholesky factor of Q.
StateVector transition_sample(const NcvModel& m, const StateVector& prev, Rng& rng);

/// log N(next; A prev, Q).
double transition_logpdf(const NcvModel& m, const StateVector& next, const StateVector& prev);

/// Gradient of transition_logpdf with respect to `next`: -Q^{-1}(next - A prev).
StateVector transition_loggrad(const NcvModel& m, const StateVector& next, const StateVector& prev);

}  // namespace rltbd
