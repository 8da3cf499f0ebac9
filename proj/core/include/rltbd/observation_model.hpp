#pragma once

#include "rltbd/state.hpp"
#include "rltbd/tbd_sensor.hpp"

namespace rltbd {

/// Measurement-model surface the samplers consume: the log-likelihood feeds
/// the acceptance ratios, gradient and Fisher information feed the
/// Riemann-Langevin proposal. Implementations bind one measurement.
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;

  virtual double log_likelihood(const StateVector& state) const = 0;
  virtual StateVector gradient(const StateVector& state) const = 0;
  virtual Matrix4 fisher(const StateVector& state) const = 0;
};

/// Binds a sensor model and one measured intensity image. Holds references;
/// both must outlive the observation.
class TbdObservation final : public ObservationModel {
 public:
  TbdObservation(const SensorModel& model, const Measurement& z) : model_(&model), z_(&z) {}

  double log_likelihood(const StateVector& state) const override {
    return rltbd::log_likelihood(*model_, *z_, state);
  }
  StateVector gradient(const StateVector& state) const override {
    return log_likelihood_gradient(*model_, *z_, state);
  }
  Matrix4 fisher(const StateVector& state) const override {
    return likelihood_fisher(*model_, state);
  }

 private:
  const SensorModel* model_;
  const Measurement* z_;
};

}  // namespace rltbd
