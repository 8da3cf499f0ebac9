#include "rltbd/tbd_sensor.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rltbd/csv.hpp"
#include "rltbd/gaussian.hpp"

namespace rltbd {

namespace {

// Shared by every evaluation path. The PSF is separable, so each range row
// and bearing column contributes one factor; a cell's response is the
// product of its row and column factors. Evaluating it this way everywhere
// keeps predicted_image, psf and the likelihood derivatives bit-consistent,
// which in turn makes residuals cancel exactly when z equals the prediction.
double axis_gain(double delta, double spread) {
  return std::exp(-(delta * delta) / (2.0 * spread));
}

double axis_exponent(double delta, double spread) {
  return -(delta * delta) / (2.0 * spread);
}

struct AxisFactors {
  std::vector<double> gain;      // exp factor per centroid
  std::vector<double> exponent;  // log of gain, used for gating
  std::vector<double> pull;      // (centroid - target) / spread

  AxisFactors(const std::vector<double>& centroids, double target, double spread) {
    gain.resize(centroids.size());
    exponent.resize(centroids.size());
    pull.resize(centroids.size());
    for (std::size_t i = 0; i < centroids.size(); ++i) {
      const double d = centroids[i] - target;
      gain[i] = axis_gain(d, spread);
      exponent[i] = axis_exponent(d, spread);
      pull[i] = d / spread;
    }
  }
};

struct GateCheck {
  bool enabled;
  double log_threshold;

  explicit GateCheck(const SensorModel& m)
      : enabled(m.gate_threshold > 0.0),
        log_threshold(enabled ? std::log(m.gate_threshold) : 0.0) {}

  bool gated(double exponent_sum) const { return enabled && exponent_sum < log_threshold; }
};

void check_measurement_size(const SensorModel& m, const Measurement& z, const char* where) {
  if (z.size() != m.cell_count) {
    throw std::invalid_argument(std::string(where) + ": measurement size does not match cell count");
  }
}

}  // namespace

double snr_to_amplitude(double sigma_w, double snr_db) {
  if (!(sigma_w > 0.0)) {
    throw std::invalid_argument("snr_to_amplitude: sigma_w must be positive");
  }
  return sigma_w * std::pow(10.0, snr_db / 20.0);
}

SensorModel make_sensor_model(const SensorSettings& s) {
  if (!(s.range_psf_const > 0.0) || !(s.bearing_psf_const > 0.0)) {
    throw std::invalid_argument("make_sensor_model: PSF spreads must be positive");
  }
  if (!(s.range_res > 0.0) || !(s.bearing_res > 0.0)) {
    throw std::invalid_argument("make_sensor_model: resolutions must be positive");
  }
  if (!(s.range_min >= 0.0) || !(s.range_min < s.range_max)) {
    throw std::invalid_argument("make_sensor_model: need 0 <= range_min < range_max");
  }
  if (!(s.bearing_min < s.bearing_max)) {
    throw std::invalid_argument("make_sensor_model: need bearing_min < bearing_max");
  }
  if (!(s.sigma_w > 0.0)) {
    throw std::invalid_argument("make_sensor_model: sigma_w must be positive");
  }
  if (!(s.gate_threshold >= 0.0) || !(s.gate_threshold < 1.0)) {
    throw std::invalid_argument("make_sensor_model: gate_threshold must lie in [0, 1)");
  }

  SensorModel m;
  m.range_psf_const = s.range_psf_const;
  m.bearing_psf_const = s.bearing_psf_const;
  m.range_res = s.range_res;
  m.bearing_res = s.bearing_res;
  m.sigma_w = s.sigma_w;
  m.amplitude = snr_to_amplitude(s.sigma_w, s.snr_db);
  m.gate_threshold = s.gate_threshold;

  m.n_range = static_cast<int>(std::lround((s.range_max - s.range_min) / s.range_res));
  m.n_bearing = static_cast<int>(std::lround((s.bearing_max - s.bearing_min) / s.bearing_res));
  if (m.n_range < 1 || m.n_bearing < 1) {
    throw std::invalid_argument("make_sensor_model: window shorter than half a cell");
  }
  m.cell_count = m.n_range * m.n_bearing;

  const double range_mid = 0.5 * (s.range_min + s.range_max);
  const double bearing_mid = 0.5 * (s.bearing_min + s.bearing_max);
  m.range_min = range_mid - 0.5 * m.n_range * s.range_res;
  m.range_max = range_mid + 0.5 * m.n_range * s.range_res;
  m.bearing_min = bearing_mid - 0.5 * m.n_bearing * s.bearing_res;
  m.bearing_max = bearing_mid + 0.5 * m.n_bearing * s.bearing_res;
  if (m.range_min < 0.0) {
    throw std::invalid_argument("make_sensor_model: realized range window crosses zero");
  }

  m.range_centroids.resize(m.n_range);
  for (int i = 0; i < m.n_range; ++i) {
    m.range_centroids[i] = m.range_min + (i + 0.5) * s.range_res;
  }
  m.bearing_centroids.resize(m.n_bearing);
  for (int l = 0; l < m.n_bearing; ++l) {
    m.bearing_centroids[l] = m.bearing_min + (l + 0.5) * s.bearing_res;
  }
  return m;
}

Polar polar_of(const StateVector& state) {
  const double x = state[kPosX];
  const double y = state[kPosY];
  if (x == 0.0 && y == 0.0) {
    throw std::domain_error("polar_of: bearing undefined at the sensor origin");
  }
  return Polar{std::hypot(x, y), std::atan2(y, x)};
}

double psf(const SensorModel& model, int cell, const StateVector& state) {
  if (cell < 0 || cell >= model.cell_count) {
    throw std::out_of_range("psf: cell index outside the grid");
  }
  const Polar p = polar_of(state);
  return axis_gain(model.cell_range(cell) - p.range, model.range_psf_const) *
         axis_gain(model.cell_bearing(cell) - p.bearing, model.bearing_psf_const);
}

Measurement predicted_image(const SensorModel& model, const StateVector& state) {
  const Polar p = polar_of(state);
  const AxisFactors fr(model.range_centroids, p.range, model.range_psf_const);
  const AxisFactors fb(model.bearing_centroids, p.bearing, model.bearing_psf_const);

  Measurement out(model.cell_count);
  int j = 0;
  for (int i = 0; i < model.n_range; ++i) {
    for (int l = 0; l < model.n_bearing; ++l, ++j) {
      out[j] = model.amplitude * (fr.gain[i] * fb.gain[l]);
    }
  }
  return out;
}

Measurement simulate_measurement(const SensorModel& model, const StateVector& state, Rng& rng) {
  Measurement z = predicted_image(model, state);
  for (int j = 0; j < model.cell_count; ++j) {
    z[j] += model.sigma_w * draw_normal(rng);
  }
  return z;
}

double log_likelihood(const SensorModel& model, const Measurement& z, const StateVector& state) {
  check_measurement_size(model, z, "log_likelihood");
  const Polar p = polar_of(state);
  const AxisFactors fr(model.range_centroids, p.range, model.range_psf_const);
  const AxisFactors fb(model.bearing_centroids, p.bearing, model.bearing_psf_const);
  const GateCheck gate(model);

  const double var = model.sigma_w * model.sigma_w;
  double sum_sq = 0.0;
  int j = 0;
  for (int i = 0; i < model.n_range; ++i) {
    for (int l = 0; l < model.n_bearing; ++l, ++j) {
      const double yhat = gate.gated(fr.exponent[i] + fb.exponent[l])
                              ? 0.0
                              : model.amplitude * (fr.gain[i] * fb.gain[l]);
      const double resid = z[j] - yhat;
      sum_sq += resid * resid;
    }
  }
  return -0.5 * (model.cell_count * (kLog2Pi + std::log(var)) + sum_sq / var);
}

StateVector log_likelihood_gradient(const SensorModel& model, const Measurement& z,
                                    const StateVector& state) {
  check_measurement_size(model, z, "log_likelihood_gradient");
  const Polar p = polar_of(state);
  const AxisFactors fr(model.range_centroids, p.range, model.range_psf_const);
  const AxisFactors fb(model.bearing_centroids, p.bearing, model.bearing_psf_const);
  const GateCheck gate(model);

  // Polar-to-Cartesian chain rule: dr/dx = x/r, dr/dy = y/r,
  // db/dx = -y/r^2, db/dy = x/r^2.
  const double x = state[kPosX];
  const double y = state[kPosY];
  const double r = p.range;
  const double drdx = x / r;
  const double drdy = y / r;
  const double dbdx = -y / (r * r);
  const double dbdy = x / (r * r);

  double gx = 0.0;
  double gy = 0.0;
  int j = 0;
  for (int i = 0; i < model.n_range; ++i) {
    for (int l = 0; l < model.n_bearing; ++l, ++j) {
      if (gate.gated(fr.exponent[i] + fb.exponent[l])) {
        continue;
      }
      const double yhat = model.amplitude * (fr.gain[i] * fb.gain[l]);
      const double resid = z[j] - yhat;
      // d yhat / dx = yhat * (pull_r * dr/dx + pull_b * db/dx), and same in y.
      gx += resid * yhat * (fr.pull[i] * drdx + fb.pull[l] * dbdx);
      gy += resid * yhat * (fr.pull[i] * drdy + fb.pull[l] * dbdy);
    }
  }

  const double var = model.sigma_w * model.sigma_w;
  StateVector g = StateVector::Zero();
  g[kPosX] = gx / var;
  g[kPosY] = gy / var;
  return g;
}

Matrix4 likelihood_fisher(const SensorModel& model, const StateVector& state) {
  const Polar p = polar_of(state);
  const AxisFactors fr(model.range_centroids, p.range, model.range_psf_const);
  const AxisFactors fb(model.bearing_centroids, p.bearing, model.bearing_psf_const);
  const GateCheck gate(model);

  const double x = state[kPosX];
  const double y = state[kPosY];
  const double r = p.range;
  const double drdx = x / r;
  const double drdy = y / r;
  const double dbdx = -y / (r * r);
  const double dbdy = x / (r * r);

  double fxx = 0.0;
  double fxy = 0.0;
  double fyy = 0.0;
  for (int i = 0; i < model.n_range; ++i) {
    for (int l = 0; l < model.n_bearing; ++l) {
      if (gate.gated(fr.exponent[i] + fb.exponent[l])) {
        continue;
      }
      const double yhat = model.amplitude * (fr.gain[i] * fb.gain[l]);
      const double cx = yhat * (fr.pull[i] * drdx + fb.pull[l] * dbdx);
      const double cy = yhat * (fr.pull[i] * drdy + fb.pull[l] * dbdy);
      fxx += cx * cx;
      fxy += cx * cy;
      fyy += cy * cy;
    }
  }

  const double var = model.sigma_w * model.sigma_w;
  Matrix4 fisher = Matrix4::Zero();
  fisher(kPosX, kPosX) = fxx / var;
  fisher(kPosX, kPosY) = fxy / var;
  fisher(kPosY, kPosX) = fxy / var;
  fisher(kPosY, kPosY) = fyy / var;
  return fisher;
}

void write_frame_csv(std::ostream& out, const SensorModel& model, const Measurement& z) {
  check_measurement_size(model, z, "write_frame_csv");
  out << "r,b,z\n";
  for (int j = 0; j < model.cell_count; ++j) {
    out << format_double(model.cell_range(j)) << ',' << format_double(model.cell_bearing(j))
        << ',' << format_double(z[j]) << '\n';
  }
}

}  // namespace rltbd
