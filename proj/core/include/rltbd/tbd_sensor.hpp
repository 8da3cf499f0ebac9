#pragma once

#include <iosfwd>
#include <vector>

#include "rltbd/rng.hpp"
#include "rltbd/state.hpp"

namespace rltbd {

/// One unthresholded intensity image, flattened row-major over range rows.
using Measurement = Eigen::VectorXd;

/// User-facing sensor parameters; see make_sensor_model for how the grid is
/// realized from them.
struct SensorSettings {
  double range_psf_const = 0.0;    // spread of the point response in range^2 [m^2]
  double bearing_psf_const = 0.0;  // spread in bearing^2 [rad^2]
  double range_res = 0.0;          // cell size [m]
  double bearing_res = 0.0;        // cell size [rad]
  double range_min = 0.0;          // requested window [m]
  double range_max = 0.0;
  double bearing_min = 0.0;        // requested window [rad]
  double bearing_max = 0.0;
  double sigma_w = 0.0;            // additive noise std-dev per cell
  double snr_db = 0.0;             // peak SNR defining the target amplitude
  double gate_threshold = 0.0;     // cells with PSF below this are treated as
                                   // empty in likelihood work; 0 disables

  bool operator==(const SensorSettings&) const = default;
};

/// Polar sensor with a separable Gaussian point-spread response.
///
/// A target at polar position (r, b) contributes
///   amplitude * exp(-(r_j - r)^2 / (2 Rc)) * exp(-(b_j - b)^2 / (2 Bc))
/// to the cell centred at (r_j, b_j), on top of N(0, sigma_w^2) noise,
/// independently across cells.
struct SensorModel {
  double range_psf_const = 0.0;
  double bearing_psf_const = 0.0;
  double range_res = 0.0;
  double bearing_res = 0.0;
  double range_min = 0.0;  // realized window, re-centred on the requested one
  double range_max = 0.0;
  double bearing_min = 0.0;
  double bearing_max = 0.0;
  double sigma_w = 0.0;
  double amplitude = 0.0;
  double gate_threshold = 0.0;
  int n_range = 0;
  int n_bearing = 0;
  int cell_count = 0;  // n_range * n_bearing

  std::vector<double> range_centroids;    // size n_range
  std::vector<double> bearing_centroids;  // size n_bearing

  int cell_index(int range_row, int bearing_col) const {
    return range_row * n_bearing + bearing_col;
  }
  double cell_range(int cell) const { return range_centroids[cell / n_bearing]; }
  double cell_bearing(int cell) const { return bearing_centroids[cell % n_bearing]; }
};

/// Target amplitude for a peak SNR of snr_db over noise sigma_w:
/// amplitude = sigma_w * 10^(snr_db / 20).
double snr_to_amplitude(double sigma_w, double snr_db);

/// Realizes the grid. Cell counts come from rounding extent / resolution to
/// the nearest integer; the realized window (count * resolution) is then
/// re-centred on the requested midpoint, so the stated resolution and the
/// window symmetry survive even when the ratio is not an integer.
/// Throws std::invalid_argument on non-positive spreads, resolutions,
/// noise level, or empty/inverted windows, and when a window rounds to
/// zero cells.
SensorModel make_sensor_model(const SensorSettings& s);

struct Polar {
  double range;    // [m]
  double bearing;  // [rad]
};

/// Position part of the state in polar form. Throws std::domain_error at the
/// origin, where bearing is undefined.
Polar polar_of(const StateVector& state);

/// Point-spread value of `state` at one cell, in [0, 1]. Throws
/// std::out_of_range on a bad cell index.
double psf(const SensorModel& model, int cell, const StateVector& state);

/// Noise-free image: amplitude * psf per cell.
Measurement predicted_image(const SensorModel& model, const StateVector& state);

/// predicted_image plus independent N(0, sigma_w^2) noise per cell.
Measurement simulate_measurement(const SensorModel& model, const StateVector& state, Rng& rng);

/// log p(z | state): sum of per-cell Gaussian log-densities around the
/// predicted image. Gated cells contribute a zero-mean term.
double log_likelihood(const SensorModel& model, const Measurement& z, const StateVector& state);

/// Gradient of log_likelihood with respect to the state. Velocity components
/// are exactly zero: the image depends on position only.
StateVector log_likelihood_gradient(const SensorModel& model, const Measurement& z,
                                    const StateVector& state);

/// Expected information of one image about the state,
/// sum_j (d yhat_j/dx)^T (d yhat_j/dx) / sigma_w^2. Rank <= 2: only the
/// position block is nonzero.
Matrix4 likelihood_fisher(const SensorModel& model, const StateVector& state);

/// Writes one image as CSV, one row per cell: r, b, z. Header included.
void write_frame_csv(std::ostream& out, const SensorModel& model, const Measurement& z);

}  // namespace rltbd
