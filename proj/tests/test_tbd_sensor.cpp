#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rltbd/config.hpp"
#include "rltbd/tbd_sensor.hpp"
#include "support/oracles.hpp"

using namespace rltbd;

namespace {

// The stock 8 x 209 sensor.
SensorModel stock_sensor() { return sensor_from(default_config()); }

// A 4 x 4 grid around 100-180 m where brute-force oracles stay cheap. The
// spreads are sized so the PSF covers a few cells.
SensorModel tiny_sensor(double sigma_w = 0.01, double gate = 0.0) {
  SensorSettings s;
  s.range_psf_const = 225.0;
  s.bearing_psf_const = 0.0225;
  s.range_res = 20.0;
  s.bearing_res = 0.2;
  s.range_min = 100.0;
  s.range_max = 180.0;
  s.bearing_min = -0.4;
  s.bearing_max = 0.4;
  s.sigma_w = sigma_w;
  s.snr_db = 20.0;
  s.gate_threshold = gate;
  return make_sensor_model(s);
}

StateVector state_at_polar(double range, double bearing, double vx = 0.0, double vy = 0.0) {
  StateVector s;
  s[kPosX] = range * std::cos(bearing);
  s[kPosY] = range * std::sin(bearing);
  s[kVelX] = vx;
  s[kVelY] = vy;
  return s;
}

}  // namespace

TEST_CASE("snr_to_amplitude matches the decibel definition") {
  CHECK(snr_to_amplitude(1e-4, 80.0) == 1.0);
  CHECK(snr_to_amplitude(0.5, 20.0) == 5.0);
  CHECK(snr_to_amplitude(2.0, -20.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(snr_to_amplitude(0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(snr_to_amplitude(-1.0, 10.0), std::invalid_argument);
}

TEST_CASE("polar_of converts positions and rejects the origin") {
  StateVector s = StateVector::Zero();
  s[kPosX] = 3.0;
  s[kPosY] = 4.0;
  const Polar p = polar_of(s);
  CHECK(p.range == 5.0);
  CHECK(p.bearing == doctest::Approx(0.9272952180016122).epsilon(1e-15));

  s[kPosX] = -3.0;
  s[kPosY] = -4.0;
  const Polar q = polar_of(s);
  CHECK(q.range == 5.0);
  CHECK(q.bearing == doctest::Approx(-2.214297435588181).epsilon(1e-15));

  StateVector origin = StateVector::Zero();
  origin[kVelX] = 10.0;  // velocity does not rescue an undefined bearing
  CHECK_THROWS_AS(polar_of(origin), std::domain_error);
}

TEST_CASE("grid realization: counts, re-centred window, centroids") {
  const SensorModel m = stock_sensor();
  CHECK(m.n_range == 8);
  CHECK(m.n_bearing == 209);
  CHECK(m.cell_count == 1672);
  CHECK(m.range_min == 22000.0);
  CHECK(m.range_max == 26000.0);
  // 209 cells of 0.005 rad cover 1.045 rad; the requested +-pi/6 window is
  // re-centred, so the realized window is +-0.5225.
  CHECK(m.bearing_min == doctest::Approx(-0.5225).epsilon(1e-12));
  CHECK(m.bearing_max == doctest::Approx(0.5225).epsilon(1e-12));
  CHECK(m.range_centroids.front() == doctest::Approx(22250.0).epsilon(1e-15));
  CHECK(m.range_centroids.back() == doctest::Approx(25750.0).epsilon(1e-15));
  CHECK(m.bearing_centroids.front() == doctest::Approx(-0.52).epsilon(1e-9));
  CHECK(m.bearing_centroids.back() == doctest::Approx(0.52).epsilon(1e-9));
  CHECK(m.amplitude == 1.0);

  // Flat index round-trips.
  CHECK(m.cell_index(0, 0) == 0);
  CHECK(m.cell_index(1, 0) == 209);
  CHECK(m.cell_range(m.cell_index(3, 17)) == m.range_centroids[3]);
  CHECK(m.cell_bearing(m.cell_index(3, 17)) == m.bearing_centroids[17]);
}

TEST_CASE("grid realization rounds a fractional window to the nearest count") {
  SensorSettings s;
  s.range_psf_const = 100.0;
  s.bearing_psf_const = 0.01;
  s.range_res = 10.0;
  s.bearing_res = 0.1;
  s.range_min = 100.0;
  s.range_max = 184.0;  // 8.4 cells -> 8, re-centred to [102, 182]
  s.bearing_min = -0.43;
  s.bearing_max = 0.43;  // 8.6 cells -> 9, re-centred to +-0.45
  s.sigma_w = 1.0;
  s.snr_db = 10.0;
  const SensorModel m = make_sensor_model(s);
  CHECK(m.n_range == 8);
  CHECK(m.range_min == doctest::Approx(102.0).epsilon(1e-15));
  CHECK(m.range_max == doctest::Approx(182.0).epsilon(1e-15));
  CHECK(m.n_bearing == 9);
  CHECK(m.bearing_min == doctest::Approx(-0.45).epsilon(1e-12));
  CHECK(m.bearing_max == doctest::Approx(0.45).epsilon(1e-12));
  // The realized grid keeps the requested resolution exactly.
  CHECK(m.range_centroids[1] - m.range_centroids[0] == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("bad sensor settings are rejected") {
  SensorSettings s;
  s.range_psf_const = 100.0;
  s.bearing_psf_const = 0.01;
  s.range_res = 10.0;
  s.bearing_res = 0.1;
  s.range_min = 100.0;
  s.range_max = 180.0;
  s.bearing_min = -0.4;
  s.bearing_max = 0.4;
  s.sigma_w = 1.0;
  s.snr_db = 10.0;

  auto bad = s;
  bad.range_res = 0.0;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  bad = s;
  bad.bearing_res = -0.1;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  bad = s;
  bad.range_min = 180.0;
  bad.range_max = 100.0;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  bad = s;
  bad.range_min = -5.0;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  bad = s;
  bad.sigma_w = 0.0;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  bad = s;
  bad.range_psf_const = 0.0;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  bad = s;
  bad.gate_threshold = 1.0;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  bad = s;
  bad.gate_threshold = -0.1;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  // Window shorter than half a cell rounds to zero cells.
  bad = s;
  bad.range_max = 104.0;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
  // Nine 10 m cells re-centred on [0, 85] would start at -2.5 m.
  bad = s;
  bad.range_min = 0.0;
  bad.range_max = 86.0;
  CHECK_THROWS_AS(make_sensor_model(bad), std::invalid_argument);
}

TEST_CASE("psf peaks at the target cell and matches the per-cell formula") {
  const SensorModel m = tiny_sensor();

  // Directly on a centroid the response is 1 to within underflow of the
  // squared rounding error.
  const int centre = m.cell_index(2, 1);
  const StateVector at = state_at_polar(m.cell_range(centre), m.cell_bearing(centre));
  CHECK(psf(m, centre, at) == 1.0);

  // Against the literal definition, evaluated in extended precision.
  const StateVector s = state_at_polar(147.0, 0.13);
  const Polar p = polar_of(s);
  for (int j = 0; j < m.cell_count; ++j) {
    const long double dr = m.cell_range(j) - static_cast<long double>(p.range);
    const long double db = m.cell_bearing(j) - static_cast<long double>(p.bearing);
    const long double want = std::exp(-dr * dr / (2.0L * m.range_psf_const)) *
                             std::exp(-db * db / (2.0L * m.bearing_psf_const));
    CHECK(psf(m, j, s) == doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
    CHECK(psf(m, j, s) > 0.0);
    CHECK(psf(m, j, s) <= 1.0);
  }

  CHECK_THROWS_AS(psf(m, -1, s), std::out_of_range);
  CHECK_THROWS_AS(psf(m, m.cell_count, s), std::out_of_range);
}

TEST_CASE("psf half-response sits at sqrt(2 ln 2) times the spread") {
  const SensorModel m = tiny_sensor();
  const int cell = m.cell_index(2, 2);
  const double delta = std::sqrt(2.0 * m.range_psf_const * std::log(2.0));
  const StateVector s = state_at_polar(m.cell_range(cell) - delta, m.cell_bearing(cell));
  CHECK(psf(m, cell, s) == doctest::Approx(0.5).epsilon(1e-9));

  const double delta_b = std::sqrt(2.0 * m.bearing_psf_const * std::log(2.0));
  const StateVector sb = state_at_polar(m.cell_range(cell), m.cell_bearing(cell) - delta_b);
  CHECK(psf(m, cell, sb) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("predicted image is amplitude times psf, cell for cell") {
  const SensorModel m = tiny_sensor();
  const StateVector s = state_at_polar(141.0, -0.07);
  const Measurement img = predicted_image(m, s);
  REQUIRE(img.size() == m.cell_count);
  for (int j = 0; j < m.cell_count; ++j) {
    CHECK(img[j] == m.amplitude * psf(m, j, s));
  }
}

TEST_CASE("predicted image total mass is bounded by the Gaussian integral") {
  const SensorModel m = stock_sensor();
  const StateVector s = state_at_polar(24000.0, 0.0);
  const Measurement img = predicted_image(m, s);
  // Sum over cells <= amplitude * 2 pi sqrt(Rc Bc) / (res_r res_b): the
  // discrete sum of a separable Gaussian never exceeds its integral by more
  // than round-off once the grid resolves the spread.
  const double bound = m.amplitude * 2.0 * M_PI *
                       std::sqrt(m.range_psf_const * m.bearing_psf_const) /
                       (m.range_res * m.bearing_res);
  CHECK(img.sum() <= bound * (1.0 + 1e-9));
  CHECK(img.sum() > 0.0);

  // The peak cell is the one nearest the target.
  int argmax = 0;
  img.maxCoeff(&argmax);
  CHECK(std::abs(m.cell_range(argmax) - 24000.0) <= 0.5 * m.range_res);
  CHECK(std::abs(m.cell_bearing(argmax) - 0.0) <= 0.5 * m.bearing_res);
}

TEST_CASE("simulated measurements are the image plus calibrated noise") {
  const SensorModel m = stock_sensor();
  const StateVector s = state_at_polar(24000.0, 0.1);
  const Measurement img = predicted_image(m, s);

  Rng rng = make_rng(5, 0, 0);
  const Measurement z = simulate_measurement(m, s, rng);
  REQUIRE(z.size() == m.cell_count);

  const Eigen::VectorXd noise = z - img;
  const double mean = noise.mean();
  const double sd = std::sqrt((noise.array() - mean).square().sum() / (m.cell_count - 1));
  CHECK(std::abs(mean) < 4.0 * m.sigma_w / std::sqrt(static_cast<double>(m.cell_count)));
  CHECK(sd == doctest::Approx(m.sigma_w).epsilon(0.1));

  Rng rng2 = make_rng(5, 0, 0);
  const Measurement z2 = simulate_measurement(m, s, rng2);
  CHECK((z.array() == z2.array()).all());
}

TEST_CASE("log-likelihood of a single unit-noise cell at its prediction") {
  SensorSettings s;
  s.range_psf_const = 100.0;
  s.bearing_psf_const = 0.01;
  s.range_res = 80.0;
  s.range_min = 100.0;
  s.range_max = 180.0;
  s.bearing_res = 0.8;
  s.bearing_min = -0.4;
  s.bearing_max = 0.4;
  s.sigma_w = 1.0;
  s.snr_db = 0.0;  // amplitude 1
  const SensorModel m = make_sensor_model(s);
  REQUIRE(m.cell_count == 1);

  const StateVector at = state_at_polar(140.0, 0.0);
  const Measurement z = predicted_image(m, at);
  // One cell, zero residual: -log sqrt(2 pi).
  CHECK(log_likelihood(m, z, at) == doctest::Approx(-0.9189385332046727).epsilon(1e-15));
}

TEST_CASE("log-likelihood agrees with the extended-precision product of densities") {
  const SensorModel m = tiny_sensor();
  const StateVector truth = state_at_polar(138.0, 0.05);
  Rng rng = make_rng(11, 0, 0);
  const Measurement z = simulate_measurement(m, truth, rng);

  for (const auto& at : {truth, state_at_polar(150.0, -0.2), state_at_polar(115.0, 0.3)}) {
    const double got = log_likelihood(m, z, at);
    const double want = oracles::brute_force_log_likelihood(m, z, at);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }

  Measurement wrong(m.cell_count + 1);
  wrong.setZero();
  CHECK_THROWS_AS(log_likelihood(m, wrong, truth), std::invalid_argument);
}

TEST_CASE("likelihood prefers the generating state at high SNR") {
  const SensorModel m = stock_sensor();
  const StateVector truth = state_at_polar(24000.0, 0.0, 0.0, 50.0);
  Rng rng = make_rng(17, 0, 0);
  const Measurement z = simulate_measurement(m, truth, rng);

  const double at_truth = log_likelihood(m, z, truth);
  CHECK(std::isfinite(at_truth));
  for (const double off : {1.0, 10.0, 200.0}) {
    StateVector other = truth;
    other[kPosX] += off;
    const double away = log_likelihood(m, z, other);
    CHECK(std::isfinite(away));
    CHECK(at_truth > away);
  }
}

TEST_CASE("gradient vanishes identically when the measurement equals the prediction") {
  const SensorModel m = stock_sensor();
  const StateVector at = state_at_polar(23750.0, 0.0125);
  const Measurement z = predicted_image(m, at);
  const StateVector g = log_likelihood_gradient(m, z, at);
  for (int c = 0; c < kStateDim; ++c) {
    CHECK(g[c] == 0.0);
  }
}

TEST_CASE("gradient matches central differences on the stock grid") {
  const SensorModel m = stock_sensor();
  const StateVector truth = state_at_polar(24000.0, 0.0, 0.0, 50.0);
  Rng rng = make_rng(23, 0, 0);
  const Measurement z = simulate_measurement(m, truth, rng);

  StateVector at = truth;
  at[kPosX] += 40.0;
  at[kPosY] += 25.0;
  const StateVector g = log_likelihood_gradient(m, z, at);
  CHECK(g[kVelX] == 0.0);
  CHECK(g[kVelY] == 0.0);

  const auto f = [&](const StateVector& x) { return log_likelihood(m, z, x); };
  for (const int c : {kPosX, kPosY}) {
    const double fd = oracles::central_difference(f, at, c, 1e-3);
    CHECK(g[c] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("gradient matches the closed form on a single cell") {
  SensorSettings s;
  s.range_psf_const = 225.0;
  s.bearing_psf_const = 0.0225;
  s.range_res = 60.0;
  s.range_min = 110.0;
  s.range_max = 170.0;
  s.bearing_res = 0.6;
  s.bearing_min = -0.3;
  s.bearing_max = 0.3;
  s.sigma_w = 0.5;
  s.snr_db = 12.0;
  const SensorModel m = make_sensor_model(s);
  REQUIRE(m.cell_count == 1);

  const StateVector at = state_at_polar(131.0, 0.08, 3.0, -2.0);
  Measurement z(1);
  z[0] = 1.7;

  // Hand derivation in extended precision: with h the PSF and A the
  // amplitude, d loglik / dx = (z - A h) A h ((r_c - r)/Rc * x/r +
  // (b_c - b)/Bc * (-y/r^2)) / sigma^2, and the y form mirrors it.
  const long double x = at[kPosX];
  const long double y = at[kPosY];
  const long double r = std::hypot(static_cast<long double>(x), static_cast<long double>(y));
  const long double b = std::atan2(static_cast<long double>(y), static_cast<long double>(x));
  const long double dr = m.cell_range(0) - r;
  const long double db = m.cell_bearing(0) - b;
  const long double h =
      std::exp(-dr * dr / (2.0L * m.range_psf_const)) * std::exp(-db * db / (2.0L * m.bearing_psf_const));
  const long double resid = z[0] - m.amplitude * h;
  const long double common = resid * m.amplitude * h / (m.sigma_w * m.sigma_w);
  const long double gx =
      common * (dr / m.range_psf_const * (x / r) + db / m.bearing_psf_const * (-y / (r * r)));
  const long double gy =
      common * (dr / m.range_psf_const * (y / r) + db / m.bearing_psf_const * (x / (r * r)));

  const StateVector g = log_likelihood_gradient(m, z, at);
  CHECK(g[kPosX] == doctest::Approx(static_cast<double>(gx)).epsilon(1e-12));
  CHECK(g[kPosY] == doctest::Approx(static_cast<double>(gy)).epsilon(1e-12));
}

TEST_CASE("fisher matrix structure: symmetric, positive semidefinite, position-only") {
  const SensorModel m = stock_sensor();
  const StateVector at = state_at_polar(24000.0, 0.05);
  const Matrix4 f = likelihood_fisher(m, at);

  for (int a = 0; a < kStateDim; ++a) {
    for (int b = 0; b < kStateDim; ++b) {
      CHECK(f(a, b) == f(b, a));
      if (a == kVelX || a == kVelY || b == kVelX || b == kVelY) {
        CHECK(f(a, b) == 0.0);
      }
    }
  }
  const Eigen::SelfAdjointEigenSolver<Matrix4> eig(f);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-9 * f.norm());
  // The position block carries real information at this SNR.
  CHECK(f(kPosX, kPosX) > 0.0);
  CHECK(f(kPosY, kPosY) > 0.0);
}

TEST_CASE("fisher matrix equals the Monte-Carlo mean of score outer products") {
  const SensorModel m = tiny_sensor();
  const StateVector at = state_at_polar(138.0, 0.05);
  const Matrix4 fisher = likelihood_fisher(m, at);

  Rng rng = make_rng(29, 0, 0);
  const int n = 40000;
  Matrix4 acc = Matrix4::Zero();
  for (int i = 0; i < n; ++i) {
    const Measurement z = simulate_measurement(m, at, rng);
    const StateVector g = log_likelihood_gradient(m, z, at);
    acc += g * g.transpose();
  }
  acc /= static_cast<double>(n);
  CHECK((acc - fisher).norm() / fisher.norm() < 0.05);
}

TEST_CASE("fisher matrix scales exactly as noise power") {
  const SensorModel m = tiny_sensor();
  SensorModel louder = m;
  louder.sigma_w = 2.0 * m.sigma_w;  // same amplitude, hence 4x less information

  const StateVector at = state_at_polar(152.0, -0.11);
  const Matrix4 f1 = likelihood_fisher(m, at);
  const Matrix4 f2 = likelihood_fisher(louder, at);
  for (int a = 0; a < kStateDim; ++a) {
    for (int b = 0; b < kStateDim; ++b) {
      CHECK(f2(a, b) == 0.25 * f1(a, b));
    }
  }
}

TEST_CASE("far outside the window the image carries no information") {
  const SensorModel m = stock_sensor();
  const StateVector far = state_at_polar(90000.0, 0.0);
  CHECK(likelihood_fisher(m, far).norm() == 0.0);
  CHECK(predicted_image(m, far).maxCoeff() == 0.0);
}

TEST_CASE("gating changes likelihood, gradient and fisher only negligibly") {
  const SensorModel plain = tiny_sensor(0.01, 0.0);
  const SensorModel gated = tiny_sensor(0.01, 1e-12);
  REQUIRE(gated.gate_threshold == 1e-12);

  const StateVector truth = state_at_polar(138.0, 0.05);
  Rng rng = make_rng(31, 0, 0);
  const Measurement z = simulate_measurement(plain, truth, rng);

  StateVector at = truth;
  at[kPosX] += 10.0;
  at[kPosY] += 5.0;

  const double l0 = log_likelihood(plain, z, at);
  const double l1 = log_likelihood(gated, z, at);
  CHECK(std::abs(l1 - l0) <= 1e-9 * std::abs(l0));

  const StateVector g0 = log_likelihood_gradient(plain, z, at);
  const StateVector g1 = log_likelihood_gradient(gated, z, at);
  CHECK((g1 - g0).norm() <= 1e-9 * g0.norm());

  const Matrix4 f0 = likelihood_fisher(plain, at);
  const Matrix4 f1m = likelihood_fisher(gated, at);
  CHECK((f1m - f0).norm() <= 1e-9 * f0.norm());
}

TEST_CASE("frame CSV round-trips cell coordinates and is byte-stable") {
  const SensorModel m = tiny_sensor();
  const StateVector s = state_at_polar(138.0, 0.05);
  Rng rng = make_rng(37, 0, 0);
  const Measurement z = simulate_measurement(m, s, rng);

  std::ostringstream a;
  write_frame_csv(a, m, z);
  std::ostringstream b;
  write_frame_csv(b, m, z);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "r,b,z");
  std::string first;
  std::getline(in, first);
  std::istringstream row(first);
  std::string rs, bs, zs;
  std::getline(row, rs, ',');
  std::getline(row, bs, ',');
  std::getline(row, zs, ',');
  CHECK(std::stod(rs) == m.cell_range(0));
  CHECK(std::stod(bs) == m.cell_bearing(0));
  CHECK(std::stod(zs) == z[0]);
  int rows = 1;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      ++rows;
    }
  }
  CHECK(rows == m.cell_count);
}
