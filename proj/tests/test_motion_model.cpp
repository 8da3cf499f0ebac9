#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rltbd/gaussian.hpp"
#include "rltbd/motion_model.hpp"
#include "support/oracles.hpp"

using namespace rltbd;

TEST_CASE("transition matrix advances position by dt times velocity") {
  const NcvModel m = build_ncv(1.0, 0.1, 0.1);
  CHECK(m.A(kPosX, kPosX) == 1.0);
  CHECK(m.A(kPosX, kVelX) == 1.0);
  CHECK(m.A(kVelX, kVelX) == 1.0);
  CHECK(m.A(kVelX, kPosX) == 0.0);
  CHECK(m.A(kPosY, kPosY) == 1.0);
  CHECK(m.A(kPosY, kVelY) == 1.0);

  // No coupling between the x and y axes anywhere.
  for (const int a : {kPosX, kVelX}) {
    for (const int b : {kPosY, kVelY}) {
      CHECK(m.A(a, b) == 0.0);
      CHECK(m.A(b, a) == 0.0);
      CHECK(m.Q(a, b) == 0.0);
      CHECK(m.Q(b, a) == 0.0);
    }
  }

  const NcvModel m2 = build_ncv(2.0, 1.0, 1.0);
  CHECK(m2.A(kPosX, kVelX) == 2.0);
  CHECK(m2.A(kPosY, kVelY) == 2.0);
}

TEST_CASE("process noise blocks match the white-noise-acceleration closed form") {
  // Hand-expanded per-axis block: sigma^2 * [[dt^3/3, dt^2/2], [dt^2/2, dt]].
  const NcvModel m = build_ncv(1.0, 0.1, 0.1);
  CHECK(m.Q(kPosX, kPosX) == doctest::Approx(0.0033333333333333335).epsilon(1e-15));
  CHECK(m.Q(kPosX, kVelX) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(m.Q(kVelX, kPosX) == m.Q(kPosX, kVelX));
  CHECK(m.Q(kVelX, kVelX) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(m.Q(kPosY, kPosY) == m.Q(kPosX, kPosX));
  CHECK(m.Q(kPosY, kVelY) == m.Q(kPosX, kVelX));
  CHECK(m.Q(kVelY, kVelY) == m.Q(kVelX, kVelX));

  const NcvModel m2 = build_ncv(2.0, 1.0, 1.0);
  CHECK(m2.Q(kPosX, kPosX) == doctest::Approx(2.6666666666666665).epsilon(1e-15));
  CHECK(m2.Q(kPosX, kVelX) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m2.Q(kVelX, kVelX) == doctest::Approx(2.0).epsilon(1e-15));

  // Distinct per-axis intensities scale their own block only.
  const NcvModel m3 = build_ncv(0.5, 0.2, 0.4);
  const double dt3 = 0.5 * 0.5 * 0.5 / 3.0;
  CHECK(m3.Q(kPosX, kPosX) == (0.2 * 0.2) * dt3);
  CHECK(m3.Q(kPosY, kPosY) == (0.4 * 0.4) * dt3);
}

TEST_CASE("stored inverse, log-determinant and factor agree with dense routes") {
  const NcvModel m = build_ncv(1.0, 0.1, 0.1);

  CHECK(((m.Q_inv * m.Q) - Matrix4::Identity()).norm() < 1e-10);
  CHECK((m.Q_chol * m.Q_chol.transpose() - m.Q).norm() < 1e-15);

  // Determinant of one axis block is sigma^4 dt^4 / 12; the log-determinant
  // doubles for the two independent axes.
  const double block_det = std::pow(0.1, 4.0) / 12.0;
  CHECK(m.Q_logdet == doctest::Approx(2.0 * std::log(block_det)).epsilon(1e-12));
  CHECK(m.Q_logdet == doctest::Approx(std::log(m.Q.determinant())).epsilon(1e-9));
}

TEST_CASE("transition mean and density agree with the dense oracle") {
  const NcvModel m = build_ncv(1.0, 0.1, 0.1);
  const StateVector prev(100.0, -3.0, 250.0, 4.0);

  const StateVector mean = transition_mean(m, prev);
  CHECK(mean[kPosX] == doctest::Approx(100.0 - 3.0).epsilon(1e-15));
  CHECK(mean[kVelX] == -3.0);
  CHECK(mean[kPosY] == doctest::Approx(254.0).epsilon(1e-15));
  CHECK(mean[kVelY] == 4.0);

  // At the mean the quadratic form vanishes identically.
  CHECK(transition_logpdf(m, mean, prev) == -0.5 * (4.0 * kLog2Pi + m.Q_logdet));

  const StateVector next(97.2, -2.9, 254.3, 4.1);
  const double dense = oracles::dense_mvn_logpdf(next, mean, m.Q);
  CHECK(transition_logpdf(m, next, prev) == doctest::Approx(dense).epsilon(1e-9));
}

TEST_CASE("transition log-density gradient matches finite differences") {
  const NcvModel m = build_ncv(1.0, 0.1, 0.1);
  const StateVector prev(10.0, 1.0, -20.0, 2.0);
  const StateVector next(11.2, 1.1, -18.3, 1.9);

  const StateVector g = transition_loggrad(m, next, prev);
  const auto f = [&](const StateVector& x) { return transition_logpdf(m, x, prev); };
  for (int c = 0; c < kStateDim; ++c) {
    // The density is Gaussian in `next`, so central differences carry no
    // truncation error at all; only round-off remains.
    const double fd = oracles::central_difference(f, next, c, 1e-4);
    CHECK(g[c] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("sampled transitions reproduce the density's own moments") {
  const NcvModel m = build_ncv(1.0, 0.1, 0.1);
  const StateVector prev(50.0, 2.0, -30.0, -1.0);
  const StateVector mean = transition_mean(m, prev);

  Rng rng = make_rng(123, 0, 0);
  const int n = 200000;
  std::vector<StateVector> xs(n);
  double logpdf_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    xs[i] = transition_sample(m, prev, rng);
    logpdf_sum += transition_logpdf(m, xs[i], prev);
  }

  const Eigen::Vector4d sm = oracles::sample_mean(xs);
  for (int c = 0; c < kStateDim; ++c) {
    const double se = std::sqrt(m.Q(c, c) / n);
    CHECK(std::abs(sm[c] - mean[c]) < 4.0 * se);
  }
  CHECK((oracles::sample_cov(xs) - m.Q).norm() / m.Q.norm() < 0.05);

  // Cross-route consistency: samples come from the Cholesky factor, the
  // density from the inverse. E[log p] = -(4 log 2pi + logdet + 4) / 2, and
  // the quadratic form is chi-squared with 4 dof, so Var(log p) = 2.
  const double expected = -0.5 * (4.0 * kLog2Pi + m.Q_logdet + 4.0);
  const double se_logpdf = std::sqrt(2.0 / n);
  CHECK(std::abs(logpdf_sum / n - expected) < 4.0 * se_logpdf);
}

TEST_CASE("same seed gives identical draws, different seeds do not") {
  const NcvModel m = build_ncv(1.0, 0.1, 0.1);
  const StateVector prev(1.0, 2.0, 3.0, 4.0);

  Rng a = make_rng(99, 4, 2);
  Rng b = make_rng(99, 4, 2);
  Rng c = make_rng(99, 4, 3);
  const StateVector xa = transition_sample(m, prev, a);
  const StateVector xb = transition_sample(m, prev, b);
  const StateVector xc = transition_sample(m, prev, c);
  CHECK((xa.array() == xb.array()).all());
  CHECK_FALSE((xa.array() == xc.array()).all());
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(build_ncv(0.0, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_ncv(-1.0, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_ncv(1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_ncv(1.0, 0.1, -0.2), std::invalid_argument);
}
