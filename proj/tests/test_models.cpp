#include <doctest.h>

#include <cmath>

#include "mtt/models.hpp"
#include "mtt/rng.hpp"

using namespace mtt;

namespace {

SensorModel test_sensor(double p_d = 0.9, double sigma_v = 10.0,
                        double mu_c = 10.0, double mu_b = 0.01) {
  SensorModel sm;
  sm.p_d = p_d;
  sm.sigma_v = sigma_v;
  sm.mu_c = mu_c;
  sm.mu_b = mu_b;
  sm.roi = Rect{-750, 750, -750, 750};
  return sm;
}

}  // namespace

TEST_CASE("build_motion_model matches the discretized kinematics") {
  const MotionModel mm = build_motion_model(1.0, 0.1, 0.995);
  CHECK(mm.A(0, 2) == doctest::Approx(1.0));
  CHECK(mm.A(1, 3) == doctest::Approx(1.0));
  CHECK(mm.A(0, 0) == 1.0);
  CHECK(mm.Sigma_u(0, 0) == doctest::Approx(0.1 / 3.0));
  CHECK(mm.Sigma_u(2, 2) == doctest::Approx(0.1));
  CHECK(mm.Sigma_u(0, 2) == doctest::Approx(0.05));

  const MotionModel zero = build_motion_model(1.0, 0.0, 1.0);
  CHECK(zero.Sigma_u.isZero());

  const MotionModel big = build_motion_model(2.0, 0.3, 0.9);
  CHECK(big.Sigma_u(0, 0) == doctest::Approx(0.8));
  CHECK(big.Sigma_u(0, 2) == doctest::Approx(0.6));

  CHECK_THROWS_AS(build_motion_model(0.0, 0.1, 0.995), std::invalid_argument);
  CHECK_THROWS_AS(build_motion_model(1.0, -0.1, 0.995), std::invalid_argument);
  CHECK_THROWS_AS(build_motion_model(1.0, 0.1, 1.2), std::invalid_argument);
}

TEST_CASE("predict_moments propagates mean and covariance") {
  const MotionModel mm = build_motion_model(1.0, 0.0, 1.0);
  GaussianBelief b;
  b.mean << 0, 0, 1, 0;
  GaussianBelief p = predict_moments(b, mm);
  CHECK(p.mean(0) == doctest::Approx(1.0));
  CHECK(p.mean(2) == doctest::Approx(1.0));
  CHECK(p.cov.isZero());

  b.mean.setZero();
  b.cov = StateCov::Identity();
  p = predict_moments(b, mm);
  CHECK(p.cov(0, 0) == doctest::Approx(2.0));

  const MotionModel noisy = build_motion_model(1.0, 0.1, 1.0);
  b.cov = StateCov::Identity() * 3.0;
  p = predict_moments(b, noisy);
  CHECK(p.cov(2, 2) == doctest::Approx(3.0 + 0.1));
}

TEST_CASE("predict_moments keeps covariances symmetric PSD") {
  RandomEngine eng(7);
  const MotionModel mm = build_motion_model(1.0, 0.1, 0.995);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd m(4, 4);
    fill_standard_normal(m, eng);
    GaussianBelief b;
    b.cov = m * m.transpose();  // PSD by construction
    Eigen::MatrixXd mean(4, 1);
    fill_standard_normal(mean, eng);
    b.mean = mean;
    const GaussianBelief p = predict_moments(b, mm);
    CHECK((p.cov - p.cov.transpose()).norm() == 0.0);
    const Eigen::SelfAdjointEigenSolver<StateCov> es(p.cov);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("sample_transition is deterministic without noise") {
  const MotionModel mm = build_motion_model(1.0, 0.0, 1.0);
  RandomEngine eng(1);
  StateVec x;
  x << 3, -2, 1, 4;
  CHECK((sample_transition(x, mm, eng) - mm.A * x).norm() == 0.0);
}

TEST_CASE("sample_transition matches the model moments") {
  const MotionModel mm = build_motion_model(1.0, 0.1, 0.995);
  RandomEngine eng(42);
  StateVec x;
  x << 10, -5, 2, 1;
  const int n = 100000;
  StateVec sum = StateVec::Zero();
  StateCov outer = StateCov::Zero();
  for (int i = 0; i < n; ++i) {
    const StateVec s = sample_transition(x, mm, eng);
    sum += s;
    const StateVec d = s - mm.A * x;
    outer += d * d.transpose();
  }
  const StateVec mean = sum / n;
  const StateCov cov = outer / n;
  for (int i = 0; i < 4; ++i) {
    const double se = std::sqrt(mm.Sigma_u(i, i) / n);
    CHECK(std::abs(mean(i) - (mm.A * x)(i)) < 4.0 * se);
    CHECK(cov(i, i) == doctest::Approx(mm.Sigma_u(i, i)).epsilon(0.10));
  }
  CHECK(cov(0, 2) == doctest::Approx(mm.Sigma_u(0, 2)).epsilon(0.10));
}

TEST_CASE("batch and scalar normal fills consume the engine identically") {
  RandomEngine a(123), b(123);
  Eigen::MatrixXd batch(4, 3);
  fill_standard_normal(batch, a);
  for (int c = 0; c < 3; ++c) {
    Eigen::MatrixXd col(4, 1);
    fill_standard_normal(col, b);
    CHECK((batch.col(c) - col.col(0)).norm() == 0.0);
  }
  // Both engines sit at the same stream position afterwards.
  CHECK(a() == b());
}

TEST_CASE("measurement_likelihood is the 2D Gaussian density") {
  const SensorModel sm = test_sensor();
  StateVec x;
  x << 100, -40, 1, 1;
  const MeasVec at = sm.H * x;
  CHECK(measurement_likelihood(at, x, sm) ==
        doctest::Approx(1.0 / (2.0 * M_PI * 100.0)).epsilon(1e-12));
  CHECK(measurement_likelihood(at + MeasVec(10, 0), x, sm) ==
        doctest::Approx(std::exp(-0.5) / (2.0 * M_PI * 100.0)).epsilon(1e-12));
  CHECK(measurement_likelihood(at + MeasVec(1e6, 0), x, sm) == 0.0);
}

TEST_CASE("measurement_likelihood integrates to one") {
  const SensorModel sm = test_sensor();
  StateVec x;
  x << 12.3, -4.5, 0, 0;
  const double span = 6.0 * sm.sigma_v;
  const int n = 400;
  const double h = 2.0 * span / n;
  double mass = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const MeasVec z(x(0) - span + (i + 0.5) * h, x(1) - span + (j + 0.5) * h);
      mass += measurement_likelihood(z, x, sm) * h * h;
    }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("legacy PT factor q") {
  const SensorModel sm = test_sensor();
  Scan scan;
  scan.k = 1;
  scan.measurements = {MeasVec(0, 0), MeasVec(50, 50)};
  StateVec x = StateVec::Zero();

  CHECK(legacy_factor_q(x, 0, 0, scan, sm) == 1.0);
  CHECK(legacy_factor_q(x, 0, 1, scan, sm) == 0.0);
  CHECK(legacy_factor_q(x, 1, 0, scan, sm) == doctest::Approx(0.1));
  CHECK(legacy_factor_q(x, 1, 1, scan, sm) ==
        doctest::Approx(sm.p_d *
                        measurement_likelihood(scan.measurements[0], x, sm) /
                        sm.clutter_intensity()));
  CHECK_THROWS_AS(legacy_factor_q(x, 1, 3, scan, sm), std::invalid_argument);
}

TEST_CASE("new PT factor v") {
  const SensorModel sm = test_sensor();
  StateVec x;
  x << 5, 5, 0, 0;
  const MeasVec z(6, 4);
  CHECK(new_pt_factor_v(x, 1, 3, z, 5, sm) == 0.0);
  CHECK(new_pt_factor_v(x, 0, 2, z, 5, sm) == 1.0);
  // Uniform birth and clutter densities on the same ROI cancel.
  CHECK(new_pt_factor_v(x, 1, 0, z, 5, sm) ==
        doctest::Approx(sm.p_d * sm.mu_b * measurement_likelihood(z, x, sm) /
                        sm.mu_c));
  CHECK_THROWS_AS(new_pt_factor_v(x, 1, 6, z, 5, sm), std::invalid_argument);
}

TEST_CASE("q and v are nonnegative") {
  const SensorModel sm = test_sensor();
  RandomEngine eng(5);
  Scan scan;
  scan.k = 1;
  scan.measurements = {MeasVec(3, 3), MeasVec(-20, 14)};
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd xm(4, 1);
    fill_standard_normal(xm, eng);
    const StateVec x = 100.0 * xm.col(0);
    const int r = static_cast<int>(eng() % 2);
    CHECK(legacy_factor_q(x, r, static_cast<int>(eng() % 3), scan, sm) >= 0.0);
    CHECK(new_pt_factor_v(x, r, static_cast<int>(eng() % 4),
                          scan.measurements[0], 3, sm) >= 0.0);
  }
}

TEST_CASE("consistency indicator") {
  CHECK(consistency_indicator(2, 1, 1, 2) == 1);  // a_j = m and b_m = j
  CHECK(consistency_indicator(2, 0, 1, 2) == 0);  // a claims, b denies
  CHECK(consistency_indicator(1, 1, 1, 2) == 0);  // b claims, a elsewhere
  CHECK(consistency_indicator(0, 0, 1, 2) == 1);  // neither claims
}

TEST_CASE("target- and measurement-oriented DA vectors are in bijection") {
  // For every valid a there is exactly one valid b with all-ones indicator,
  // and conversely, for all sizes up to 3 x 3.
  for (int J = 1; J <= 3; ++J) {
    for (int M = 1; M <= 3; ++M) {
      std::vector<DaVectorTarget> as;
      std::vector<int> a(J, 0);
      for (;;) {
        DaVectorTarget cand{a};
        if (cand.valid(M)) as.push_back(cand);
        int j = 0;
        while (j < J && ++a[j] > M) a[j++] = 0;
        if (j == J) break;
      }
      std::vector<DaVectorMeasurement> bs;
      std::vector<int> b(M, 0);
      for (;;) {
        DaVectorMeasurement cand{b};
        if (cand.valid(J)) bs.push_back(cand);
        int m = 0;
        while (m < M && ++b[m] > J) b[m++] = 0;
        if (m == M) break;
      }
      CHECK(as.size() == bs.size());
      for (const DaVectorTarget& av : as) {
        int compatible = 0;
        for (const DaVectorMeasurement& bv : bs) {
          bool all_ones = true;
          for (int j = 0; j < J && all_ones; ++j)
            for (int m = 0; m < M && all_ones; ++m)
              all_ones = consistency_indicator(av.a[j], bv.b[m], j + 1, m + 1);
          compatible += all_ones;
        }
        CHECK(compatible == 1);
      }
    }
  }
}

TEST_CASE("kalman_update agrees with the textbook formulas") {
  const SensorModel sm = test_sensor();
  GaussianBelief b;
  b.mean << 0, 0, 1, 1;
  b.cov = StateCov::Identity() * 25.0;
  const MeasVec z(4, -2);
  const GaussianBelief u = kalman_update(b, z, sm);
  // S = 125 I, K = 25/125 = 0.2 on the position rows.
  CHECK(u.mean(0) == doctest::Approx(0.2 * 4.0));
  CHECK(u.mean(1) == doctest::Approx(0.2 * -2.0));
  CHECK(u.cov(0, 0) == doctest::Approx(25.0 - 25.0 * 25.0 / 125.0));
  CHECK(u.cov(2, 2) == doctest::Approx(25.0));
}
