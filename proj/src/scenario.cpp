#include "mtt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mtt/rng.hpp"

namespace mtt {

namespace {

constexpr std::uint64_t kScanStream = 0x7363616e73;

std::vector<StateVec> with_velocities(const std::vector<double>& xs,
                                      const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  std::vector<StateVec> track(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k1 = std::min(k + 1, n - 1);
    const std::size_t k0 = k1 == k ? k - 1 : k;
    track[k] << xs[k], ys[k], xs[k1] - xs[k0], ys[k1] - ys[k0];
  }
  return track;
}

}  // namespace

ScenarioDefinition generate_scenario(int id, const ScenarioGeometry& geom) {
  if (id < 1 || id > 3)
    throw std::invalid_argument("generate_scenario: id must be 1, 2 or 3");
  const int n = geom.steps;
  ScenarioDefinition sc;
  sc.id = id;
  sc.steps = n;
  sc.roi = id == 2 ? Rect{0.0, 1500.0, -750.0, 750.0}
                   : Rect{-750.0, 750.0, -750.0, 750.0};

  std::vector<double> xs(n + 1), ys(n + 1);
  if (id == 1) {
    // Approach from |y| = y_far to y_near over the first third, hold through
    // the second third, split back out over the last.
    const int t1 = n / 3, t2 = 2 * n / 3;
    const double rate = (geom.y_far - geom.y_near) / t1;
    for (int k = 0; k <= n; ++k) {
      xs[k] = -0.5 * geom.x_speed * n + geom.x_speed * k;
      if (k <= t1)
        ys[k] = geom.y_far - rate * k;
      else if (k <= t2)
        ys[k] = geom.y_near;
      else
        ys[k] = geom.y_near + rate * (k - t2);
    }
  } else if (id == 2) {
    // Parallel at y_near, then diverging at diverge_rate; the first step
    // after the corner moves at half rate to keep the implied acceleration
    // within the near constant-velocity assumption.
    const int h = n / 2;
    for (int k = 0; k <= n; ++k) {
      xs[k] = 50.0 + geom.x_speed * k;
      if (k <= h)
        ys[k] = geom.y_near;
      else
        ys[k] = geom.y_near + 0.5 * geom.diverge_rate +
                geom.diverge_rate * (k - h - 1);
    }
  } else {
    // Straight crossing tracks, meeting at the midpoint.
    for (int k = 0; k <= n; ++k) {
      xs[k] = -0.5 * geom.x_speed * n + geom.x_speed * k;
      ys[k] = geom.diverge_rate * (k - n / 2);
    }
  }

  sc.truth[0] = with_velocities(xs, ys);
  std::vector<double> ys_mirror(n + 1);
  for (int k = 0; k <= n; ++k) ys_mirror[k] = -ys[k];
  sc.truth[1] = with_velocities(xs, ys_mirror);
  return sc;
}

std::vector<Scan> simulate_measurements(const ScenarioDefinition& sc,
                                        const SensorModel& sm,
                                        std::uint64_t seed) {
  std::vector<Scan> scans;
  scans.reserve(sc.steps);
  for (int k = 1; k <= sc.steps; ++k) {
    RandomEngine eng = make_engine(seed, kScanStream, std::uint64_t(k));
    Scan scan;
    scan.k = k;
    for (const auto& track : sc.truth) {
      if (uniform_open(eng) > sm.p_d) continue;
      MeasVec noise;
      fill_standard_normal(noise, eng);
      scan.measurements.push_back(track[k].head<2>() + sm.sigma_v * noise);
    }
    if (sm.mu_c > 0) {
      std::poisson_distribution<int> n_clutter(sm.mu_c);
      const int n = n_clutter(eng);
      for (int c = 0; c < n; ++c) {
        const double x =
            sc.roi.x_min + uniform_open(eng) * (sc.roi.x_max - sc.roi.x_min);
        const double y =
            sc.roi.y_min + uniform_open(eng) * (sc.roi.y_max - sc.roi.y_min);
        scan.measurements.push_back(MeasVec(x, y));
      }
    }
    std::shuffle(scan.measurements.begin(), scan.measurements.end(), eng);
    scans.push_back(std::move(scan));
  }
  return scans;
}

}  // namespace mtt
