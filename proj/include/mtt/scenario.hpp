#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mtt/types.hpp"

namespace mtt {

/// Knobs for the reconstructed track geometry shared by the three scenarios.
struct ScenarioGeometry {
  int steps = 300;
  double x_speed = 4.0;        // m/s along the x axis
  double y_far = 105.0;        // outer |y| in scenario 1, m
  double y_near = 5.0;         // close-approach |y| (half the min distance), m
  double diverge_rate = 2.0;   // |vy| in scenarios 2 and 3, m/s
};

/// Deterministic two-target ground truth, y-symmetric about the x axis.
/// truth[target][k] for k = 0..steps; both targets are alive throughout.
struct ScenarioDefinition {
  int id = 0;
  int steps = 0;
  Rect roi;
  std::array<std::vector<StateVec>, 2> truth;

  std::array<MeasVec, 2> positions(int k) const {
    return {truth[0][k].head<2>(), truth[1][k].head<2>()};
  }
};

/// The three benchmark scenarios:
///  1: parallel approach to |y| = y_near, hold, then split again
///  2: parallel at |y| = y_near, diverging after the midpoint
///  3: straight crossing tracks meeting at the midpoint
/// Throws std::invalid_argument for an unknown id.
ScenarioDefinition generate_scenario(int id, const ScenarioGeometry& geom = {});

/// Simulates scans k = 1..steps: per-target Bernoulli(p_d) detections with
/// Gaussian position noise plus Poisson(mu_c) uniform clutter, in randomly
/// permuted order. Deterministic in (scenario, sensor, seed).
std::vector<Scan> simulate_measurements(const ScenarioDefinition& sc,
                                        const SensorModel& sm,
                                        std::uint64_t seed);

}  // namespace mtt
