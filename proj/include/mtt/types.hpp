#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <variant>
#include <vector>

namespace mtt {

// Kinematic state layout: [x1 x2 v1 v2]^T — 2D position (m) and velocity (m/s).
using StateVec = Eigen::Vector4d;
using StateCov = Eigen::Matrix4d;

// Position measurement [z1 z2]^T in meters.
using MeasVec = Eigen::Vector2d;

/// Gaussian kinematic belief in moment form.
struct GaussianBelief {
  StateVec mean = StateVec::Zero();
  StateCov cov = StateCov::Zero();
};

/// Weighted particle cloud; particle states are the columns of a 4xJ matrix.
struct ParticleBelief {
  Eigen::Matrix4Xd states;
  Eigen::VectorXd weights;

  int count() const { return static_cast<int>(states.cols()); }

  /// Rescales weights to sum to one. Returns the pre-normalization total.
  double normalize();

  /// Weighted mean state.
  StateVec mean() const { return states * weights; }
};

enum class PtKind { kLegacy, kNew };

/// A potential target: kinematic belief plus existence probability.
/// Nonexistence is carried by (1 - existence); the dummy pdf for the
/// nonexistent state is never materialized.
struct PotentialTarget {
  int id = 0;
  std::variant<GaussianBelief, ParticleBelief> belief;
  double existence = 0.0;
  PtKind kind = PtKind::kLegacy;
};

/// One sensor scan: fixed measurement list at time index k >= 1.
struct Scan {
  int k = 0;
  std::vector<MeasVec> measurements;

  int size() const { return static_cast<int>(measurements.size()); }
};

/// Axis-aligned rectangle, used as the region of interest.
struct Rect {
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool contains(const MeasVec& z) const {
    return z.x() >= x_min && z.x() <= x_max && z.y() >= y_min && z.y() <= y_max;
  }
};

/// Near constant-velocity motion model with survival probability.
struct MotionModel {
  double T = 1.0;
  double sigma_u2 = 0.1;
  double p_s = 0.995;
  StateCov A = StateCov::Identity();
  StateCov Sigma_u = StateCov::Zero();
  StateCov noise_chol = StateCov::Zero();  // lower Cholesky factor of Sigma_u
};

/// Position sensor with Poisson clutter and Poisson birth, both uniform on
/// the ROI.
struct SensorModel {
  double p_d = 0.9;
  double sigma_v = 10.0;
  double mu_c = 10.0;
  double mu_b = 0.01;
  Rect roi;
  Eigen::Matrix<double, 2, 4> H = (Eigen::Matrix<double, 2, 4>() << 1, 0, 0, 0,
                                   0, 1, 0, 0)
                                      .finished();

  /// Uniform clutter pdf, truncated at the ROI.
  double clutter_pdf(const MeasVec& z) const {
    return roi.contains(z) ? 1.0 / roi.area() : 0.0;
  }

  /// Uniform birth pdf over position, truncated at the ROI.
  double birth_pdf(const MeasVec& position) const {
    return roi.contains(position) ? 1.0 / roi.area() : 0.0;
  }

  /// Clutter intensity mu_c * f_c used as the reference density in all
  /// likelihood ratios. Floored so that ratios stay finite when mu_c = 0.
  double clutter_intensity() const {
    return std::max(mu_c, 1e-12) / roi.area();
  }
};

/// Target-oriented data association vector: a[j] = m in 1..m_k if legacy PT j
/// originated measurement m, 0 if it originated none.
struct DaVectorTarget {
  std::vector<int> a;

  /// Valid iff entries are in range and nonzero entries are pairwise distinct.
  bool valid(int m_k) const;
};

/// Measurement-oriented data association vector: b[m] = j in 1..j_prev if
/// measurement m came from legacy PT j, 0 for clutter or a new PT.
struct DaVectorMeasurement {
  std::vector<int> b;

  bool valid(int j_prev) const;
};

/// A labeled point estimate emitted by a tracker.
struct Estimate {
  int id = 0;
  StateVec state = StateVec::Zero();
};

}  // namespace mtt
