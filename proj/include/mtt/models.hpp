#pragma once

#include "mtt/rng.hpp"
#include "mtt/types.hpp"

namespace mtt {

/// Discretized continuous-time kinematics: block-identity transition with T
/// on the position/velocity couplings and process noise blocks
/// T^3/3, T^2/2, T scaled by sigma_u2. Throws std::invalid_argument for
/// nonpositive T, negative sigma_u2 or p_s outside (0, 1].
MotionModel build_motion_model(double T, double sigma_u2, double p_s);

/// Moment prediction: mean' = A mean, cov' = A cov A^T + Sigma_u,
/// symmetrized.
GaussianBelief predict_moments(const GaussianBelief& b, const MotionModel& mm);

/// Draws A x + u with u ~ N(0, Sigma_u).
StateVec sample_transition(const StateVec& x, const MotionModel& mm,
                           RandomEngine& eng);

/// N(z; H x, sigma_v^2 I2).
double measurement_likelihood(const MeasVec& z, const StateVec& x,
                              const SensorModel& sm);

/// Legacy PT factor. For r = 1: p_d f(z_a | x) / (mu_c f_c) when a >= 1,
/// 1 - p_d when a = 0. For r = 0: the unit sample function 1(a).
double legacy_factor_q(const StateVec& x, int r, int a, const Scan& scan,
                       const SensorModel& sm);

/// New PT factor for measurement z. For r = 1: zero when b points at a
/// legacy PT, p_d mu_b f_b(x) f(z | x) / (mu_c f_c) when b = 0. For r = 0: 1.
double new_pt_factor_v(const StateVec& x, int r, int b, const MeasVec& z,
                       int num_legacy, const SensorModel& sm);

/// Pairwise consistency of target- and measurement-oriented association
/// variables: 0 iff exactly one side of the pair (a_j = m, b_m = j) holds.
int consistency_indicator(int a_j, int b_m, int j, int m);

// --- Linear-Gaussian sensor utilities shared by JPDA and MHT ---

/// Predicted measurement mean H x and innovation covariance
/// S = H P H^T + sigma_v^2 I2.
struct MeasPrediction {
  MeasVec mean = MeasVec::Zero();
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
};

MeasPrediction predict_measurement(const GaussianBelief& b,
                                   const SensorModel& sm);

/// Standard Kalman update of `b` with measurement z; covariance symmetrized.
GaussianBelief kalman_update(const GaussianBelief& b, const MeasVec& z,
                             const SensorModel& sm);

/// 2D Gaussian density N(x; mean, S).
double gaussian2_pdf(const MeasVec& x, const MeasVec& mean,
                     const Eigen::Matrix2d& S);

/// (P + P^T) / 2.
inline StateCov symmetrized(const StateCov& P) {
  return 0.5 * (P + P.transpose());
}

}  // namespace mtt
