#include "mtt/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mtt {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double ParticleBelief::normalize() {
  const double total = weights.sum();
  if (total > 0) weights /= total;
  return total;
}

bool DaVectorTarget::valid(int m_k) const {
  std::vector<char> used(static_cast<std::size_t>(m_k) + 1, 0);
  for (int e : a) {
    if (e < 0 || e > m_k) return false;
    if (e > 0) {
      if (used[e]) return false;
      used[e] = 1;
    }
  }
  return true;
}

bool DaVectorMeasurement::valid(int j_prev) const {
  std::vector<char> used(static_cast<std::size_t>(j_prev) + 1, 0);
  for (int e : b) {
    if (e < 0 || e > j_prev) return false;
    if (e > 0) {
      if (used[e]) return false;
      used[e] = 1;
    }
  }
  return true;
}

MotionModel build_motion_model(double T, double sigma_u2, double p_s) {
  if (!(T > 0)) throw std::invalid_argument("motion model: T must be > 0");
  if (sigma_u2 < 0)
    throw std::invalid_argument("motion model: sigma_u2 must be >= 0");
  if (!(p_s > 0) || p_s > 1)
    throw std::invalid_argument("motion model: p_s must be in (0, 1]");

  MotionModel mm;
  mm.T = T;
  mm.sigma_u2 = sigma_u2;
  mm.p_s = p_s;

  mm.A = StateCov::Identity();
  mm.A(0, 2) = T;
  mm.A(1, 3) = T;

  const double t3 = T * T * T / 3.0;
  const double t2 = T * T / 2.0;
  mm.Sigma_u = StateCov::Zero();
  mm.Sigma_u(0, 0) = t3;
  mm.Sigma_u(1, 1) = t3;
  mm.Sigma_u(0, 2) = t2;
  mm.Sigma_u(2, 0) = t2;
  mm.Sigma_u(1, 3) = t2;
  mm.Sigma_u(3, 1) = t2;
  mm.Sigma_u(2, 2) = T;
  mm.Sigma_u(3, 3) = T;
  mm.Sigma_u *= sigma_u2;

  mm.noise_chol = StateCov::Zero();
  if (sigma_u2 > 0) {
    Eigen::LLT<StateCov> llt(mm.Sigma_u);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("motion model: process noise not PD");
    mm.noise_chol = llt.matrixL();
  }
  return mm;
}

GaussianBelief predict_moments(const GaussianBelief& b, const MotionModel& mm) {
  GaussianBelief out;
  out.mean = mm.A * b.mean;
  out.cov = symmetrized(mm.A * b.cov * mm.A.transpose() + mm.Sigma_u);
  return out;
}

StateVec sample_transition(const StateVec& x, const MotionModel& mm,
                           RandomEngine& eng) {
  StateVec n;
  fill_standard_normal(n, eng);
  return mm.A * x + mm.noise_chol * n;
}

double measurement_likelihood(const MeasVec& z, const StateVec& x,
                              const SensorModel& sm) {
  const double s2 = sm.sigma_v * sm.sigma_v;
  const MeasVec d = z - sm.H * x;
  return std::exp(-0.5 * d.squaredNorm() / s2) / (kTwoPi * s2);
}

double legacy_factor_q(const StateVec& x, int r, int a, const Scan& scan,
                       const SensorModel& sm) {
  const int m_k = scan.size();
  if (a < 0 || a > m_k)
    throw std::invalid_argument("legacy_factor_q: association index out of range");
  if (r == 0) return a == 0 ? 1.0 : 0.0;
  if (a == 0) return 1.0 - sm.p_d;
  return sm.p_d * measurement_likelihood(scan.measurements[a - 1], x, sm) /
         sm.clutter_intensity();
}

double new_pt_factor_v(const StateVec& x, int r, int b, const MeasVec& z,
                       int num_legacy, const SensorModel& sm) {
  if (b < 0 || b > num_legacy)
    throw std::invalid_argument("new_pt_factor_v: association index out of range");
  if (r == 0) return 1.0;
  if (b != 0) return 0.0;
  return sm.p_d * sm.mu_b * sm.birth_pdf(sm.H * x) *
         measurement_likelihood(z, x, sm) / sm.clutter_intensity();
}

int consistency_indicator(int a_j, int b_m, int j, int m) {
  const bool target_claims = a_j == m;
  const bool meas_claims = b_m == j;
  return target_claims == meas_claims ? 1 : 0;
}

MeasPrediction predict_measurement(const GaussianBelief& b,
                                   const SensorModel& sm) {
  MeasPrediction p;
  p.mean = sm.H * b.mean;
  p.S = sm.H * b.cov * sm.H.transpose() +
        sm.sigma_v * sm.sigma_v * Eigen::Matrix2d::Identity();
  return p;
}

GaussianBelief kalman_update(const GaussianBelief& b, const MeasVec& z,
                             const SensorModel& sm) {
  const MeasPrediction p = predict_measurement(b, sm);
  const Eigen::Matrix<double, 4, 2> K =
      b.cov * sm.H.transpose() * p.S.inverse();
  GaussianBelief out;
  out.mean = b.mean + K * (z - p.mean);
  out.cov = symmetrized(b.cov - K * p.S * K.transpose());
  return out;
}

double gaussian2_pdf(const MeasVec& x, const MeasVec& mean,
                     const Eigen::Matrix2d& S) {
  const double det = S.determinant();
  if (!(det > 0)) throw std::runtime_error("gaussian2_pdf: singular covariance");
  const MeasVec d = x - mean;
  const double maha = d.dot(S.inverse() * d);
  return std::exp(-0.5 * maha) / (kTwoPi * std::sqrt(det));
}

namespace {

// Marsaglia polar method; one pair per call, trig-free.
inline void normal_pair(RandomEngine& eng, double& a, double& b) {
  double u, v, s;
  do {
    u = 2.0 * uniform_open(eng) - 1.0;
    v = 2.0 * uniform_open(eng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  a = u * f;
  b = v * f;
}

}  // namespace

void fill_standard_normal(Eigen::Ref<Eigen::MatrixXd> out, RandomEngine& eng) {
  const Eigen::Index rows = out.rows();
  const Eigen::Index cols = out.cols();
  if (rows % 2 == 0 && out.outerStride() == rows) {
    double* data = out.data();
    const Eigen::Index n = rows * cols;
    for (Eigen::Index i = 0; i < n; i += 2) normal_pair(eng, data[i], data[i + 1]);
    return;
  }
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; r += 2) {
      double a, b;
      normal_pair(eng, a, b);
      out(r, c) = a;
      if (r + 1 < rows) out(r + 1, c) = b;
    }
  }
}

double standard_normal(RandomEngine& eng) {
  double a, b;
  normal_pair(eng, a, b);
  return a;
}

}  // namespace mtt
