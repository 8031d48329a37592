#include "mtt/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "mtt/assignment.hpp"

namespace mtt {

GospaResult gospa(const std::vector<MeasVec>& truth,
                  const std::vector<MeasVec>& est, double p, double c,
                  double alpha) {
  if (alpha != 2.0)
    throw std::invalid_argument("gospa: only alpha = 2 is supported");
  if (!(p >= 1.0) || !(c > 0))
    throw std::invalid_argument("gospa: need p >= 1 and c > 0");

  const int n = static_cast<int>(truth.size());
  const int m = static_cast<int>(est.size());
  const double unassigned = std::pow(c, p) / alpha;

  Eigen::MatrixXd cost(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double d = (truth[i] - est[j]).norm();
      cost(i, j) = d < c ? std::pow(d, p) : kInf;
    }

  const AssignmentResult best =
      best_assignment(cost, Eigen::VectorXd::Constant(n, unassigned));

  GospaResult res;
  std::vector<char> est_used(m, 0);
  for (int i = 0; i < n; ++i) {
    const int j = best.row_to_col[i];
    if (j >= 0) {
      res.localization += cost(i, j);
      est_used[j] = 1;
    } else {
      res.missed += unassigned;
    }
  }
  for (int j = 0; j < m; ++j)
    if (!est_used[j]) res.false_ += unassigned;
  res.total = std::pow(res.localization + res.missed + res.false_, 1.0 / p);
  return res;
}

std::vector<MeasVec> gnn_select_two(const std::vector<MeasVec>& est,
                                    const std::array<MeasVec, 2>& truth) {
  const int m = static_cast<int>(est.size());
  if (m < 2) return est;
  int best_i = 0, best_j = 1;
  double best_cost = kInf;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double cost =
          (truth[0] - est[i]).norm() + (truth[1] - est[j]).norm();
      if (cost < best_cost) {
        best_cost = cost;
        best_i = i;
        best_j = j;
      }
    }
  return {est[best_i], est[best_j]};
}

double d_center(double y1, double y2) {
  return 0.5 * (std::abs(y1) + std::abs(y2));
}

double d_tracks(double y1, double y2) { return std::abs(y1 - y2); }

}  // namespace mtt
