#include "mtt/association.hpp"

#include <cmath>

namespace mtt {

bool gate(const MeasVec& pred_meas_mean, const Eigen::Matrix2d& innov_cov,
          const MeasVec& z, double gamma) {
  const double det = innov_cov.determinant();
  if (!(det > 1e-12) || !(innov_cov(0, 0) > 0))
    throw std::runtime_error("gate: singular innovation covariance");
  const MeasVec nu = z - pred_meas_mean;
  const double maha =
      (nu.x() * (innov_cov(1, 1) * nu.x() - innov_cov(0, 1) * nu.y()) +
       nu.y() * (innov_cov(0, 0) * nu.y() - innov_cov(1, 0) * nu.x())) /
      det;
  return maha <= gamma;
}

double chi2_gate_threshold(double prob) {
  if (!(prob > 0) || !(prob < 1))
    throw std::invalid_argument("chi2_gate_threshold: prob must be in (0,1)");
  return -2.0 * std::log1p(-prob);
}

namespace {

template <typename Leaf>
void for_each_event(const GateMatrix& gm, std::size_t cap, Leaf&& leaf) {
  const int J = gm.rows;
  const int M = gm.cols;
  std::vector<int> a(J, 0);
  std::vector<char> claimed(M, 0);
  std::size_t count = 0;

  auto visit = [&](auto&& self, int j) -> void {
    if (j == J) {
      if (++count > cap)
        throw EventCapExceeded(
            "joint-event cap exceeded; consider a tighter gate");
      leaf(a, claimed);
      return;
    }
    a[j] = 0;
    self(self, j + 1);
    for (int m = 0; m < M; ++m) {
      if (!gm.at(j, m) || claimed[m]) continue;
      a[j] = m + 1;
      claimed[m] = 1;
      self(self, j + 1);
      claimed[m] = 0;
    }
    a[j] = 0;
  };
  visit(visit, 0);
}

}  // namespace

std::vector<DaVectorTarget> enumerate_joint_events(const GateMatrix& gm,
                                                   std::size_t cap) {
  std::vector<DaVectorTarget> events;
  for_each_event(gm, cap,
                 [&](const std::vector<int>& a, const std::vector<char>&) {
                   events.push_back(DaVectorTarget{a});
                 });
  return events;
}

AssociationMarginals exact_association_marginals(const AssociationWeights& w,
                                                 const GateMatrix& gm,
                                                 std::size_t cap) {
  const int J = gm.rows;
  const int M = gm.cols;
  AssociationMarginals out;
  out.beta = Eigen::MatrixXd::Zero(J, M + 1);
  out.kappa = Eigen::VectorXd::Zero(M);
  double total = 0.0;

  for_each_event(gm, cap,
                 [&](const std::vector<int>& a, const std::vector<char>& claimed) {
                   double weight = 1.0;
                   for (int j = 0; j < J; ++j) weight *= w.psi(j, a[j]);
                   for (int m = 0; m < M; ++m)
                     if (!claimed[m]) weight *= 1.0 + w.xi(m);
                   total += weight;
                   for (int j = 0; j < J; ++j) out.beta(j, a[j]) += weight;
                   for (int m = 0; m < M; ++m)
                     if (!claimed[m]) out.kappa(m) += weight;
                 });

  if (total > 0) {
    out.beta /= total;
    out.kappa /= total;
  } else {
    out.beta.col(0).setOnes();
    out.converged = false;
  }
  return out;
}

AssociationMarginals bp_association_marginals(const AssociationWeights& w,
                                              const GateMatrix& gm,
                                              int max_iter, double tol,
                                              double damping) {
  if (max_iter < 1)
    throw std::invalid_argument("bp_association_marginals: max_iter >= 1");
  if (!(tol > 0))
    throw std::invalid_argument("bp_association_marginals: tol > 0");
  const int J = gm.rows;
  const int M = gm.cols;

  AssociationMarginals out;
  out.beta = Eigen::MatrixXd::Zero(J, M + 1);
  out.kappa = Eigen::VectorXd::Ones(M);
  out.converged = true;

  // nu(m, j): measurement-to-target message, mu(j, m): target-to-measurement.
  Eigen::MatrixXd nu = Eigen::MatrixXd::Ones(M, J);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(J, M);

  auto update_mu = [&]() {
    for (int j = 0; j < J; ++j) {
      for (int m = 0; m < M; ++m) {
        if (!gm.at(j, m)) continue;
        double denom = w.psi(j, 0);
        for (int m2 = 0; m2 < M; ++m2)
          if (m2 != m && gm.at(j, m2)) denom += w.psi(j, m2 + 1) * nu(m2, j);
        mu(j, m) = w.psi(j, m + 1) / denom;
      }
    }
  };

  if (M > 0 && J > 0) {
    out.converged = false;
    for (int it = 0; it < max_iter; ++it) {
      update_mu();
      double delta = 0.0;
      for (int m = 0; m < M; ++m) {
        for (int j = 0; j < J; ++j) {
          if (!gm.at(j, m)) continue;
          double others = 0.0;
          for (int j2 = 0; j2 < J; ++j2)
            if (j2 != j && gm.at(j2, m)) others += mu(j2, m);
          const double fresh = 1.0 / (1.0 + w.xi(m) + others);
          const double next = damping * nu(m, j) + (1.0 - damping) * fresh;
          delta = std::max(delta, std::abs(next - nu(m, j)));
          nu(m, j) = next;
        }
      }
      out.iterations = it + 1;
      out.delta_history.push_back(delta);
      if (delta < tol) {
        out.converged = true;
        break;
      }
    }
    update_mu();
  }

  for (int j = 0; j < J; ++j) {
    out.beta(j, 0) = w.psi(j, 0);
    double row = w.psi(j, 0);
    for (int m = 0; m < M; ++m) {
      if (!gm.at(j, m)) continue;
      out.beta(j, m + 1) = w.psi(j, m + 1) * nu(m, j);
      row += out.beta(j, m + 1);
    }
    if (row > 0)
      out.beta.row(j) /= row;
    else
      out.beta(j, 0) = 1.0;
  }
  for (int m = 0; m < M; ++m) {
    double claimed = 0.0;
    for (int j = 0; j < J; ++j)
      if (gm.at(j, m)) claimed += mu(j, m);
    out.kappa(m) = (1.0 + w.xi(m)) / (1.0 + w.xi(m) + claimed);
  }
  return out;
}

}  // namespace mtt
