#include "mtt/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

namespace mtt {

namespace {

// Square N x N assignment with potentials (Jonker-Volgenant style
// shortest augmenting paths). +inf entries are absent edges. Returns
// col-to-row matching in p (p[0] unused) or infeasible = true.
struct SquareSolution {
  std::vector<int> p;
  bool infeasible = false;
};

SquareSolution solve_square(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  SquareSolution sol;
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cij = a(i0 - 1, j - 1);
        if (cij < kInf) {
          const double cur = cij - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 < 0 || !(delta < kInf)) {
        sol.infeasible = true;
        return sol;
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  sol.p = std::move(p);
  return sol;
}

// Embeds an R x C problem with optional row unassignment into a square
// matrix of size (R + C): dummy column i prices row i out; filler rows
// absorb unused real columns and leftover dummies at zero cost.
Eigen::MatrixXd build_augmented(const Eigen::MatrixXd& cost,
                                const Eigen::VectorXd& unassigned) {
  const int R = static_cast<int>(cost.rows());
  const int C = static_cast<int>(cost.cols());
  const int N = R + C;
  Eigen::MatrixXd aug = Eigen::MatrixXd::Constant(N, N, kInf);
  aug.topLeftCorner(R, C) = cost;
  for (int i = 0; i < R; ++i) aug(i, C + i) = unassigned(i);
  for (int c = 0; c < C; ++c) {
    aug(R + c, c) = 0.0;
    aug.row(R + c).segment(C, R).setZero();
  }
  return aug;
}

AssignmentResult extract(const Eigen::MatrixXd& cost,
                         const Eigen::VectorXd& unassigned,
                         const SquareSolution& sq) {
  const int R = static_cast<int>(cost.rows());
  const int C = static_cast<int>(cost.cols());
  AssignmentResult res;
  res.row_to_col.assign(R, -1);
  if (sq.infeasible) return res;
  res.feasible = true;
  res.cost = 0.0;
  std::vector<int> row_of_col(R + C, -1);
  for (int j = 1; j <= R + C; ++j)
    if (sq.p[j]) row_of_col[j - 1] = sq.p[j] - 1;
  for (int c = 0; c < C; ++c) {
    const int r = row_of_col[c];
    if (r >= 0 && r < R) {
      res.row_to_col[r] = c;
      res.cost += cost(r, c);
    }
  }
  for (int r = 0; r < R; ++r)
    if (res.row_to_col[r] < 0) res.cost += unassigned(r);
  return res;
}

}  // namespace

AssignmentResult best_assignment(const Eigen::MatrixXd& cost,
                                 const Eigen::VectorXd& unassigned_cost) {
  const int R = static_cast<int>(cost.rows());
  AssignmentResult res;
  res.row_to_col.assign(R, -1);
  if (R == 0) {
    res.feasible = true;
    res.cost = 0.0;
    return res;
  }
  const SquareSolution sq = solve_square(build_augmented(cost, unassigned_cost));
  return extract(cost, unassigned_cost, sq);
}

AssignmentResult best_assignment(const Eigen::MatrixXd& cost) {
  return best_assignment(
      cost, Eigen::VectorXd::Constant(cost.rows(), kInf));
}

std::vector<AssignmentResult> m_best_assignments(
    const Eigen::MatrixXd& cost, const Eigen::VectorXd& unassigned_cost,
    int m) {
  const int R = static_cast<int>(cost.rows());
  std::vector<AssignmentResult> out;
  if (m < 1) throw std::invalid_argument("m_best_assignments: m must be >= 1");

  // Subproblem = original problem plus forced / forbidden row choices
  // (column index, -1 = unassigned).
  struct Node {
    std::vector<std::pair<int, int>> forced;
    std::vector<std::pair<int, int>> forbidden;
    AssignmentResult best;
    std::uint64_t seq = 0;
  };
  auto solve_node = [&](Node& node) {
    Eigen::MatrixXd c = cost;
    Eigen::VectorXd un = unassigned_cost;
    for (const auto& [r, col] : node.forbidden) {
      if (col >= 0)
        c(r, col) = kInf;
      else
        un(r) = kInf;
    }
    for (const auto& [r, col] : node.forced) {
      for (int j = 0; j < c.cols(); ++j)
        if (j != col) c(r, j) = kInf;
      if (col >= 0) un(r) = kInf;
    }
    node.best = best_assignment(c, un);
  };
  auto cmp = [](const Node& a, const Node& b) {
    return std::tie(a.best.cost, a.seq) > std::tie(b.best.cost, b.seq);
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> queue(cmp);

  std::uint64_t seq = 0;
  Node root;
  root.seq = seq++;
  solve_node(root);
  if (root.best.feasible) queue.push(std::move(root));

  while (!queue.empty() && static_cast<int>(out.size()) < m) {
    Node node = queue.top();
    queue.pop();
    out.push_back(node.best);

    std::vector<char> is_forced(R, 0);
    for (const auto& [r, col] : node.forced) is_forced[r] = 1;
    std::vector<std::pair<int, int>> prefix;
    for (int r = 0; r < R; ++r) {
      if (is_forced[r]) continue;
      Node child;
      child.forced = node.forced;
      child.forced.insert(child.forced.end(), prefix.begin(), prefix.end());
      child.forbidden = node.forbidden;
      child.forbidden.emplace_back(r, node.best.row_to_col[r]);
      child.seq = seq++;
      solve_node(child);
      if (child.best.feasible) queue.push(std::move(child));
      prefix.emplace_back(r, node.best.row_to_col[r]);
    }
  }
  return out;
}

}  // namespace mtt
