#include "mtt/mht.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mtt/association.hpp"

namespace mtt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

std::vector<int> path_from_root(const HypothesisTree& tree, int leaf) {
  std::vector<int> path;
  for (int n = leaf; n >= 0; n = tree.nodes[n].parent) path.push_back(n);
  std::reverse(path.begin(), path.end());
  return path;
}

// Measurement claims of a leaf over the uncommitted scans, one bitmask per
// slot (slot = current_scan - scan_k, 0..window). The root's claim counts
// only while the birth decision is still open.
std::vector<std::uint64_t> leaf_claims(const HypothesisTree& tree, int leaf,
                                       int current_scan, int window) {
  std::vector<std::uint64_t> claims(window + 1, 0);
  for (int n = leaf; n >= 0; n = tree.nodes[n].parent) {
    if (n == 0 && tree.established) break;
    const TrackHypothesis& node = tree.nodes[n];
    if (node.meas > 0) {
      const int slot = current_scan - node.scan_k;
      if (slot >= 0 && slot <= window) claims[slot] |= 1ULL << (node.meas - 1);
    }
  }
  return claims;
}

bool compatible(const std::vector<std::uint64_t>& a,
                const std::vector<std::uint64_t>& b) {
  for (std::size_t s = 0; s < a.size(); ++s)
    if (a[s] & b[s]) return false;
  return true;
}

GaussianBelief birth_belief(const MeasVec& z, const SensorModel& sm,
                            const MhtConfig& cfg) {
  GaussianBelief b;
  b.mean << z.x(), z.y(), 0.0, 0.0;
  const double s2 = sm.sigma_v * sm.sigma_v;
  const double v2 = cfg.birth_vel_std * cfg.birth_vel_std;
  b.cov.diagonal() << s2, s2, v2, v2;
  return b;
}

// RTS pass along the selected path, from the leaf back to target_scan.
GaussianBelief smooth_along_path(const HypothesisTree& tree, int leaf,
                                 int target_scan, const MotionModel& mm) {
  const std::vector<int> path = path_from_root(tree, leaf);
  int start = -1;
  for (std::size_t i = 0; i < path.size(); ++i)
    if (tree.nodes[path[i]].scan_k == target_scan)
      start = static_cast<int>(i);
  if (start < 0) throw std::logic_error("smooth_along_path: scan not on path");

  GaussianBelief smoothed = tree.nodes[path.back()].belief;
  for (int i = static_cast<int>(path.size()) - 2; i >= start; --i) {
    const GaussianBelief& filt = tree.nodes[path[i]].belief;
    const GaussianBelief pred = predict_moments(filt, mm);
    const StateCov gain = filt.cov * mm.A.transpose() * pred.cov.inverse();
    GaussianBelief s;
    s.mean = filt.mean + gain * (smoothed.mean - pred.mean);
    s.cov = symmetrized(filt.cov +
                        gain * (smoothed.cov - pred.cov) * gain.transpose());
    smoothed = s;
  }
  return smoothed;
}

// Keeps only the subtree under new_root, rebasing scores so the new root
// scores zero. Relies on children always following their parents in the
// nodes array.
void reroot(HypothesisTree& tree, int new_root) {
  std::vector<int> remap(tree.nodes.size(), -1);
  std::vector<TrackHypothesis> nodes;
  nodes.reserve(tree.nodes.size());
  const double base = tree.nodes[new_root].score;
  remap[new_root] = 0;
  nodes.push_back(tree.nodes[new_root]);
  nodes[0].parent = -1;
  nodes[0].score = 0.0;
  for (std::size_t n = new_root + 1; n < tree.nodes.size(); ++n) {
    const int p = tree.nodes[n].parent;
    if (p < 0 || remap[p] < 0) continue;
    remap[n] = static_cast<int>(nodes.size());
    TrackHypothesis copy = tree.nodes[n];
    copy.parent = remap[p];
    copy.score -= base;
    nodes.push_back(std::move(copy));
  }
  std::vector<int> leaves;
  for (const int l : tree.leaves)
    if (remap[l] >= 0) leaves.push_back(remap[l]);
  tree.nodes = std::move(nodes);
  tree.leaves = std::move(leaves);
}

}  // namespace

void extend_hypotheses(HypothesisForest& forest, const Scan& scan,
                       const MotionModel& mm, const SensorModel& sm,
                       const MhtConfig& cfg) {
  if (scan.size() > 63)
    throw std::runtime_error("mht: more than 63 measurements in one scan");
  const double ci = sm.clutter_intensity();
  const double miss_inc = safe_log(mm.p_s * (1.0 - sm.p_d));

  for (HypothesisTree& tree : forest.trees) {
    std::vector<int> new_leaves;
    for (const int leaf : tree.leaves) {
      const GaussianBelief pred = predict_moments(tree.nodes[leaf].belief, mm);
      const MeasPrediction mp = predict_measurement(pred, sm);
      const double base = tree.nodes[leaf].score;

      TrackHypothesis miss;
      miss.parent = leaf;
      miss.scan_k = scan.k;
      miss.meas = 0;
      miss.score = base + miss_inc;
      miss.belief = pred;
      new_leaves.push_back(static_cast<int>(tree.nodes.size()));
      tree.nodes.push_back(std::move(miss));

      for (int m = 0; m < scan.size(); ++m) {
        const MeasVec& z = scan.measurements[m];
        if (!gate(mp.mean, mp.S, z, cfg.gate_gamma)) continue;
        TrackHypothesis child;
        child.parent = leaf;
        child.scan_k = scan.k;
        child.meas = m + 1;
        child.score = base + safe_log(mm.p_s * sm.p_d *
                                      gaussian2_pdf(z, mp.mean, mp.S) / ci);
        child.belief = kalman_update(pred, z, sm);
        new_leaves.push_back(static_cast<int>(tree.nodes.size()));
        tree.nodes.push_back(std::move(child));
      }
    }
    if (static_cast<int>(new_leaves.size()) > cfg.leaf_cap) {
      std::stable_sort(new_leaves.begin(), new_leaves.end(),
                       [&](int a, int b) {
                         return tree.nodes[a].score > tree.nodes[b].score;
                       });
      new_leaves.resize(cfg.leaf_cap);
      std::sort(new_leaves.begin(), new_leaves.end());
    }
    tree.leaves = std::move(new_leaves);
  }

  // One birth hypothesis per measurement. The uniform birth and clutter
  // densities cancel, leaving the log of p_d mu_b / mu_c.
  const double birth_score =
      safe_log(sm.p_d * sm.mu_b * (1.0 / sm.roi.area()) / ci);
  for (int m = 0; m < scan.size(); ++m) {
    HypothesisTree tree;
    tree.track_id = forest.next_track_id++;
    tree.birth_scan = scan.k;
    TrackHypothesis root;
    root.parent = -1;
    root.scan_k = scan.k;
    root.meas = m + 1;
    root.score = birth_score;
    root.belief = birth_belief(scan.measurements[m], sm, cfg);
    tree.nodes.push_back(std::move(root));
    tree.leaves = {0};
    forest.trees.push_back(std::move(tree));
  }
  forest.last_scan = scan.k;
}

GlobalHypothesis select_global_hypothesis(const HypothesisForest& forest,
                                          const MhtConfig& cfg) {
  const int T = static_cast<int>(forest.trees.size());
  const int current = forest.last_scan;

  GlobalHypothesis best;
  best.leaf_of_tree.assign(T, -1);
  if (T == 0) return best;

  struct Option {
    int leaf = -1;  // -1 = tree not selected
    double score = 0.0;
    std::vector<std::uint64_t> claims;
  };
  std::vector<std::vector<Option>> options(T);
  std::vector<double> suffix(T + 1, 0.0);
  for (int t = 0; t < T; ++t) {
    const HypothesisTree& tree = forest.trees[t];
    if (!tree.established)
      options[t].push_back(
          {-1, 0.0, std::vector<std::uint64_t>(cfg.window + 1, 0)});
    for (const int leaf : tree.leaves)
      options[t].push_back({leaf, tree.nodes[leaf].score,
                            leaf_claims(tree, leaf, current, cfg.window)});
    // Best options first so the initial descent is greedy; the drop option
    // precedes an equal-scoring leaf, then lower leaf indices win.
    std::sort(options[t].begin(), options[t].end(),
              [](const Option& a, const Option& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.leaf < b.leaf;
              });
    // An earlier option with a subset of the claims makes a later one
    // irrelevant: swapping it in never loses score or feasibility.
    std::vector<Option> kept;
    kept.reserve(options[t].size());
    for (Option& op : options[t]) {
      bool dominated = false;
      for (const Option& k : kept) {
        bool subset = true;
        for (std::size_t s = 0; s < k.claims.size() && subset; ++s)
          subset = (k.claims[s] & ~op.claims[s]) == 0;
        if (subset) {
          dominated = true;
          break;
        }
      }
      if (!dominated) kept.push_back(std::move(op));
    }
    options[t] = std::move(kept);
  }
  // Trees that can never claim a common measurement form independent
  // selection problems; searching them separately keeps the branch-and-bound
  // exact at a fraction of the node count.
  std::vector<std::vector<std::uint64_t>> tree_mask(
      T, std::vector<std::uint64_t>(cfg.window + 1, 0));
  for (int t = 0; t < T; ++t)
    for (const Option& op : options[t])
      for (int s = 0; s <= cfg.window; ++s) tree_mask[t][s] |= op.claims[s];
  std::vector<int> comp(T);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (int a = 0; a < T; ++a)
    for (int b = a + 1; b < T; ++b)
      if (!compatible(tree_mask[a], tree_mask[b]))
        comp[std::max(find(a), find(b))] = std::min(find(a), find(b));
  std::vector<std::vector<int>> clusters(T);
  for (int t = 0; t < T; ++t) clusters[find(t)].push_back(t);

  std::vector<int> best_pick(T, -1);
  double best_score = 0.0;
  bool capped = false;
  bool solved = true;
  std::size_t visited = 0;

  for (const std::vector<int>& cluster : clusters) {
    if (cluster.empty() || capped) continue;
    const int n = static_cast<int>(cluster.size());
    for (int i = n - 1; i >= 0; --i) {
      double mx = kNegInf;
      for (const Option& op : options[cluster[i]])
        mx = std::max(mx, op.score);
      suffix[i] = (i + 1 < n ? suffix[i + 1] : 0.0) + mx;
    }

    std::vector<int> pick(n, -1);
    std::vector<std::uint64_t> claims(cfg.window + 1, 0);
    double cl_best = kNegInf;
    std::vector<int> cl_pick;

    // Feasible greedy seed tightens the bound from the first descent.
    {
      std::vector<int> greedy(n, -1);
      double score = 0.0;
      bool feasible = true;
      for (int i = 0; i < n && feasible; ++i) {
        feasible = false;
        for (const Option& op : options[cluster[i]]) {
          if (op.leaf >= 0 && !compatible(claims, op.claims)) continue;
          for (std::size_t s = 0; s < claims.size(); ++s)
            claims[s] |= op.claims[s];
          greedy[i] = op.leaf;
          score += op.score;
          feasible = true;
          break;
        }
      }
      std::fill(claims.begin(), claims.end(), 0);
      if (feasible) {
        cl_best = score;
        cl_pick = std::move(greedy);
      }
    }

    auto dfs = [&](auto&& self, int i, double score) -> void {
      if (capped || ++visited > cfg.search_cap) {
        capped = true;
        return;
      }
      if (i == n) {
        if (score > cl_best) {
          cl_best = score;
          cl_pick = pick;
        }
        return;
      }
      if (!(score + suffix[i] > cl_best)) return;
      for (const Option& op : options[cluster[i]]) {
        if (op.leaf >= 0 && !compatible(claims, op.claims)) continue;
        for (std::size_t s = 0; s < claims.size(); ++s)
          claims[s] |= op.claims[s];
        pick[i] = op.leaf;
        self(self, i + 1, score + op.score);
        for (std::size_t s = 0; s < claims.size(); ++s)
          claims[s] &= ~op.claims[s];
        pick[i] = -1;
        if (capped) return;
      }
    };
    dfs(dfs, 0, 0.0);

    if (capped || cl_pick.empty()) {
      solved = false;
      break;
    }
    for (int i = 0; i < n; ++i) best_pick[cluster[i]] = cl_pick[i];
    best_score += cl_best;
  }

  if (capped || !solved) {
    std::vector<std::uint64_t> claims(cfg.window + 1, 0);
    // Greedy fallback in id order. An established tree with no compatible
    // leaf takes its best leaf regardless; the result is flagged inexact.
    best_pick.assign(T, -1);
    best_score = 0.0;
    std::fill(claims.begin(), claims.end(), 0);
    for (int t = 0; t < T; ++t) {
      const Option* chosen = nullptr;
      for (const Option& op : options[t]) {
        if (op.leaf >= 0 && !compatible(claims, op.claims)) continue;
        if (!chosen || op.score > chosen->score) chosen = &op;
      }
      if (!chosen && forest.trees[t].established) {
        for (const Option& op : options[t])
          if (!chosen || op.score > chosen->score) chosen = &op;
      }
      if (!chosen) continue;
      best_pick[t] = chosen->leaf;
      best_score += chosen->score;
      for (std::size_t s = 0; s < claims.size(); ++s)
        claims[s] |= chosen->claims[s];
    }
    best.exact = false;
  }

  best.leaf_of_tree = std::move(best_pick);
  best.score = best_score;
  return best;
}

void n_scan_prune(HypothesisForest& forest, const GlobalHypothesis& gh,
                  int window) {
  const int horizon = forest.last_scan - window;  // scans <= horizon are final

  std::vector<HypothesisTree> kept;
  kept.reserve(forest.trees.size());
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    HypothesisTree& tree = forest.trees[t];
    const int leaf =
        t < gh.leaf_of_tree.size() ? gh.leaf_of_tree[t] : -1;
    if (leaf < 0) {
      // Root decision "nonexistent" discards the tree.
      if (tree.birth_scan <= horizon) continue;
      kept.push_back(std::move(tree));
      continue;
    }
    if (!tree.established && tree.birth_scan <= horizon) {
      tree.established = true;
      tree.committed_hits.push_back(tree.nodes[0].meas > 0);
    }
    if (tree.nodes[0].scan_k < horizon) {
      const std::vector<int> path = path_from_root(tree, leaf);
      int new_root = 0;
      for (const int n : path) {
        if (tree.nodes[n].scan_k > horizon) break;
        new_root = n;
        if (n != 0) tree.committed_hits.push_back(tree.nodes[n].meas > 0);
      }
      while (tree.committed_hits.size() > 64) tree.committed_hits.pop_front();
      if (new_root != 0) reroot(tree, new_root);
    }
    kept.push_back(std::move(tree));
  }
  forest.trees = std::move(kept);
}

MhtStepResult mht_step(HypothesisForest& forest, const Scan& scan,
                       const MotionModel& mm, const SensorModel& sm,
                       const MhtConfig& cfg) {
  extend_hypotheses(forest, scan, mm, sm, cfg);
  MhtStepResult result;
  result.selected = select_global_hypothesis(forest, cfg);

  // Confirmation and termination read the selected branch's history
  // appended to the committed prefix.
  std::vector<char> terminated(forest.trees.size(), 0);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    HypothesisTree& tree = forest.trees[t];
    const int leaf = result.selected.leaf_of_tree[t];
    if (leaf < 0) continue;
    std::vector<bool> hist(tree.committed_hits.begin(),
                           tree.committed_hits.end());
    for (const int n : path_from_root(tree, leaf)) {
      if (n == 0 && tree.established) continue;  // root already committed
      hist.push_back(tree.nodes[n].meas > 0);
    }
    const int window_n = std::min<int>(cfg.confirm_n, hist.size());
    int hits = 0;
    for (int i = 0; i < window_n; ++i)
      hits += hist[hist.size() - 1 - i] ? 1 : 0;
    if (hits >= cfg.confirm_m) tree.confirmed = true;

    int trailing_misses = 0;
    for (auto it = hist.rbegin(); it != hist.rend() && !*it; ++it)
      ++trailing_misses;
    if (trailing_misses > cfg.max_missed) {
      terminated[t] = 1;
      continue;
    }

    if (tree.confirmed) {
      result.estimates.push_back(
          {tree.track_id, tree.nodes[leaf].belief.mean});
      const int horizon = scan.k - cfg.window;
      if (horizon >= tree.birth_scan)
        result.finalized.push_back(
            {tree.track_id, smooth_along_path(tree, leaf, horizon, mm).mean});
    }
  }

  // Drop terminated trees (and their selections) before pruning.
  if (std::any_of(terminated.begin(), terminated.end(),
                  [](char c) { return c != 0; })) {
    std::vector<HypothesisTree> kept;
    std::vector<int> kept_leaf;
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      if (terminated[t]) continue;
      kept.push_back(std::move(forest.trees[t]));
      kept_leaf.push_back(result.selected.leaf_of_tree[t]);
    }
    forest.trees = std::move(kept);
    result.selected.leaf_of_tree = kept_leaf;
  }

  n_scan_prune(forest, result.selected, cfg.window);
  return result;
}

}  // namespace mtt
