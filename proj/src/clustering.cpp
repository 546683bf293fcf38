#include "camel/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "camel/errors.hpp"
#include "camel/rng.hpp"

namespace camel {

namespace {

void check_points(const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw ArgumentError("kmeans: no points");
  const Eigen::Index dim = points[0].size();
  for (const Eigen::VectorXd& p : points)
    if (p.size() != dim)
      throw ArgumentError("kmeans: inconsistent point dimensions");
}

void check_state(const std::vector<Eigen::VectorXd>& points,
                 const ClusterState& state) {
  const int n = static_cast<int>(points.size());
  const int k = state.num_clusters();
  if (state.size() != n)
    throw ArgumentError("cluster state: assignment count does not match points");
  if (k < 1) throw ArgumentError("cluster state: no clusters");
  for (int a : state.assignments)
    if (a < 0 || a >= k)
      throw ArgumentError("cluster state: assignment out of range");
  for (const Eigen::VectorXd& c : state.centroids)
    if (c.size() != points[0].size())
      throw ArgumentError("cluster state: centroid dimension mismatch");
  for (const auto& [idx, cluster] : state.pinned) {
    if (idx < 0 || idx >= n)
      throw ArgumentError("cluster state: pinned index out of range");
    if (cluster < 0 || cluster >= k)
      throw ArgumentError("cluster state: pinned cluster out of range");
    if (state.assignments[idx] != cluster)
      throw ArgumentError("cluster state: pinned point not in its cluster");
  }
}

int nearest_centroid(const Eigen::VectorXd& point,
                     const std::vector<Eigen::VectorXd>& centroids) {
  int best = 0;
  double best_dist = (point - centroids[0]).squaredNorm();
  for (int k = 1; k < static_cast<int>(centroids.size()); ++k) {
    const double d = (point - centroids[k]).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  return best;
}

void recompute_centroids(const std::vector<Eigen::VectorXd>& points,
                         ClusterState& state, std::vector<int>& counts) {
  const int k = state.num_clusters();
  counts.assign(k, 0);
  std::vector<Eigen::VectorXd> sums(
      k, Eigen::VectorXd::Zero(points[0].size()));
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    sums[state.assignments[i]] += points[i];
    ++counts[state.assignments[i]];
  }
  for (int c = 0; c < k; ++c)
    if (counts[c] > 0) state.centroids[c] = sums[c] / counts[c];
  // Empty clusters keep their stale centroid; the caller repopulates them.
}

// Moves the point with the largest distance to its own centroid (ties to the
// lowest index, pinned points excluded) into each empty cluster.
void repopulate_empty(const std::vector<Eigen::VectorXd>& points,
                      ClusterState& state, std::vector<int>& counts) {
  const int k = state.num_clusters();
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    int farthest = -1;
    double far_dist = -1.0;
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
      if (state.pinned.count(i)) continue;
      if (counts[state.assignments[i]] <= 1) continue;  // would empty donor
      const double d =
          (points[i] - state.centroids[state.assignments[i]]).squaredNorm();
      if (d > far_dist) {
        far_dist = d;
        farthest = i;
      }
    }
    if (farthest < 0)
      throw ArgumentError("kmeans: cannot repopulate empty cluster " +
                          std::to_string(c));
    --counts[state.assignments[farthest]];
    state.assignments[farthest] = c;
    state.centroids[c] = points[farthest];
    counts[c] = 1;
  }
}

ClusterState lloyd(const std::vector<Eigen::VectorXd>& points,
                   ClusterState state, int max_iterations) {
  std::vector<int> counts;
  for (int iter = 0; iter < max_iterations; ++iter) {
    const std::vector<int> previous = state.assignments;
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
      if (state.pinned.count(i)) continue;
      state.assignments[i] = nearest_centroid(points[i], state.centroids);
    }
    recompute_centroids(points, state, counts);
    repopulate_empty(points, state, counts);
    recompute_centroids(points, state, counts);
    if (state.assignments == previous) break;
  }
  return state;
}

}  // namespace

double clustering_cost(const std::vector<Eigen::VectorXd>& points,
                       const ClusterState& state) {
  check_points(points);
  check_state(points, state);
  double cost = 0.0;
  for (int i = 0; i < static_cast<int>(points.size()); ++i)
    cost += (points[i] - state.centroids[state.assignments[i]]).squaredNorm();
  return cost;
}

ClusterState kmeans(const std::vector<Eigen::VectorXd>& points, int k,
                    std::uint64_t seed, int max_iterations) {
  check_points(points);
  const int n = static_cast<int>(points.size());
  if (k < 1) throw ArgumentError("kmeans: k must be >= 1");
  if (k > n) throw ArgumentError("kmeans: k exceeds the number of points");
  if (max_iterations < 1)
    throw ArgumentError("kmeans: max_iterations must be >= 1");

  Rng rng(seed);
  ClusterState state;
  state.centroids.reserve(k);

  // Distance-weighted seeding: the first centroid is uniform, each further
  // one is drawn proportionally to the squared distance from the chosen set.
  state.centroids.push_back(points[rng.uniform_int(n)]);
  std::vector<double> dist2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const Eigen::VectorXd& centroid : state.centroids)
        best = std::min(best, (points[i] - centroid).squaredNorm());
      dist2[i] = best;
      total += best;
    }
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      int pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += dist2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      state.centroids.push_back(points[pick]);
    } else {
      // All remaining mass is zero (duplicate points); any choice works.
      state.centroids.push_back(points[rng.uniform_int(n)]);
    }
  }

  state.assignments.assign(n, 0);
  for (int i = 0; i < n; ++i)
    state.assignments[i] = nearest_centroid(points[i], state.centroids);
  return lloyd(points, std::move(state), max_iterations);
}

ClusterState kmeans_refine(const std::vector<Eigen::VectorXd>& points,
                           ClusterState state, int max_iterations) {
  check_points(points);
  check_state(points, state);
  if (max_iterations < 1)
    throw ArgumentError("kmeans: max_iterations must be >= 1");
  return lloyd(points, std::move(state), max_iterations);
}

Eigen::MatrixXd build_indicator(const ClusterState& state) {
  const int n = state.size();
  const int k = state.num_clusters();
  if (n == 0) throw ArgumentError("indicator: empty state");
  std::vector<int> counts(k, 0);
  for (int a : state.assignments) {
    if (a < 0 || a >= k)
      throw ArgumentError("indicator: assignment out of range");
    ++counts[a];
  }
  for (int c = 0; c < k; ++c)
    if (counts[c] == 0)
      throw ArgumentError("indicator: cluster " + std::to_string(c) +
                          " is empty");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, k);
  for (int i = 0; i < n; ++i)
    h(i, state.assignments[i]) = 1.0 / std::sqrt(counts[state.assignments[i]]);
  return h;
}

ClusterState pin_labelled_clusters(
    const std::vector<Eigen::VectorXd>& points, ClusterState state,
    const std::vector<std::pair<int, int>>& labels) {
  check_points(points);
  check_state(points, state);
  if (labels.empty()) return state;

  std::map<int, int> label_of;
  for (const auto& [idx, identity] : labels) {
    if (idx < 0 || idx >= state.size())
      throw ArgumentError("pin: point index out of range");
    auto [it, inserted] = label_of.emplace(idx, identity);
    if (!inserted && it->second != identity)
      throw ArgumentError("pin: point " + std::to_string(idx) +
                          " labelled with conflicting identities");
  }

  std::set<int> identities;
  for (const auto& [idx, identity] : label_of) identities.insert(identity);
  std::map<int, int> cluster_of_identity;
  const int base = state.num_clusters();
  int next = base;
  for (int identity : identities) cluster_of_identity[identity] = next++;

  state.centroids.resize(next, Eigen::VectorXd::Zero(points[0].size()));
  for (const auto& [idx, identity] : label_of) {
    const int cluster = cluster_of_identity[identity];
    state.assignments[idx] = cluster;
    state.pinned[idx] = cluster;
  }

  // Recompute what can be recomputed; emptied unsupervised clusters keep
  // their previous centroid until the next refine pass.
  std::vector<int> counts;
  recompute_centroids(points, state, counts);
  return state;
}

}  // namespace camel
