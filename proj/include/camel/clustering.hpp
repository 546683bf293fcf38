#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace camel {

// Hard partition of a point set: per-point cluster index, per-cluster
// centroid, and the pinned points that reassignment passes must not move.
struct ClusterState {
  std::vector<int> assignments;            // size N, values in [0, K)
  std::vector<Eigen::VectorXd> centroids;  // size K
  std::map<int, int> pinned;               // point index -> locked cluster

  int num_clusters() const { return static_cast<int>(centroids.size()); }
  int size() const { return static_cast<int>(assignments.size()); }
};

// Sum of squared distances from each point to its assigned centroid.
double clustering_cost(const std::vector<Eigen::VectorXd>& points,
                       const ClusterState& state);

// Seeded k-means: weighted-sampling initialization, then Lloyd passes until
// the assignments stop changing or max_iterations is reached. Distance ties
// break toward the lowest cluster index. A cluster left empty by an update is
// repopulated with the point farthest from its current centroid, so exactly k
// clusters always survive.
ClusterState kmeans(const std::vector<Eigen::VectorXd>& points, int k,
                    std::uint64_t seed, int max_iterations = 100);

// Lloyd passes from an existing state; pinned points keep their cluster.
// Used to warm-start the alternating fit and for centroid refreshes.
ClusterState kmeans_refine(const std::vector<Eigen::VectorXd>& points,
                           ClusterState state, int max_iterations = 100);

// N x K indicator with column k scaled by 1/sqrt(n_k), so the columns are
// orthonormal. Every cluster must be non-empty.
Eigen::MatrixXd build_indicator(const ClusterState& state);

// Appends one dedicated cluster per labelled identity and pins the labelled
// points there. labels holds (point index, identity) pairs; listing a point
// twice with conflicting identities is an error. Clusters emptied by the move
// keep their stale centroid; a following kmeans_refine repopulates them.
ClusterState pin_labelled_clusters(
    const std::vector<Eigen::VectorXd>& points, ClusterState state,
    const std::vector<std::pair<int, int>>& labels);

}  // namespace camel
