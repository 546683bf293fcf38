#pragma once

#include <Eigen/Dense>
#include <camel/extractor.hpp>
#include <cstdint>
#include <vector>

namespace camel {

// Location/scale summary of one view's extracted features.
struct ViewRepresentation {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;  // population standard deviation, entrywise

  Eigen::VectorXd concatenated() const;
};

ViewRepresentation view_representation(
    const std::vector<Eigen::VectorXd>& features);

// sqrt((||dm||^2 + ||dsigma||^2) / 2), a simplified 2-Wasserstein distance
// between Gaussians with diagonal covariance.
double view_distance(const ViewRepresentation& a, const ViewRepresentation& b);

struct ViewPrototypeSet {
  // Centroids in the concatenated [mean; std] space, one per prototype.
  std::vector<Eigen::VectorXd> prototypes;
  // 1-based prototype id per view, indexed by view-1.
  std::vector<int> view_to_prototype;

  int num_prototypes() const { return static_cast<int>(prototypes.size()); }
  int num_views() const { return static_cast<int>(view_to_prototype.size()); }
  int prototype_of(int view) const;
};

// Groups the dataset's views into j prototypes by k-means over their
// representations. Prototype ids are canonical: sorted by the smallest
// member view, so j = V yields the identity assignment.
ViewPrototypeSet cluster_views(const std::vector<Eigen::VectorXd>& raw,
                               const std::vector<int>& views, int num_views,
                               const FeatureExtractor& extractor, int j,
                               std::uint64_t seed);

// Same memberships, centroids recomputed from the given extractor's
// features (used to refresh prototypes after training).
ViewPrototypeSet recompute_prototypes(const std::vector<Eigen::VectorXd>& raw,
                                      const std::vector<int>& views,
                                      const ViewPrototypeSet& initial,
                                      const FeatureExtractor& extractor);

// Replaces each sample's view id with its prototype id.
std::vector<int> relabel_views(const std::vector<int>& views,
                               const ViewPrototypeSet& prototypes);

// Nearest prototype of a previously unseen view, ties to the lowest id.
int assign_unseen_view(const std::vector<Eigen::VectorXd>& raw,
                       const ViewPrototypeSet& prototypes,
                       const FeatureExtractor& extractor);

}  // namespace camel
