#include <camel/view_clustering.hpp>

#include <algorithm>
#include <camel/clustering.hpp>
#include <camel/errors.hpp>
#include <cmath>
#include <numeric>
#include <string>

namespace camel {

namespace {

std::vector<Eigen::VectorXd> per_view_features(
    const std::vector<Eigen::VectorXd>& raw, const std::vector<int>& views,
    const FeatureExtractor& extractor, int view) {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (views[i] == view) out.push_back(extractor.forward(raw[i]));
  if (out.empty())
    throw ArgumentError("view " + std::to_string(view) + " has no samples");
  return out;
}

Eigen::VectorXd representation_of(const std::vector<Eigen::VectorXd>& raw,
                                  const std::vector<int>& views,
                                  const FeatureExtractor& extractor,
                                  int view) {
  return view_representation(per_view_features(raw, views, extractor, view))
      .concatenated();
}

}  // namespace

Eigen::VectorXd ViewRepresentation::concatenated() const {
  Eigen::VectorXd w(mean.size() + std_dev.size());
  w << mean, std_dev;
  return w;
}

ViewRepresentation view_representation(
    const std::vector<Eigen::VectorXd>& features) {
  if (features.empty())
    throw ArgumentError("view representation of an empty view");
  const Eigen::Index dim = features.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& x : features) {
    if (x.size() != dim)
      throw ArgumentError("view representation: inconsistent dimensions");
    mean += x;
  }
  mean /= static_cast<double>(features.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (const auto& x : features) var += (x - mean).cwiseAbs2();
  var /= static_cast<double>(features.size());
  return ViewRepresentation{std::move(mean), var.cwiseSqrt()};
}

double view_distance(const ViewRepresentation& a,
                     const ViewRepresentation& b) {
  if (a.mean.size() != b.mean.size() ||
      a.std_dev.size() != b.std_dev.size())
    throw ArgumentError("view distance: representation lengths differ");
  return std::sqrt(((a.mean - b.mean).squaredNorm() +
                    (a.std_dev - b.std_dev).squaredNorm()) /
                   2.0);
}

int ViewPrototypeSet::prototype_of(int view) const {
  if (view < 1 || view > num_views())
    throw ArgumentError("view " + std::to_string(view) +
                        " has no prototype assignment");
  return view_to_prototype[view - 1];
}

ViewPrototypeSet cluster_views(const std::vector<Eigen::VectorXd>& raw,
                               const std::vector<int>& views, int num_views,
                               const FeatureExtractor& extractor, int j,
                               std::uint64_t seed) {
  if (j < 1 || j > num_views)
    throw ArgumentError("prototype count " + std::to_string(j) +
                        " must lie in [1, " + std::to_string(num_views) + "]");
  std::vector<Eigen::VectorXd> reps;
  for (int v = 1; v <= num_views; ++v)
    reps.push_back(representation_of(raw, views, extractor, v));

  const ClusterState state = kmeans(reps, j, seed);

  // Canonical prototype order: by smallest member view id.
  std::vector<int> first_view(j, num_views);
  for (int v = 0; v < num_views; ++v)
    first_view[state.assignments[v]] =
        std::min(first_view[state.assignments[v]], v);
  std::vector<int> order(j);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return first_view[a] < first_view[b]; });

  ViewPrototypeSet set;
  set.prototypes.resize(j);
  std::vector<int> new_id(j);
  for (int rank = 0; rank < j; ++rank) {
    new_id[order[rank]] = rank + 1;
    set.prototypes[rank] = state.centroids[order[rank]];
  }
  set.view_to_prototype.resize(num_views);
  for (int v = 0; v < num_views; ++v)
    set.view_to_prototype[v] = new_id[state.assignments[v]];
  return set;
}

ViewPrototypeSet recompute_prototypes(const std::vector<Eigen::VectorXd>& raw,
                                      const std::vector<int>& views,
                                      const ViewPrototypeSet& initial,
                                      const FeatureExtractor& extractor) {
  ViewPrototypeSet out = initial;
  const int num_views = initial.num_views();
  std::vector<Eigen::VectorXd> sums(initial.num_prototypes());
  std::vector<int> counts(initial.num_prototypes(), 0);
  for (int v = 1; v <= num_views; ++v) {
    const Eigen::VectorXd w =
        representation_of(raw, views, extractor, v);
    const int p = initial.prototype_of(v) - 1;
    if (counts[p] == 0)
      sums[p] = w;
    else
      sums[p] += w;
    ++counts[p];
  }
  for (int p = 0; p < initial.num_prototypes(); ++p) {
    if (counts[p] == 0)
      throw ArgumentError("prototype " + std::to_string(p + 1) +
                          " owns no view");
    out.prototypes[p] = sums[p] / counts[p];
  }
  return out;
}

std::vector<int> relabel_views(const std::vector<int>& views,
                               const ViewPrototypeSet& prototypes) {
  std::vector<int> out;
  out.reserve(views.size());
  for (int v : views) out.push_back(prototypes.prototype_of(v));
  return out;
}

int assign_unseen_view(const std::vector<Eigen::VectorXd>& raw,
                       const ViewPrototypeSet& prototypes,
                       const FeatureExtractor& extractor) {
  if (raw.empty()) throw ArgumentError("unseen view has no samples");
  std::vector<Eigen::VectorXd> features;
  features.reserve(raw.size());
  for (const auto& m : raw) features.push_back(extractor.forward(m));
  const Eigen::VectorXd w = view_representation(features).concatenated();
  int best = 1;
  double best_dist = (w - prototypes.prototypes[0]).norm();
  for (int p = 1; p < prototypes.num_prototypes(); ++p) {
    const double dist = (w - prototypes.prototypes[p]).norm();
    if (dist < best_dist) {
      best = p + 1;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace camel
