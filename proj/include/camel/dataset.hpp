#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace camel {

// One feature vector observed under a particular acquisition view. Views are
// numbered from 1. Identity labels are optional; they are consumed by the
// evaluation protocols and by the semi-supervised cluster pinning, never by
// the unsupervised fits.
struct ViewedSample {
  Eigen::VectorXd features;
  int view = 1;
  std::optional<int> identity;
};

// An immutable multi-view sample collection. Construction validates that all
// feature vectors share one dimension and are finite, and that every view id
// in [1, num_views] occurs at least once.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<ViewedSample> samples, int num_views);

  int num_views() const { return num_views_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(samples_.size()); }
  bool empty() const { return samples_.empty(); }

  const ViewedSample& operator[](int i) const { return samples_[i]; }
  const std::vector<ViewedSample>& samples() const { return samples_; }

  // Sorted distinct identity labels (unlabelled samples contribute nothing).
  std::vector<int> identities() const;

  // Convenience columns for the numeric code paths.
  std::vector<Eigen::VectorXd> feature_vectors() const;
  std::vector<int> views() const;

 private:
  std::vector<ViewedSample> samples_;
  int num_views_ = 0;
  int dim_ = 0;
};

// Synthetic multi-view generator. Identity prototypes are drawn once, each
// observation adds within-identity noise, and every view distorts the result
// with a fixed affine map: a random rotation blended toward the identity by
// (1 - view_distortion_strength) plus an offset scaled by the same strength.
// View 1 is the undistorted reference view. Fully determined by the seed.
struct SyntheticConfig {
  int identities = 20;
  int views = 2;
  int images_per_identity_per_view = 4;
  int dim = 8;
  double identity_spread = 3.0;
  double within_identity_noise = 0.3;
  double view_distortion_strength = 0.8;
  std::uint64_t seed = 0;
};

Dataset generate_synthetic(const SyntheticConfig& config);

// CSV exchange format: header "view,identity,f1,...,fd", one sample per line,
// identity left empty for unlabelled samples. Values are written with enough
// digits to round-trip exactly.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& dataset, const std::string& path);

// Splits by identity: a seeded shuffle of the labelled identities assigns
// round(train_fraction * P) of them (at least one, at most P - 1) to the
// training half. Unlabelled samples stay in the training half.
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset,
                                             double train_fraction,
                                             std::uint64_t seed);

// Full-precision decimal formatting shared by the CSV writers.
std::string format_double(double value);

}  // namespace camel
