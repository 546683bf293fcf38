#pragma once

#include <Eigen/Dense>
#include <camel/camel.hpp>
#include <camel/clustering.hpp>
#include <camel/extractor.hpp>
#include <camel/metric.hpp>
#include <camel/rng.hpp>
#include <cstdint>
#include <memory>
#include <vector>

namespace camel {

struct DecamelConfig {
  double lambda = 0.01;
  double gamma = 10.0;
  long iterations = 10000;
  double learning_rate = 0.005;
  int batch_size = 216;
  int centroid_refresh_period = 100;
  std::uint64_t seed = 0;
};

// After this many steps the learning rate drops to a fifth.
inline constexpr long kLearningRateDecayStep = 5000;

struct FreezeSpec {
  bool metric = false;
  bool extractor = false;
};

struct TrainedModel {
  std::unique_ptr<FeatureExtractor> extractor;
  AsymmetricMetric metric;
  ClusterState state;
  std::vector<double> loss_trace;
};

// Mini-batch loss: batch-mean intra-cluster scatter in the projected space
// plus the cross-view coupling and covariance-constraint penalties.
// `assignments` gives each batch sample's cached cluster.
double decamel_loss(const std::vector<Eigen::VectorXd>& features,
                    const std::vector<int>& views,
                    const std::vector<int>& assignments,
                    const AsymmetricMetric& metric,
                    const std::vector<Eigen::VectorXd>& centroids,
                    const ViewCovariances& cov, double lambda, double gamma);

// Gradient of ||y - c||^2 in the projected space.
Eigen::VectorXd grad_projected_sample(const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& c);

// Per-view gradients of decamel_loss with respect to each transform.
std::vector<Eigen::MatrixXd> grad_metric(
    const std::vector<Eigen::VectorXd>& features, const std::vector<int>& views,
    const std::vector<int>& assignments, const AsymmetricMetric& metric,
    const std::vector<Eigen::VectorXd>& centroids, const ViewCovariances& cov,
    double lambda, double gamma);

// Chain rule through the extractor for one sample's intra term:
// feeds 2 U_v (U_v' f(raw) - c) into the extractor's backward pass.
Eigen::VectorXd backprop_feature(const Eigen::VectorXd& raw, int view,
                                 const AsymmetricMetric& metric,
                                 const Eigen::VectorXd& centroid,
                                 const FeatureExtractor& extractor);

// Stratified mini-batch index source. Each batch carries a fixed per-view
// quota proportional to the view's share of the data (largest-remainder
// rounding) and draws uniformly with replacement inside each view.
class BatchSampler {
 public:
  BatchSampler(const std::vector<int>& views, int num_views, int batch_size,
               std::uint64_t seed);

  std::vector<int> next();
  const std::vector<int>& view_quota() const { return quota_; }

 private:
  std::vector<std::vector<int>> by_view_;
  std::vector<int> quota_;
  Rng rng_;
};

// One assignment/update pass over the whole dataset in the current
// projected space, starting from the previous state.
ClusterState refresh_clusters(const std::vector<Eigen::VectorXd>& raw,
                              const std::vector<int>& views,
                              const FeatureExtractor& extractor,
                              const AsymmetricMetric& metric,
                              const ClusterState& state);

TrainedModel decamel_train(const std::vector<Eigen::VectorXd>& raw,
                           const std::vector<int>& views,
                           const FeatureExtractor& extractor,
                           const AsymmetricMetric& init_metric,
                           const ClusterState& init_state,
                           const DecamelConfig& config);

TrainedModel freeze_variants(const std::vector<Eigen::VectorXd>& raw,
                             const std::vector<int>& views,
                             const FeatureExtractor& extractor,
                             const AsymmetricMetric& init_metric,
                             const ClusterState& init_state,
                             const DecamelConfig& config, FreezeSpec freeze);

}  // namespace camel
