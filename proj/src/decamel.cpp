#include <camel/decamel.hpp>

#include <algorithm>
#include <camel/errors.hpp>
#include <cmath>
#include <numeric>
#include <string>

namespace camel {

namespace {

void check_batch(const std::vector<Eigen::VectorXd>& features,
                 const std::vector<int>& views,
                 const std::vector<int>& assignments,
                 const AsymmetricMetric& metric,
                 const std::vector<Eigen::VectorXd>& centroids) {
  if (features.empty()) throw ArgumentError("batch is empty");
  if (views.size() != features.size() ||
      assignments.size() != features.size())
    throw ArgumentError("batch arrays disagree in length");
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != metric.dim())
      throw ArgumentError("batch feature dim mismatch");
    if (assignments[i] < 0 ||
        assignments[i] >= static_cast<int>(centroids.size()))
      throw ArgumentError("batch assignment out of range");
  }
}

double intra_batch_mean(const std::vector<Eigen::VectorXd>& features,
                        const std::vector<int>& views,
                        const std::vector<int>& assignments,
                        const AsymmetricMetric& metric,
                        const std::vector<Eigen::VectorXd>& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i)
    total += (metric.project(features[i], views[i]) - centroids[assignments[i]])
                 .squaredNorm();
  return total / static_cast<double>(features.size());
}

}  // namespace

double decamel_loss(const std::vector<Eigen::VectorXd>& features,
                    const std::vector<int>& views,
                    const std::vector<int>& assignments,
                    const AsymmetricMetric& metric,
                    const std::vector<Eigen::VectorXd>& centroids,
                    const ViewCovariances& cov, double lambda, double gamma) {
  check_batch(features, views, assignments, metric, centroids);
  return intra_batch_mean(features, views, assignments, metric, centroids) +
         lambda * f_consistency(metric) + gamma * f_constraint(metric, cov);
}

Eigen::VectorXd grad_projected_sample(const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& c) {
  if (y.size() != c.size())
    throw ArgumentError("projected gradient: shape mismatch");
  return 2.0 * (y - c);
}

std::vector<Eigen::MatrixXd> grad_metric(
    const std::vector<Eigen::VectorXd>& features, const std::vector<int>& views,
    const std::vector<int>& assignments, const AsymmetricMetric& metric,
    const std::vector<Eigen::VectorXd>& centroids, const ViewCovariances& cov,
    double lambda, double gamma) {
  check_batch(features, views, assignments, metric, centroids);
  const int num_views = metric.num_views();
  const Eigen::Index dim = metric.dim();
  const Eigen::Index target = metric.target_dim();

  std::vector<Eigen::MatrixXd> grads(num_views,
                                     Eigen::MatrixXd::Zero(dim, target));
  const double inv_batch = 1.0 / static_cast<double>(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Eigen::VectorXd& x = features[i];
    const Eigen::VectorXd& c = centroids[assignments[i]];
    const Eigen::MatrixXd& u = metric.transform(views[i]);
    grads[views[i] - 1] +=
        2.0 * inv_batch * (x * (x.transpose() * u) - x * c.transpose());
  }

  Eigen::MatrixXd sum_u = Eigen::MatrixXd::Zero(dim, target);
  for (int v = 1; v <= num_views; ++v) sum_u += metric.transform(v);
  for (int v = 1; v <= num_views; ++v) {
    const Eigen::MatrixXd& u = metric.transform(v);
    grads[v - 1] += 2.0 * lambda * (num_views * u - sum_u);
    const Eigen::MatrixXd gram = u.transpose() * cov.view(v) * u;
    grads[v - 1] +=
        4.0 * gamma * cov.view(v) * u *
        (gram - Eigen::MatrixXd::Identity(target, target));
  }
  return grads;
}

Eigen::VectorXd backprop_feature(const Eigen::VectorXd& raw, int view,
                                 const AsymmetricMetric& metric,
                                 const Eigen::VectorXd& centroid,
                                 const FeatureExtractor& extractor) {
  if (extractor.output_dim() != metric.dim())
    throw ArgumentError("extractor output does not match the metric input");
  const Eigen::VectorXd x = extractor.forward(raw);
  const Eigen::MatrixXd& u = metric.transform(view);
  const Eigen::VectorXd upstream = 2.0 * (u * (u.transpose() * x - centroid));
  return extractor.backward(raw, upstream);
}

BatchSampler::BatchSampler(const std::vector<int>& views, int num_views,
                           int batch_size, std::uint64_t seed)
    : rng_(seed) {
  if (num_views < 1) throw ArgumentError("sampler: need at least one view");
  if (batch_size < num_views)
    throw ConfigError("batch size " + std::to_string(batch_size) +
                      " is smaller than the number of views " +
                      std::to_string(num_views));
  by_view_.assign(num_views, {});
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i] < 1 || views[i] > num_views)
      throw ArgumentError("sampler: view id out of range");
    by_view_[views[i] - 1].push_back(static_cast<int>(i));
  }
  for (int v = 0; v < num_views; ++v)
    if (by_view_[v].empty())
      throw ArgumentError("sampler: view " + std::to_string(v + 1) +
                          " has no samples");

  // Quotas: floor the proportional share, then hand the remainder out by
  // largest fractional part, ties to the lowest view id.
  const double total = static_cast<double>(views.size());
  quota_.assign(num_views, 0);
  std::vector<std::pair<double, int>> fractions;
  int assigned = 0;
  for (int v = 0; v < num_views; ++v) {
    const double share = by_view_[v].size() / total * batch_size;
    quota_[v] = static_cast<int>(std::floor(share));
    assigned += quota_[v];
    fractions.emplace_back(share - quota_[v], v);
  }
  std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int r = 0; r < batch_size - assigned; ++r)
    ++quota_[fractions[r].second];
}

std::vector<int> BatchSampler::next() {
  std::vector<int> batch;
  for (std::size_t v = 0; v < by_view_.size(); ++v)
    for (int draw = 0; draw < quota_[v]; ++draw)
      batch.push_back(by_view_[v][rng_.uniform_int(by_view_[v].size())]);
  return batch;
}

ClusterState refresh_clusters(const std::vector<Eigen::VectorXd>& raw,
                              const std::vector<int>& views,
                              const FeatureExtractor& extractor,
                              const AsymmetricMetric& metric,
                              const ClusterState& state) {
  std::vector<Eigen::VectorXd> projected;
  projected.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    projected.push_back(metric.project(extractor.forward(raw[i]), views[i]));
  return kmeans_refine(projected, state, 1);
}

TrainedModel decamel_train(const std::vector<Eigen::VectorXd>& raw,
                           const std::vector<int>& views,
                           const FeatureExtractor& extractor,
                           const AsymmetricMetric& init_metric,
                           const ClusterState& init_state,
                           const DecamelConfig& config) {
  return freeze_variants(raw, views, extractor, init_metric, init_state,
                         config, FreezeSpec{});
}

TrainedModel freeze_variants(const std::vector<Eigen::VectorXd>& raw,
                             const std::vector<int>& views,
                             const FeatureExtractor& extractor,
                             const AsymmetricMetric& init_metric,
                             const ClusterState& init_state,
                             const DecamelConfig& config, FreezeSpec freeze) {
  if (config.lambda < 0.0 || config.gamma < 0.0)
    throw ConfigError("training: weights must be non-negative");
  if (config.iterations < 1) throw ConfigError("training: iterations < 1");
  if (config.learning_rate < 0.0)
    throw ConfigError("training: negative learning rate");
  if (config.centroid_refresh_period < 1 ||
      config.centroid_refresh_period > config.iterations)
    throw ConfigError(
        "training: refresh period must be in [1, iterations]");
  if (raw.empty() || raw.size() != views.size())
    throw ArgumentError("training: empty data or view list mismatch");
  if (extractor.input_dim() != raw.front().size())
    throw ArgumentError("training: raw dim does not match the extractor");
  if (extractor.output_dim() != init_metric.dim())
    throw ArgumentError("training: extractor output does not match the metric");
  if (init_state.size() != raw.size())
    throw ArgumentError("training: cluster state size mismatch");

  const int num_views = init_metric.num_views();
  std::unique_ptr<FeatureExtractor> net = extractor.clone();
  AsymmetricMetric metric = init_metric;
  ClusterState state = init_state;

  // The constraint covariances stay fixed at their initial-feature values.
  std::vector<Eigen::VectorXd> initial_features;
  initial_features.reserve(raw.size());
  for (const auto& m : raw) initial_features.push_back(net->forward(m));
  const ViewCovariances cov =
      view_covariances(initial_features, views, num_views);

  BatchSampler sampler(views, num_views, config.batch_size,
                       derive_seed(config.seed, "sgd"));
  std::vector<double> trace;
  trace.reserve(config.iterations);

  for (long step = 0; step < config.iterations; ++step) {
    const double lr = step >= kLearningRateDecayStep
                          ? config.learning_rate / 5.0
                          : config.learning_rate;
    const std::vector<int> batch = sampler.next();

    std::vector<Eigen::VectorXd> feats;
    std::vector<int> batch_views, batch_assign;
    feats.reserve(batch.size());
    for (int idx : batch) {
      feats.push_back(net->forward(raw[idx]));
      batch_views.push_back(views[idx]);
      batch_assign.push_back(state.assignments[idx]);
    }

    const double loss =
        decamel_loss(feats, batch_views, batch_assign, metric, state.centroids,
                     cov, config.lambda, config.gamma);
    if (!std::isfinite(loss))
      throw TrainingError("loss became non-finite", step);
    trace.push_back(loss);

    std::vector<Eigen::MatrixXd> metric_grads;
    if (!freeze.metric)
      metric_grads =
          grad_metric(feats, batch_views, batch_assign, metric,
                      state.centroids, cov, config.lambda, config.gamma);

    if (!freeze.extractor) {
      Eigen::VectorXd param_grad =
          Eigen::VectorXd::Zero(net->parameters().size());
      for (std::size_t j = 0; j < batch.size(); ++j)
        param_grad +=
            backprop_feature(raw[batch[j]], batch_views[j], metric,
                             state.centroids[batch_assign[j]], *net);
      param_grad /= static_cast<double>(batch.size());
      net->apply_update(-lr * param_grad);
    }
    if (!freeze.metric) {
      for (int v = 1; v <= num_views; ++v)
        metric.transform(v) -= lr * metric_grads[v - 1];
    }

    if ((step + 1) % config.centroid_refresh_period == 0)
      state = refresh_clusters(raw, views, *net, metric, state);
  }

  return TrainedModel{std::move(net), std::move(metric), std::move(state),
                      std::move(trace)};
}

}  // namespace camel
