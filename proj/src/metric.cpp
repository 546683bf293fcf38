#include "camel/metric.hpp"

#include <string>

#include "camel/errors.hpp"

namespace camel {

AsymmetricMetric::AsymmetricMetric(std::vector<Eigen::MatrixXd> transforms)
    : transforms_(std::move(transforms)) {
  if (transforms_.empty())
    throw ArgumentError("metric: need at least one view transform");
  const Eigen::Index rows = transforms_[0].rows();
  const Eigen::Index cols = transforms_[0].cols();
  if (rows < 1 || cols < 1)
    throw ArgumentError("metric: transforms must be non-empty matrices");
  for (const Eigen::MatrixXd& t : transforms_) {
    if (t.rows() != rows || t.cols() != cols)
      throw ArgumentError("metric: view transforms must share one shape");
    if (!t.allFinite())
      throw ArgumentError("metric: transform has non-finite entries");
  }
}

AsymmetricMetric AsymmetricMetric::identity(int num_views, int dim,
                                            int target_dim) {
  if (num_views < 1 || dim < 1 || target_dim < 1)
    throw ArgumentError("metric: dimensions must be positive");
  std::vector<Eigen::MatrixXd> transforms(
      num_views, Eigen::MatrixXd::Identity(dim, target_dim));
  return AsymmetricMetric(std::move(transforms));
}

AsymmetricMetric AsymmetricMetric::from_stacked(const Eigen::MatrixXd& stacked,
                                                int num_views) {
  if (num_views < 1) throw ArgumentError("metric: num_views must be >= 1");
  if (stacked.rows() % num_views != 0)
    throw ArgumentError("metric: stacked rows not divisible by num_views");
  const Eigen::Index dim = stacked.rows() / num_views;
  std::vector<Eigen::MatrixXd> transforms;
  transforms.reserve(num_views);
  for (int v = 0; v < num_views; ++v)
    transforms.push_back(stacked.middleRows(v * dim, dim));
  return AsymmetricMetric(std::move(transforms));
}

int AsymmetricMetric::dim() const {
  return transforms_.empty() ? 0 : static_cast<int>(transforms_[0].rows());
}

int AsymmetricMetric::target_dim() const {
  return transforms_.empty() ? 0 : static_cast<int>(transforms_[0].cols());
}

const Eigen::MatrixXd& AsymmetricMetric::transform(int view) const {
  if (view < 1 || view > num_views())
    throw ArgumentError("metric: unknown view id " + std::to_string(view));
  return transforms_[view - 1];
}

Eigen::MatrixXd& AsymmetricMetric::transform(int view) {
  if (view < 1 || view > num_views())
    throw ArgumentError("metric: unknown view id " + std::to_string(view));
  return transforms_[view - 1];
}

Eigen::MatrixXd AsymmetricMetric::stacked() const {
  Eigen::MatrixXd result(static_cast<Eigen::Index>(num_views()) * dim(),
                         target_dim());
  for (int v = 0; v < num_views(); ++v)
    result.middleRows(static_cast<Eigen::Index>(v) * dim(), dim()) =
        transforms_[v];
  return result;
}

Eigen::VectorXd AsymmetricMetric::project(const Eigen::VectorXd& x,
                                          int view) const {
  if (x.size() != dim())
    throw ArgumentError("metric: sample dimension mismatch");
  return transform(view).transpose() * x;
}

const Eigen::MatrixXd& ViewCovariances::view(int v) const {
  if (v < 1 || v > num_views())
    throw ArgumentError("covariances: unknown view id " + std::to_string(v));
  return per_view[v - 1];
}

Eigen::MatrixXd ViewCovariances::block_diagonal() const {
  if (per_view.empty()) throw ArgumentError("covariances: empty");
  const Eigen::Index dim = per_view[0].rows();
  Eigen::MatrixXd block =
      Eigen::MatrixXd::Zero(num_views() * dim, num_views() * dim);
  for (int v = 0; v < num_views(); ++v)
    block.block(v * dim, v * dim, dim, dim) = per_view[v];
  return block;
}

ViewCovariances view_covariances(const std::vector<Eigen::VectorXd>& features,
                                 const std::vector<int>& views,
                                 int num_views) {
  if (features.empty()) throw ArgumentError("covariances: no samples");
  if (features.size() != views.size())
    throw ArgumentError("covariances: features/views size mismatch");
  if (num_views < 1) throw ArgumentError("covariances: num_views must be >= 1");
  const Eigen::Index dim = features[0].size();

  ViewCovariances cov;
  cov.per_view.assign(num_views, Eigen::MatrixXd::Zero(dim, dim));
  std::vector<int> counts(num_views, 0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int v = views[i];
    if (v < 1 || v > num_views)
      throw ArgumentError("covariances: view id out of range");
    if (features[i].size() != dim)
      throw ArgumentError("covariances: inconsistent feature dimension");
    cov.per_view[v - 1].noalias() +=
        features[i] * features[i].transpose();
    ++counts[v - 1];
  }
  for (int v = 0; v < num_views; ++v) {
    if (counts[v] == 0)
      throw ArgumentError("covariances: view " + std::to_string(v + 1) +
                          " has no samples");
    cov.per_view[v] /= counts[v];
    cov.per_view[v] += Eigen::MatrixXd::Identity(dim, dim);
  }
  return cov;
}

Eigen::MatrixXd pooled_covariance(
    const std::vector<Eigen::VectorXd>& features) {
  if (features.empty()) throw ArgumentError("covariances: no samples");
  const Eigen::Index dim = features[0].size();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const Eigen::VectorXd& x : features) {
    if (x.size() != dim)
      throw ArgumentError("covariances: inconsistent feature dimension");
    cov.noalias() += x * x.transpose();
  }
  cov /= static_cast<double>(features.size());
  cov += Eigen::MatrixXd::Identity(dim, dim);
  return cov;
}

Eigen::VectorXd lift_sample(const Eigen::VectorXd& x, int view,
                            int num_views) {
  if (num_views < 1) throw ArgumentError("lift: num_views must be >= 1");
  if (view < 1 || view > num_views)
    throw ArgumentError("lift: view id out of range");
  Eigen::VectorXd lifted =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_views) * x.size());
  lifted.segment(static_cast<Eigen::Index>(view - 1) * x.size(), x.size()) = x;
  return lifted;
}

Eigen::MatrixXd lift_all(const std::vector<Eigen::VectorXd>& features,
                         const std::vector<int>& views, int num_views) {
  if (features.empty()) throw ArgumentError("lift: no samples");
  if (features.size() != views.size())
    throw ArgumentError("lift: features/views size mismatch");
  const Eigen::Index dim = features[0].size();
  Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(num_views) * dim, features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int v = views[i];
    if (v < 1 || v > num_views)
      throw ArgumentError("lift: view id out of range");
    if (features[i].size() != dim)
      throw ArgumentError("lift: inconsistent feature dimension");
    lifted.block((v - 1) * dim, static_cast<Eigen::Index>(i), dim, 1) =
        features[i];
  }
  return lifted;
}

Eigen::MatrixXd build_consistency_matrix(int num_views, int dim) {
  if (num_views < 1 || dim < 1)
    throw ArgumentError("consistency: dimensions must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(num_views) * dim;
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
  for (int v = 0; v < num_views; ++v)
    for (int w = 0; w < num_views; ++w) {
      const double scale = (v == w) ? num_views - 1.0 : -1.0;
      coupling.block(v * dim, w * dim, dim, dim) = scale * eye;
    }
  return coupling;
}

}  // namespace camel
