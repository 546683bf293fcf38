#include "camel/camel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "camel/errors.hpp"
#include "camel/rng.hpp"

namespace camel {

namespace {

void check_inputs(const std::vector<Eigen::VectorXd>& features,
                  const std::vector<int>& views, int num_views) {
  if (features.empty()) throw ArgumentError("fit: no samples");
  if (features.size() != views.size())
    throw ArgumentError("fit: features/views size mismatch");
  if (num_views < 1) throw ArgumentError("fit: num_views must be >= 1");
  const Eigen::Index dim = features[0].size();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim)
      throw ArgumentError("fit: inconsistent feature dimension");
    if (!features[i].allFinite())
      throw ArgumentError("fit: non-finite feature values");
    if (views[i] < 1 || views[i] > num_views)
      throw ArgumentError("fit: view id out of range");
  }
}

std::vector<Eigen::VectorXd> project_all(
    const std::vector<Eigen::VectorXd>& features, const std::vector<int>& views,
    const AsymmetricMetric& metric) {
  std::vector<Eigen::VectorXd> projected;
  projected.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i)
    projected.push_back(metric.project(features[i], views[i]));
  return projected;
}

// Centroids as cluster means of the given points, assignments unchanged.
void reset_centroids_to_means(const std::vector<Eigen::VectorXd>& points,
                              ClusterState& state) {
  const int k = state.num_clusters();
  std::vector<int> counts(k, 0);
  std::vector<Eigen::VectorXd> sums(k,
                                    Eigen::VectorXd::Zero(points[0].size()));
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    sums[state.assignments[i]] += points[i];
    ++counts[state.assignments[i]];
  }
  state.centroids.assign(k, Eigen::VectorXd::Zero(points[0].size()));
  for (int c = 0; c < k; ++c)
    if (counts[c] > 0) state.centroids[c] = sums[c] / counts[c];
}

}  // namespace

double f_intra(const std::vector<Eigen::VectorXd>& features,
               const std::vector<int>& views, const AsymmetricMetric& metric,
               const ClusterState& state) {
  check_inputs(features, views, metric.num_views());
  if (state.size() != static_cast<int>(features.size()))
    throw ArgumentError("f_intra: state size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Eigen::VectorXd y = metric.project(features[i], views[i]);
    sum += (y - state.centroids[state.assignments[i]]).squaredNorm();
  }
  return sum / static_cast<double>(features.size());
}

double f_consistency(const AsymmetricMetric& metric) {
  double sum = 0.0;
  for (int v = 1; v <= metric.num_views(); ++v)
    for (int w = v + 1; w <= metric.num_views(); ++w)
      sum += (metric.transform(v) - metric.transform(w)).squaredNorm();
  return sum;
}

double f_constraint(const AsymmetricMetric& metric,
                    const ViewCovariances& covariances) {
  if (covariances.num_views() != metric.num_views())
    throw ArgumentError("f_constraint: view count mismatch");
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(metric.target_dim(), metric.target_dim());
  double sum = 0.0;
  for (int v = 1; v <= metric.num_views(); ++v) {
    const Eigen::MatrixXd& u = metric.transform(v);
    sum += (u.transpose() * covariances.view(v) * u - eye).squaredNorm();
  }
  return sum;
}

double camel_objective(const std::vector<Eigen::VectorXd>& features,
                       const std::vector<int>& views,
                       const AsymmetricMetric& metric,
                       const ClusterState& state, double lambda) {
  return f_intra(features, views, metric, state) +
         lambda * f_consistency(metric);
}

double camel_objective_trace(const Eigen::MatrixXd& lifted,
                             const Eigen::MatrixXd& indicator,
                             const AsymmetricMetric& metric,
                             const Eigen::MatrixXd& consistency,
                             double lambda) {
  const Eigen::MatrixXd stacked = metric.stacked();
  if (stacked.rows() != lifted.rows())
    throw ArgumentError("objective: stacked/lifted dimension mismatch");
  if (indicator.rows() != lifted.cols())
    throw ArgumentError("objective: indicator row count mismatch");
  const double n = static_cast<double>(lifted.cols());
  const Eigen::MatrixXd projected = stacked.transpose() * lifted;
  const double scatter = projected.squaredNorm() / n;
  const double explained = (projected * indicator).squaredNorm() / n;
  const double coupling =
      (stacked.transpose() * consistency * stacked).trace();
  return scatter - explained + lambda * coupling;
}

AsymmetricMetric eigen_step(const Eigen::MatrixXd& lifted,
                            const Eigen::MatrixXd& indicator,
                            const ViewCovariances& covariances,
                            const Eigen::MatrixXd& consistency, double lambda,
                            int target_dim, int num_views) {
  const Eigen::Index stacked_dim = lifted.rows();
  const Eigen::Index n = lifted.cols();
  if (num_views < 1 || stacked_dim % num_views != 0)
    throw ArgumentError("eigen_step: lifted rows not divisible by num_views");
  if (target_dim < 1 || target_dim > stacked_dim)
    throw ArgumentError("eigen_step: target_dim out of range");
  if (indicator.rows() != n)
    throw ArgumentError("eigen_step: indicator row count mismatch");
  if (consistency.rows() != stacked_dim ||
      consistency.cols() != stacked_dim)
    throw ArgumentError("eigen_step: consistency shape mismatch");
  if (lambda < 0.0) throw ArgumentError("eigen_step: lambda must be >= 0");

  const Eigen::MatrixXd clustered = lifted * indicator;  // stacked_dim x K
  Eigen::MatrixXd quad = lambda * consistency;
  quad.noalias() += lifted * lifted.transpose() / static_cast<double>(n);
  quad.noalias() -=
      clustered * clustered.transpose() / static_cast<double>(n);
  quad = ((quad + quad.transpose()) / 2.0).eval();
  if (!quad.allFinite())
    throw NumericError("eigen_step: non-finite quadratic form");

  const Eigen::MatrixXd block = covariances.block_diagonal();
  if (block.rows() != stacked_dim)
    throw ArgumentError("eigen_step: covariance dimension mismatch");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      quad, block, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigen_step: eigensolver failed");

  // Eigenvalues come back ascending and the eigenvectors are normalized
  // against the block covariance, so scaling by sqrt(num_views) lands the
  // stack exactly on the relaxed constraint surface.
  Eigen::MatrixXd stacked =
      solver.eigenvectors().leftCols(target_dim) *
      std::sqrt(static_cast<double>(num_views));
  for (int j = 0; j < target_dim; ++j) {
    Eigen::Index largest = 0;
    stacked.col(j).cwiseAbs().maxCoeff(&largest);
    if (stacked(largest, j) < 0.0) stacked.col(j) = -stacked.col(j);
  }

  const Eigen::MatrixXd gram = stacked.transpose() * block * stacked;
  const Eigen::MatrixXd target =
      static_cast<double>(num_views) *
      Eigen::MatrixXd::Identity(target_dim, target_dim);
  if ((gram - target).norm() > 1e-6)
    throw NumericError("eigen_step: constraint residual too large");

  return AsymmetricMetric::from_stacked(stacked, num_views);
}

namespace {

CamelFitResult run_alternation(const std::vector<Eigen::VectorXd>& features,
                               const std::vector<int>& views, int num_views,
                               const CamelConfig& config,
                               ClusterState state) {
  const int dim = static_cast<int>(features[0].size());
  const int target_dim = config.target_dim == 0 ? dim : config.target_dim;
  if (target_dim < 1 || target_dim > num_views * dim)
    throw ConfigError("fit: target_dim out of range");
  if (config.max_alternations < 1)
    throw ConfigError("fit: max_alternations must be >= 1");
  if (config.tolerance <= 0.0)
    throw ConfigError("fit: tolerance must be positive");
  if (config.lambda < 0.0) throw ConfigError("fit: lambda must be >= 0");

  const ViewCovariances covariances =
      view_covariances(features, views, num_views);
  const Eigen::MatrixXd lifted = lift_all(features, views, num_views);
  const Eigen::MatrixXd consistency =
      build_consistency_matrix(num_views, dim);

  CamelFitResult result;
  result.state = std::move(state);
  double previous_end = 0.0;
  for (int alt = 1; alt <= config.max_alternations; ++alt) {
    result.alternations = alt;
    const Eigen::MatrixXd indicator = build_indicator(result.state);
    result.metric = eigen_step(lifted, indicator, covariances, consistency,
                               config.lambda, target_dim, num_views);
    result.objective_trace.push_back(camel_objective_trace(
        lifted, indicator, result.metric, consistency, config.lambda));

    // Cluster step: keep the partition, recompute the centroids in the new
    // shared space, then run warm-started Lloyd passes. Starting from the
    // previous assignments is what keeps the recorded objective monotone.
    const std::vector<Eigen::VectorXd> projected =
        project_all(features, views, result.metric);
    reset_centroids_to_means(projected, result.state);
    result.state = kmeans_refine(projected, std::move(result.state),
                                 config.kmeans_max_iterations);
    const double objective = camel_objective_trace(
        lifted, build_indicator(result.state), result.metric, consistency,
        config.lambda);
    result.objective_trace.push_back(objective);

    if (alt > 1) {
      const double change =
          std::abs(objective - previous_end) /
          std::max(std::abs(previous_end), 1e-12);
      if (change < config.tolerance) {
        result.converged = true;
        break;
      }
    }
    previous_end = objective;
  }
  return result;
}

}  // namespace

CamelFitResult camel_fit(const std::vector<Eigen::VectorXd>& features,
                         const std::vector<int>& views, int num_views,
                         const CamelConfig& config) {
  check_inputs(features, views, num_views);
  const int k =
      std::min(config.clusters, static_cast<int>(features.size()));
  if (k < 1) throw ConfigError("fit: clusters must be >= 1");
  ClusterState initial =
      kmeans(features, k, derive_seed(config.seed, "camel-init"),
             config.kmeans_max_iterations);
  return run_alternation(features, views, num_views, config,
                         std::move(initial));
}

CamelFitResult camel_fit(const std::vector<Eigen::VectorXd>& features,
                         const std::vector<int>& views, int num_views,
                         const CamelConfig& config, ClusterState initial) {
  check_inputs(features, views, num_views);
  if (initial.size() != static_cast<int>(features.size()))
    throw ArgumentError("fit: initial state size mismatch");
  return run_alternation(features, views, num_views, config,
                         std::move(initial));
}

CamelFitResult symmetric_fit(const std::vector<Eigen::VectorXd>& features,
                             const std::vector<int>& views, int num_views,
                             const CamelConfig& config) {
  check_inputs(features, views, num_views);
  const std::vector<int> collapsed(views.size(), 1);
  CamelFitResult result = camel_fit(features, collapsed, 1, config);
  std::vector<Eigen::MatrixXd> tied(num_views, result.metric.transform(1));
  result.metric = AsymmetricMetric(std::move(tied));
  return result;
}

}  // namespace camel
