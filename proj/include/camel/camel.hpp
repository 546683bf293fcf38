#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "camel/clustering.hpp"
#include "camel/metric.hpp"

namespace camel {

struct CamelConfig {
  double lambda = 0.01;   // weight of the transform-consistency penalty
  int clusters = 500;     // clamped to the sample count
  int target_dim = 0;     // 0 = feature dimension
  int max_alternations = 20;
  double tolerance = 1e-6;  // relative objective change at convergence
  int kmeans_max_iterations = 100;
  std::uint64_t seed = 0;
};

// Within-cluster scatter of the projected samples around the state's
// centroids, averaged over the number of samples.
double f_intra(const std::vector<Eigen::VectorXd>& features,
               const std::vector<int>& views, const AsymmetricMetric& metric,
               const ClusterState& state);

// Sum of squared Frobenius differences over unordered view pairs.
double f_consistency(const AsymmetricMetric& metric);

// How far each view's projected second moment sits from the identity.
double f_constraint(const AsymmetricMetric& metric,
                    const ViewCovariances& covariances);

double camel_objective(const std::vector<Eigen::VectorXd>& features,
                       const std::vector<int>& views,
                       const AsymmetricMetric& metric,
                       const ClusterState& state, double lambda);

// The same objective evaluated through the lifted trace identity. Agrees with
// camel_objective exactly when the state's centroids are the cluster means of
// the projected samples.
double camel_objective_trace(const Eigen::MatrixXd& lifted,
                             const Eigen::MatrixXd& indicator,
                             const AsymmetricMetric& metric,
                             const Eigen::MatrixXd& consistency,
                             double lambda);

// Exact minimization over the transforms with the partition held fixed:
// solves the generalized symmetric eigenproblem of the lifted quadratic form
// against the block covariance, keeps the target_dim smallest eigenpairs, and
// scales each column u so that u' * blockcov * u = num_views. Column signs
// are fixed so the entry of largest magnitude is positive.
AsymmetricMetric eigen_step(const Eigen::MatrixXd& lifted,
                            const Eigen::MatrixXd& indicator,
                            const ViewCovariances& covariances,
                            const Eigen::MatrixXd& consistency, double lambda,
                            int target_dim, int num_views);

struct CamelFitResult {
  AsymmetricMetric metric;
  ClusterState state;
  std::vector<double> objective_trace;  // recorded after every half-step
  bool converged = false;
  int alternations = 0;
};

// Alternating minimization: seeded k-means on the input features fixes the
// initial partition, then eigen steps and warm-started k-means passes in the
// shared space alternate until the objective settles or max_alternations is
// reached. Deterministic for a fixed config and seed.
CamelFitResult camel_fit(const std::vector<Eigen::VectorXd>& features,
                         const std::vector<int>& views, int num_views,
                         const CamelConfig& config);

// Same, but starting from a caller-supplied partition (semi-supervised
// pinning enters through here).
CamelFitResult camel_fit(const std::vector<Eigen::VectorXd>& features,
                         const std::vector<int>& views, int num_views,
                         const CamelConfig& config, ClusterState initial);

// Single shared transform for all views: the fit runs with every sample
// mapped to one view, so the constraint uses the pooled covariance, and the
// resulting transform is replicated per view.
CamelFitResult symmetric_fit(const std::vector<Eigen::VectorXd>& features,
                             const std::vector<int>& views, int num_views,
                             const CamelConfig& config);

}  // namespace camel
