#pragma once

#include <Eigen/Dense>
#include <vector>

namespace camel {

// Per-view linear maps into one shared target space. transform(v) has shape
// dim x target_dim; comparing samples from views v and w means comparing
// transform(v)' * x against transform(w)' * y with a plain Euclidean norm.
class AsymmetricMetric {
 public:
  AsymmetricMetric() = default;
  explicit AsymmetricMetric(std::vector<Eigen::MatrixXd> transforms);

  static AsymmetricMetric identity(int num_views, int dim, int target_dim);

  // Splits a (num_views * dim) x target_dim stack of view blocks.
  static AsymmetricMetric from_stacked(const Eigen::MatrixXd& stacked,
                                       int num_views);

  int num_views() const { return static_cast<int>(transforms_.size()); }
  int dim() const;
  int target_dim() const;

  const Eigen::MatrixXd& transform(int view) const;  // views are 1-based
  Eigen::MatrixXd& transform(int view);

  // View blocks stacked vertically in view order, (num_views * dim) x target_dim.
  Eigen::MatrixXd stacked() const;

  Eigen::VectorXd project(const Eigen::VectorXd& x, int view) const;

 private:
  std::vector<Eigen::MatrixXd> transforms_;
};

// Per-view second-moment matrices with a +I ridge, so each is positive
// definite with eigenvalues >= 1.
struct ViewCovariances {
  std::vector<Eigen::MatrixXd> per_view;  // dim x dim each

  int num_views() const { return static_cast<int>(per_view.size()); }
  const Eigen::MatrixXd& view(int v) const;  // 1-based
  Eigen::MatrixXd block_diagonal() const;
};

ViewCovariances view_covariances(const std::vector<Eigen::VectorXd>& features,
                                 const std::vector<int>& views, int num_views);

// Second moment over all samples regardless of view, plus the same ridge.
Eigen::MatrixXd pooled_covariance(const std::vector<Eigen::VectorXd>& features);

// Embeds x into the stacked space: zero everywhere except block `view`.
Eigen::VectorXd lift_sample(const Eigen::VectorXd& x, int view, int num_views);

// All samples lifted and packed as columns, (num_views * dim) x N.
Eigen::MatrixXd lift_all(const std::vector<Eigen::VectorXd>& features,
                         const std::vector<int>& views, int num_views);

// Coupling matrix of the pairwise transform-consistency penalty:
// (num_views - 1) * I on the diagonal blocks, -I off the diagonal. The
// quadratic form of the stacked transforms in this matrix equals the sum of
// squared Frobenius differences over unordered view pairs.
Eigen::MatrixXd build_consistency_matrix(int num_views, int dim);

}  // namespace camel
