#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>

namespace camel {

// Differentiable parametric map from raw inputs to feature vectors.
// Parameters are exposed as one flat vector so optimizers and serializers
// stay agnostic of the architecture.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;

  virtual std::string kind() const = 0;
  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;

  virtual Eigen::VectorXd parameters() const = 0;
  virtual void set_parameters(const Eigen::VectorXd& params) = 0;

  virtual Eigen::VectorXd forward(const Eigen::VectorXd& raw) const = 0;

  // Jacobian-transpose product: maps d(loss)/d(feature) to d(loss)/d(params).
  virtual Eigen::VectorXd backward(const Eigen::VectorXd& raw,
                                   const Eigen::VectorXd& upstream) const = 0;

  virtual std::unique_ptr<FeatureExtractor> clone() const = 0;

  void apply_update(const Eigen::VectorXd& step);
};

// f(m) = m + b, bias initialized to zero.
class IdentityExtractor : public FeatureExtractor {
 public:
  explicit IdentityExtractor(int dim);

  std::string kind() const override { return "identity"; }
  int input_dim() const override { return static_cast<int>(bias_.size()); }
  int output_dim() const override { return static_cast<int>(bias_.size()); }
  Eigen::VectorXd parameters() const override { return bias_; }
  void set_parameters(const Eigen::VectorXd& params) override;
  Eigen::VectorXd forward(const Eigen::VectorXd& raw) const override;
  Eigen::VectorXd backward(const Eigen::VectorXd& raw,
                           const Eigen::VectorXd& upstream) const override;
  std::unique_ptr<FeatureExtractor> clone() const override;

 private:
  Eigen::VectorXd bias_;
};

// f(m) = W m, W initialized to the rectangular identity.
class LinearExtractor : public FeatureExtractor {
 public:
  LinearExtractor(int input_dim, int output_dim);

  std::string kind() const override { return "linear"; }
  int input_dim() const override { return static_cast<int>(weight_.cols()); }
  int output_dim() const override { return static_cast<int>(weight_.rows()); }
  Eigen::VectorXd parameters() const override;
  void set_parameters(const Eigen::VectorXd& params) override;
  Eigen::VectorXd forward(const Eigen::VectorXd& raw) const override;
  Eigen::VectorXd backward(const Eigen::VectorXd& raw,
                           const Eigen::VectorXd& upstream) const override;
  std::unique_ptr<FeatureExtractor> clone() const override;

  const Eigen::MatrixXd& weight() const { return weight_; }

 private:
  Eigen::MatrixXd weight_;
};

// One hidden ReLU layer: f(m) = W2 relu(W1 m + b1) + b2.
// Weights drawn from the seeded Xavier-uniform range, biases zero.
class MlpExtractor : public FeatureExtractor {
 public:
  MlpExtractor(int input_dim, int hidden_dim, int output_dim,
               std::uint64_t seed);

  std::string kind() const override { return "mlp"; }
  int input_dim() const override { return static_cast<int>(w1_.cols()); }
  int output_dim() const override { return static_cast<int>(w2_.rows()); }
  int hidden_dim() const { return static_cast<int>(w1_.rows()); }
  Eigen::VectorXd parameters() const override;
  void set_parameters(const Eigen::VectorXd& params) override;
  Eigen::VectorXd forward(const Eigen::VectorXd& raw) const override;
  Eigen::VectorXd backward(const Eigen::VectorXd& raw,
                           const Eigen::VectorXd& upstream) const override;
  std::unique_ptr<FeatureExtractor> clone() const override;

 private:
  Eigen::MatrixXd w1_;
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;
  Eigen::VectorXd b2_;
};

}  // namespace camel
