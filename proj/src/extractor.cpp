#include <camel/extractor.hpp>

#include <camel/errors.hpp>
#include <camel/rng.hpp>
#include <cmath>
#include <utility>

namespace camel {

namespace {

void check_size(const Eigen::VectorXd& vec, Eigen::Index expected,
                const char* what) {
  if (vec.size() != expected)
    throw ArgumentError(std::string(what) + ": expected " +
                        std::to_string(expected) + " entries, got " +
                        std::to_string(vec.size()));
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::VectorXd::Map(m.data(), m.size());
}

}  // namespace

void FeatureExtractor::apply_update(const Eigen::VectorXd& step) {
  check_size(step, parameters().size(), "extractor update");
  set_parameters(parameters() + step);
}

IdentityExtractor::IdentityExtractor(int dim) {
  if (dim < 1) throw ArgumentError("identity extractor: dim must be positive");
  bias_ = Eigen::VectorXd::Zero(dim);
}

void IdentityExtractor::set_parameters(const Eigen::VectorXd& params) {
  check_size(params, bias_.size(), "identity parameters");
  bias_ = params;
}

Eigen::VectorXd IdentityExtractor::forward(const Eigen::VectorXd& raw) const {
  check_size(raw, bias_.size(), "identity input");
  return raw + bias_;
}

Eigen::VectorXd IdentityExtractor::backward(
    const Eigen::VectorXd& raw, const Eigen::VectorXd& upstream) const {
  check_size(raw, bias_.size(), "identity input");
  check_size(upstream, bias_.size(), "identity upstream");
  return upstream;
}

std::unique_ptr<FeatureExtractor> IdentityExtractor::clone() const {
  return std::make_unique<IdentityExtractor>(*this);
}

LinearExtractor::LinearExtractor(int input_dim, int output_dim) {
  if (input_dim < 1 || output_dim < 1)
    throw ArgumentError("linear extractor: dims must be positive");
  weight_ = Eigen::MatrixXd::Identity(output_dim, input_dim);
}

Eigen::VectorXd LinearExtractor::parameters() const {
  return flatten(weight_);
}

void LinearExtractor::set_parameters(const Eigen::VectorXd& params) {
  check_size(params, weight_.size(), "linear parameters");
  weight_ = Eigen::MatrixXd::Map(params.data(), weight_.rows(), weight_.cols());
}

Eigen::VectorXd LinearExtractor::forward(const Eigen::VectorXd& raw) const {
  check_size(raw, weight_.cols(), "linear input");
  return weight_ * raw;
}

Eigen::VectorXd LinearExtractor::backward(
    const Eigen::VectorXd& raw, const Eigen::VectorXd& upstream) const {
  check_size(raw, weight_.cols(), "linear input");
  check_size(upstream, weight_.rows(), "linear upstream");
  return flatten(upstream * raw.transpose());
}

std::unique_ptr<FeatureExtractor> LinearExtractor::clone() const {
  return std::make_unique<LinearExtractor>(*this);
}

MlpExtractor::MlpExtractor(int input_dim, int hidden_dim, int output_dim,
                           std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 1)
    throw ArgumentError("mlp extractor: dims must be positive");
  Rng rng(seed);
  const auto xavier = [&rng](int rows, int cols) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        w(r, c) = limit * (2.0 * rng.uniform() - 1.0);
    return w;
  };
  w1_ = xavier(hidden_dim, input_dim);
  b1_ = Eigen::VectorXd::Zero(hidden_dim);
  w2_ = xavier(output_dim, hidden_dim);
  b2_ = Eigen::VectorXd::Zero(output_dim);
}

Eigen::VectorXd MlpExtractor::parameters() const {
  Eigen::VectorXd params(w1_.size() + b1_.size() + w2_.size() + b2_.size());
  params << flatten(w1_), b1_, flatten(w2_), b2_;
  return params;
}

void MlpExtractor::set_parameters(const Eigen::VectorXd& params) {
  const Eigen::Index total =
      w1_.size() + b1_.size() + w2_.size() + b2_.size();
  check_size(params, total, "mlp parameters");
  Eigen::Index at = 0;
  w1_ = Eigen::MatrixXd::Map(params.data() + at, w1_.rows(), w1_.cols());
  at += w1_.size();
  b1_ = params.segment(at, b1_.size());
  at += b1_.size();
  w2_ = Eigen::MatrixXd::Map(params.data() + at, w2_.rows(), w2_.cols());
  at += w2_.size();
  b2_ = params.segment(at, b2_.size());
}

Eigen::VectorXd MlpExtractor::forward(const Eigen::VectorXd& raw) const {
  check_size(raw, w1_.cols(), "mlp input");
  const Eigen::VectorXd hidden = (w1_ * raw + b1_).cwiseMax(0.0);
  return w2_ * hidden + b2_;
}

Eigen::VectorXd MlpExtractor::backward(
    const Eigen::VectorXd& raw, const Eigen::VectorXd& upstream) const {
  check_size(raw, w1_.cols(), "mlp input");
  check_size(upstream, w2_.rows(), "mlp upstream");
  const Eigen::VectorXd pre = w1_ * raw + b1_;
  const Eigen::VectorXd hidden = pre.cwiseMax(0.0);
  const Eigen::VectorXd grad_b2 = upstream;
  const Eigen::MatrixXd grad_w2 = upstream * hidden.transpose();
  Eigen::VectorXd grad_pre = w2_.transpose() * upstream;
  // Subgradient zero at the kink.
  for (Eigen::Index i = 0; i < grad_pre.size(); ++i)
    if (pre(i) <= 0.0) grad_pre(i) = 0.0;
  const Eigen::MatrixXd grad_w1 = grad_pre * raw.transpose();
  Eigen::VectorXd grad(w1_.size() + b1_.size() + w2_.size() + b2_.size());
  grad << flatten(grad_w1), grad_pre, flatten(grad_w2), grad_b2;
  return grad;
}

std::unique_ptr<FeatureExtractor> MlpExtractor::clone() const {
  return std::make_unique<MlpExtractor>(*this);
}

}  // namespace camel
