#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string_view>

namespace camel {

// Derives an independent stream seed from one root seed. Tags are short
// literals ("sgd", "metric-init", ...); the optional index separates streams
// that share a tag, e.g. one per view or per repetition. Everything downstream
// of a root seed is reproducible to the bit.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                          std::uint64_t index = 0);

// mt19937_64 with fixed uniform/normal constructions, so draws do not depend
// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();

  // Uniform integer on [0, bound); bound must be positive.
  std::uint64_t uniform_int(std::uint64_t bound);

  // Standard normal via Box-Muller (two engine draws per call).
  double normal();

  Eigen::VectorXd normal_vector(int n);
  Eigen::MatrixXd normal_matrix(int rows, int cols);

 private:
  std::mt19937_64 engine_;
};

// Uniformly distributed rotation (orthogonal, determinant +1).
Eigen::MatrixXd random_rotation(int dim, Rng& rng);

}  // namespace camel
