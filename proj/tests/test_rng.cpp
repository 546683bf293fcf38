#include <doctest.h>

#include <camel/errors.hpp>
#include <camel/rng.hpp>

using namespace camel;

TEST_CASE("derived seeds separate streams") {
  CHECK(derive_seed(7, "a") != derive_seed(7, "b"));
  CHECK(derive_seed(7, "a", 0) != derive_seed(7, "a", 1));
  CHECK(derive_seed(7, "a") != derive_seed(8, "a"));
  CHECK(derive_seed(7, "a") == derive_seed(7, "a"));
}

TEST_CASE("rng reproduces its stream exactly") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("uniform stays in range and uniform_int respects bounds") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.uniform_int(7) < 7);
  }
  CHECK_THROWS_AS(rng.uniform_int(0), ArgumentError);
}

TEST_CASE("normal draws have the expected first two moments") {
  Rng rng(11);
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.05));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("random rotation is orthogonal with unit determinant") {
  Rng rng(5);
  for (int dim : {2, 3, 8}) {
    const Eigen::MatrixXd q = random_rotation(dim, rng);
    const Eigen::MatrixXd gram = q.transpose() * q;
    CHECK((gram - Eigen::MatrixXd::Identity(dim, dim)).norm() <= 1e-12);
    CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-10));
  }
}
