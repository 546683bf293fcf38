#include <doctest.h>

#include <camel/dataset.hpp>
#include <camel/errors.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>

using namespace camel;

namespace {

const std::string kFixture = std::string(CAMEL_TEST_DATA_DIR) + "/f1.csv";

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/camel_test_" + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fraction of samples whose Euclidean nearest neighbour among the other
// views' samples shares the identity. Independent of the library's ranking
// code on purpose.
double cross_view_nn_accuracy(const Dataset& data) {
  int hits = 0, total = 0;
  for (int i = 0; i < data.size(); ++i) {
    int best = -1;
    double best_dist = 0.0;
    for (int j = 0; j < data.size(); ++j) {
      if (data[j].view == data[i].view) continue;
      const double d = (data[j].features - data[i].features).squaredNorm();
      if (best < 0 || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best < 0) continue;
    ++total;
    if (data[best].identity == data[i].identity) ++hits;
  }
  return static_cast<double>(hits) / total;
}

}  // namespace

TEST_CASE("fixture loads with the documented shape") {
  const Dataset data = load_dataset(kFixture);
  CHECK(data.num_views() == 2);
  CHECK(data.dim() == 2);
  CHECK(data.size() == 8);
  CHECK(data.identities() == std::vector<int>{1, 2});
  CHECK(data[4].features(0) == doctest::Approx(0.05));
  CHECK(data[4].features(1) == doctest::Approx(1.05));
}

TEST_CASE("synthetic generator produces the requested shape") {
  SyntheticConfig config;
  config.identities = 5;
  config.views = 3;
  config.images_per_identity_per_view = 2;
  config.dim = 4;
  config.seed = 9;
  const Dataset data = generate_synthetic(config);
  CHECK(data.size() == 5 * 3 * 2);
  CHECK(data.num_views() == 3);
  CHECK(data.dim() == 4);
  std::map<int, int> per_view;
  for (const ViewedSample& s : data.samples()) ++per_view[s.view];
  for (int v = 1; v <= 3; ++v) CHECK(per_view[v] == 10);
}

TEST_CASE("synthetic generator is seed-deterministic") {
  SyntheticConfig config;
  config.seed = 123;
  const Dataset a = generate_synthetic(config);
  const Dataset b = generate_synthetic(config);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i)
    CHECK(a[i].features == b[i].features);
  config.seed = 124;
  const Dataset c = generate_synthetic(config);
  bool any_differs = false;
  for (int i = 0; i < a.size() && !any_differs; ++i)
    if (a[i].features != c[i].features) any_differs = true;
  CHECK(any_differs);
}

TEST_CASE("zero distortion leaves only within-identity noise across views") {
  SyntheticConfig config;
  config.identities = 40;
  config.views = 2;
  config.images_per_identity_per_view = 6;
  config.dim = 6;
  config.within_identity_noise = 0.5;
  config.view_distortion_strength = 0.0;
  config.seed = 77;
  const Dataset data = generate_synthetic(config);

  // With no distortion, a cross-view same-identity pair differs by the two
  // independent noise draws, so the expected squared distance is
  // 2 * dim * noise^2.
  double sum = 0.0;
  long pairs = 0;
  for (int i = 0; i < data.size(); ++i)
    for (int j = i + 1; j < data.size(); ++j) {
      if (data[i].identity != data[j].identity) continue;
      if (data[i].view == data[j].view) continue;
      sum += (data[i].features - data[j].features).squaredNorm();
      ++pairs;
    }
  const double expected = 2.0 * config.dim * config.within_identity_noise *
                          config.within_identity_noise;
  CHECK(sum / pairs == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("distortion makes cross-view matching harder for raw distances") {
  SyntheticConfig config;
  config.seed = 31;
  config.view_distortion_strength = 0.0;
  const double clean = cross_view_nn_accuracy(generate_synthetic(config));
  config.view_distortion_strength = 0.8;
  const double distorted = cross_view_nn_accuracy(generate_synthetic(config));
  CHECK(distorted < clean);
}

TEST_CASE("dataset round-trips through CSV exactly") {
  SyntheticConfig config;
  config.identities = 4;
  config.views = 2;
  config.images_per_identity_per_view = 2;
  config.dim = 3;
  config.seed = 5;
  const Dataset data = generate_synthetic(config);
  const std::string path = write_temp("roundtrip.csv", "");
  save_dataset(data, path);
  const Dataset loaded = load_dataset(path);
  REQUIRE(loaded.size() == data.size());
  for (int i = 0; i < data.size(); ++i) {
    CHECK(loaded[i].view == data[i].view);
    CHECK(loaded[i].identity == data[i].identity);
    CHECK(loaded[i].features == data[i].features);
  }
  // Saving again must reproduce the same bytes.
  const std::string path2 = write_temp("roundtrip2.csv", "");
  save_dataset(loaded, path2);
  CHECK(read_file(path) == read_file(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("parse errors name the offending line") {
  CHECK_THROWS_AS(load_dataset("/tmp/definitely_missing_fixture.csv"),
                  ParseError);

  const std::string ragged =
      write_temp("ragged.csv", "view,identity,f1,f2\n1,1,0.5\n");
  CHECK_THROWS_WITH_AS(load_dataset(ragged),
                       doctest::Contains("line 2"), ParseError);

  const std::string nonfinite =
      write_temp("nonfinite.csv", "view,identity,f1\n1,1,0.5\n1,2,nan\n");
  CHECK_THROWS_WITH_AS(load_dataset(nonfinite),
                       doctest::Contains("line 3"), ParseError);

  const std::string badview =
      write_temp("badview.csv", "view,identity,f1\n0,1,0.5\n");
  CHECK_THROWS_WITH_AS(load_dataset(badview),
                       doctest::Contains("line 2"), ParseError);

  const std::string gap =
      write_temp("gap.csv", "view,identity,f1\n1,1,0.5\n3,1,0.5\n");
  CHECK_THROWS_AS(load_dataset(gap), ParseError);

  std::remove(ragged.c_str());
  std::remove(nonfinite.c_str());
  std::remove(badview.c_str());
  std::remove(gap.c_str());
}

TEST_CASE("identity split sends two identities to opposite halves") {
  const Dataset data = load_dataset(kFixture);
  const auto [train, test] = split_train_test(data, 0.5, 3);
  CHECK(train.identities().size() == 1);
  CHECK(test.identities().size() == 1);
  CHECK(train.identities()[0] != test.identities()[0]);
  CHECK(train.size() + test.size() == data.size());
}

TEST_CASE("split refuses unlabelled data") {
  std::vector<ViewedSample> samples(4);
  for (int i = 0; i < 4; ++i) {
    samples[i].features = Eigen::VectorXd::Constant(2, i);
    samples[i].view = 1;
  }
  const Dataset data(std::move(samples), 1);
  CHECK_THROWS_AS(split_train_test(data, 0.5, 1), ProtocolError);
}

TEST_CASE("split assigns identities to train roughly evenly across seeds") {
  SyntheticConfig config;
  config.identities = 10;
  config.views = 2;
  config.images_per_identity_per_view = 1;
  config.dim = 2;
  config.seed = 1;
  const Dataset data = generate_synthetic(config);
  std::map<int, int> train_counts;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto [train, test] = split_train_test(data, 0.5, seed);
    CHECK(train.identities().size() == 5);
    for (int id : train.identities()) ++train_counts[id];
  }
  for (const auto& [id, count] : train_counts) {
    CHECK(count >= 30);
    CHECK(count <= 70);
  }
}
