#include <doctest.h>

#include <algorithm>
#include <camel/dataset.hpp>
#include <camel/errors.hpp>
#include <camel/evaluation.hpp>
#include <camel/rng.hpp>
#include <cmath>
#include <vector>

using namespace camel;

namespace {

RankedResult make_result(std::vector<char> relevance_by_rank) {
  RankedResult r;
  r.relevant = std::move(relevance_by_rank);
  r.order.resize(r.relevant.size());
  for (std::size_t i = 0; i < r.order.size(); ++i)
    r.order[i] = static_cast<int>(i);
  return r;
}

// Two identities, two views, two images each, far apart between identities
// and close within: retrieval is perfect by construction.
std::vector<ViewedSample> separated_test_set() {
  std::vector<ViewedSample> samples;
  for (int identity = 1; identity <= 2; ++identity)
    for (int view = 1; view <= 2; ++view)
      for (int img = 0; img < 2; ++img) {
        ViewedSample s;
        s.features = Eigen::VectorXd::Constant(2, identity * 100.0);
        s.features(1) += 0.1 * img + 0.05 * view;
        s.view = view;
        s.identity = identity;
        samples.push_back(s);
      }
  return samples;
}

}  // namespace

TEST_CASE("asymmetric distance reduces to Euclidean under identity transforms") {
  const AsymmetricMetric metric = AsymmetricMetric::identity(2, 3, 3);
  Rng rng(4);
  const Eigen::VectorXd a = rng.normal_vector(3);
  const Eigen::VectorXd b = rng.normal_vector(3);
  CHECK(asym_distance(a, 1, b, 2, metric) ==
        doctest::Approx((a - b).norm()).epsilon(1e-15));
  CHECK(asym_distance(a, 1, a, 2, metric) == 0.0);
}

TEST_CASE("asymmetric distance equals the explicit two-step computation") {
  Rng rng(9);
  std::vector<Eigen::MatrixXd> transforms = {rng.normal_matrix(3, 2),
                                             rng.normal_matrix(3, 2)};
  const AsymmetricMetric metric(transforms);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd a = rng.normal_vector(3);
    const Eigen::VectorXd b = rng.normal_vector(3);
    const double expected =
        (transforms[0].transpose() * a - transforms[1].transpose() * b).norm();
    CHECK(asym_distance(a, 1, b, 2, metric) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("tied transforms make the distance symmetric in the views") {
  Rng rng(11);
  const Eigen::MatrixXd u = rng.normal_matrix(3, 2);
  const AsymmetricMetric metric({u, u});
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd a = rng.normal_vector(3);
    const Eigen::VectorXd b = rng.normal_vector(3);
    CHECK(asym_distance(a, 1, b, 2, metric) ==
          doctest::Approx(asym_distance(a, 2, b, 1, metric)).epsilon(1e-14));
  }
}

TEST_CASE("gallery ranking sorts by distance with index tie-breaks") {
  const IdentityExtractor net(1);
  const AsymmetricMetric metric = AsymmetricMetric::identity(1, 1, 1);
  ViewedSample probe;
  probe.features = Eigen::VectorXd::Zero(1);
  probe.view = 1;
  probe.identity = 7;

  std::vector<ViewedSample> gallery(4);
  const double values[] = {3.0, 1.0, 1.0, 2.0};
  for (int g = 0; g < 4; ++g) {
    gallery[g].features = Eigen::VectorXd::Constant(1, values[g]);
    gallery[g].view = 1;
    gallery[g].identity = g == 3 ? 7 : 8;
  }
  const RankedResult result = rank_gallery(probe, gallery, net, metric);
  CHECK(result.order == std::vector<int>{1, 2, 3, 0});
  CHECK(result.relevant == std::vector<char>{0, 0, 1, 0});
}

TEST_CASE("a duplicate of the probe ranks first") {
  const IdentityExtractor net(2);
  const AsymmetricMetric metric = AsymmetricMetric::identity(1, 2, 2);
  ViewedSample probe;
  probe.features = Eigen::Vector2d(0.5, -0.5);
  probe.view = 1;
  std::vector<ViewedSample> gallery(3);
  gallery[0].features = Eigen::Vector2d(5.0, 5.0);
  gallery[1].features = probe.features;
  gallery[2].features = Eigen::Vector2d(-3.0, 2.0);
  for (auto& g : gallery) g.view = 1;
  const RankedResult result = rank_gallery(probe, gallery, net, metric);
  CHECK(result.order.front() == 1);
}

TEST_CASE("five random gallery items sort exactly like the oracle") {
  Rng rng(21);
  const IdentityExtractor net(3);
  std::vector<Eigen::MatrixXd> transforms = {rng.normal_matrix(3, 2),
                                             rng.normal_matrix(3, 2)};
  const AsymmetricMetric metric(transforms);
  for (int trial = 0; trial < 20; ++trial) {
    ViewedSample probe;
    probe.features = rng.normal_vector(3);
    probe.view = 1;
    std::vector<ViewedSample> gallery(5);
    std::vector<std::pair<double, int>> oracle;
    for (int g = 0; g < 5; ++g) {
      gallery[g].features = rng.normal_vector(3);
      gallery[g].view = 2;
      oracle.emplace_back(
          (transforms[0].transpose() * probe.features -
           transforms[1].transpose() * gallery[g].features)
              .norm(),
          g);
    }
    std::sort(oracle.begin(), oracle.end());
    const RankedResult result = rank_gallery(probe, gallery, net, metric);
    for (int g = 0; g < 5; ++g) CHECK(result.order[g] == oracle[g].second);
  }
}

TEST_CASE("cmc counts first hits cumulatively") {
  std::vector<RankedResult> results = {make_result({1, 0, 0}),
                                       make_result({0, 0, 1})};
  const std::vector<double> curve = cmc(results, 4);
  CHECK(curve[0] == doctest::Approx(0.5));
  CHECK(curve[1] == doctest::Approx(0.5));
  CHECK(curve[2] == doctest::Approx(1.0));
  CHECK(curve[3] == doctest::Approx(1.0));

  const std::vector<double> all_first =
      cmc({make_result({1, 0}), make_result({1, 1})}, 2);
  CHECK(all_first[0] == 1.0);
  CHECK(all_first[1] == 1.0);
}

TEST_CASE("cmc is monotone and bounded on random inputs") {
  Rng rng(33);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(8));
    std::vector<char> flags(n, 0);
    flags[rng.uniform_int(n)] = 1;
    for (int i = 0; i < n; ++i)
      if (rng.uniform() < 0.3) flags[i] = 1;
    const std::vector<double> curve = cmc({make_result(flags)}, n);
    for (std::size_t k = 0; k < curve.size(); ++k) {
      CHECK(curve[k] >= 0.0);
      CHECK(curve[k] <= 1.0);
      if (k > 0) CHECK(curve[k] >= curve[k - 1]);
    }
  }
}

TEST_CASE("cmc rejects a probe with no relevant item") {
  CHECK_THROWS_AS(cmc({make_result({0, 0})}, 2), ProtocolError);
}

TEST_CASE("average precision hand examples") {
  CHECK(mean_ap({make_result({1, 0, 0})}) == doctest::Approx(1.0));
  CHECK(mean_ap({make_result({0, 1, 0})}) == doctest::Approx(0.5));
  CHECK(mean_ap({make_result({1, 1, 0})}) == doctest::Approx(1.0));
}

TEST_CASE("average precision matches brute force on every small gallery") {
  for (int n = 1; n <= 6; ++n) {
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<char> flags(n, 0);
      for (int i = 0; i < n; ++i) flags[i] = (mask >> i) & 1;

      double expected = 0.0;
      int hits = 0;
      for (int rank = 1; rank <= n; ++rank) {
        if (!flags[rank - 1]) continue;
        ++hits;
        expected += static_cast<double>(hits) / rank;
      }
      expected /= hits;

      CHECK(mean_ap({make_result(flags)}) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("s-value hand example evaluates to two") {
  std::vector<Eigen::VectorXd> points;
  std::vector<int> labels;
  for (double dy : {-1.0, 1.0}) {
    points.push_back(Eigen::Vector2d(0.0, dy));
    labels.push_back(1);
    points.push_back(Eigen::Vector2d(2.0, dy));
    labels.push_back(2);
  }
  const SValue s = s_value(points, labels);
  CHECK(s.value == doctest::Approx(2.0));
  CHECK_FALSE(s.degenerate);
}

TEST_CASE("s-value is scale invariant and flags the degenerate case") {
  Rng rng(41);
  std::vector<Eigen::VectorXd> points;
  std::vector<int> labels;
  for (int i = 0; i < 12; ++i) {
    points.push_back(rng.normal_vector(3));
    labels.push_back(i % 3);
  }
  const double base = s_value(points, labels).value;
  std::vector<Eigen::VectorXd> scaled;
  for (const auto& p : points) scaled.push_back(7.5 * p);
  CHECK(s_value(scaled, labels).value == doctest::Approx(base).epsilon(1e-12));

  std::vector<Eigen::VectorXd> collapsed = {
      Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0),
      Eigen::Vector2d(1, 0)};
  const SValue degenerate = s_value(collapsed, {1, 1, 2, 2});
  CHECK(degenerate.degenerate);
  CHECK(degenerate.value >= 1e11);

  CHECK_THROWS_AS(s_value({points[0], points[1]}, {1, 1}), ArgumentError);
}

TEST_CASE("2-d projection of planar data is a rigid change of basis") {
  Rng rng(51);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd p(2);
    p << 3.0 * rng.normal(), rng.normal();
    points.push_back(p);
  }
  const Projection2D proj = pca_project_2d(points);
  REQUIRE_FALSE(proj.degenerate);
  Eigen::MatrixXd centered(20, 2);
  Eigen::RowVector2d mean = Eigen::RowVector2d::Zero();
  for (const auto& p : points) mean += p.transpose();
  mean /= 20.0;
  for (int i = 0; i < 20; ++i)
    centered.row(i) = points[i].transpose() - mean;
  // Pairwise distances survive an orthogonal change of basis.
  for (int i = 0; i < 20; ++i)
    for (int j = i + 1; j < 20; ++j) {
      const double before = (centered.row(i) - centered.row(j)).norm();
      const double after = (proj.coords.row(i) - proj.coords.row(j)).norm();
      CHECK(after == doctest::Approx(before).epsilon(1e-9));
    }
}

TEST_CASE("collinear data has zero second variance") {
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 6; ++i) {
    Eigen::VectorXd p(3);
    p << i, 2.0 * i, -i;
    points.push_back(p);
  }
  const Projection2D proj = pca_project_2d(points);
  CHECK(proj.explained_variance[0] > 0.0);
  CHECK(proj.explained_variance[1] <= 1e-12);
  CHECK(proj.coords.col(1).norm() <= 1e-6);
}

TEST_CASE("top-2 reconstruction error equals the truncated spectrum tail") {
  Rng rng(61);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 40; ++i) points.push_back(rng.normal_vector(5));
  const Projection2D proj = pca_project_2d(points);

  Eigen::MatrixXd data(40, 5);
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(5);
  for (const auto& p : points) mean += p.transpose();
  mean /= 40.0;
  for (int i = 0; i < 40; ++i) data.row(i) = points[i].transpose() - mean;
  const Eigen::MatrixXd cov = data.transpose() * data / 40.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

  const double total_var = cov.trace();
  const double kept = proj.explained_variance[0] + proj.explained_variance[1];
  // Mean squared residual per point equals the unkept spectrum mass.
  double residual = 0.0;
  for (int i = 0; i < 40; ++i)
    residual += data.row(i).squaredNorm() - proj.coords.row(i).squaredNorm();
  residual /= 40.0;
  CHECK(residual == doctest::Approx(total_var - kept).epsilon(1e-9));
  CHECK(proj.explained_variance[0] ==
        doctest::Approx(solver.eigenvalues()(4)).epsilon(1e-12));
  CHECK(proj.explained_variance[1] ==
        doctest::Approx(solver.eigenvalues()(3)).epsilon(1e-12));
}

TEST_CASE("identical points produce the degenerate projection") {
  std::vector<Eigen::VectorXd> points(5, Eigen::VectorXd::Constant(3, 2.0));
  const Projection2D proj = pca_project_2d(points);
  CHECK(proj.degenerate);
  CHECK(proj.coords.norm() == 0.0);
}

TEST_CASE("perfectly separated identities retrieve at rank one") {
  const std::vector<ViewedSample> test = separated_test_set();
  const IdentityExtractor net(2);
  const AsymmetricMetric metric = AsymmetricMetric::identity(2, 2, 2);
  ProtocolOptions options;
  options.max_rank = 3;
  std::vector<int> proj_views;
  for (const auto& s : test) proj_views.push_back(s.view);
  const EvalReport report =
      run_protocol(test, proj_views, net, metric, options);
  CHECK(report.cmc[0] == doctest::Approx(1.0));
  CHECK(report.map == doctest::Approx(1.0));
  CHECK(report.mode == "multi-shot");
  CHECK(report.warnings.empty());
}

TEST_CASE("single-shot equals multi-shot with one image per identity and view") {
  std::vector<ViewedSample> test;
  Rng rng(71);
  for (int identity = 1; identity <= 4; ++identity)
    for (int view = 1; view <= 2; ++view) {
      ViewedSample s;
      s.features = rng.normal_vector(3) + Eigen::VectorXd::Constant(3, 4.0 * identity);
      s.view = view;
      s.identity = identity;
      test.push_back(s);
    }
  const IdentityExtractor net(3);
  const AsymmetricMetric metric = AsymmetricMetric::identity(2, 3, 3);
  std::vector<int> proj_views;
  for (const auto& s : test) proj_views.push_back(s.view);

  ProtocolOptions multi;
  multi.max_rank = 5;
  ProtocolOptions single = multi;
  single.single_shot = true;
  single.repetitions = 3;
  const EvalReport a = run_protocol(test, proj_views, net, metric, multi);
  const EvalReport b = run_protocol(test, proj_views, net, metric, single);
  CHECK(a.cmc == b.cmc);
  CHECK(a.map == doctest::Approx(b.map).epsilon(1e-15));
}

TEST_CASE("the protocol is deterministic in its seed") {
  const Dataset data = generate_synthetic(
      {.identities = 6, .views = 2, .images_per_identity_per_view = 3,
       .dim = 4, .seed = 13});
  std::vector<ViewedSample> test(data.samples().begin(),
                                 data.samples().end());
  const IdentityExtractor net(4);
  const AsymmetricMetric metric = AsymmetricMetric::identity(2, 4, 4);
  std::vector<int> proj_views = data.views();
  ProtocolOptions options;
  options.single_shot = true;
  options.repetitions = 10;
  options.seed = 77;
  options.max_rank = 5;
  const EvalReport a = run_protocol(test, proj_views, net, metric, options);
  const EvalReport b = run_protocol(test, proj_views, net, metric, options);
  CHECK(a.cmc == b.cmc);
  CHECK(a.map == b.map);
  CHECK(a.s == b.s);

  ProtocolOptions other = options;
  other.seed = 78;
  const EvalReport c = run_protocol(test, proj_views, net, metric, other);
  CHECK(c.cmc.size() == a.cmc.size());
}

TEST_CASE("single-view identities are excluded from probing with a warning") {
  std::vector<ViewedSample> test = separated_test_set();
  ViewedSample lonely;
  lonely.features = Eigen::Vector2d(50.0, 50.0);
  lonely.view = 1;
  lonely.identity = 9;
  test.push_back(lonely);
  const IdentityExtractor net(2);
  const AsymmetricMetric metric = AsymmetricMetric::identity(2, 2, 2);
  std::vector<int> proj_views;
  for (const auto& s : test) proj_views.push_back(s.view);
  ProtocolOptions options;
  options.max_rank = 3;
  const EvalReport report =
      run_protocol(test, proj_views, net, metric, options);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("identity 9") != std::string::npos);
  // The lonely identity still serves as a gallery distractor.
  CHECK(report.cmc[0] == doctest::Approx(1.0));
}

TEST_CASE("probe view restriction keeps only listed views") {
  const std::vector<ViewedSample> test = separated_test_set();
  const IdentityExtractor net(2);
  const AsymmetricMetric metric = AsymmetricMetric::identity(2, 2, 2);
  std::vector<int> proj_views;
  for (const auto& s : test) proj_views.push_back(s.view);
  ProtocolOptions options;
  options.max_rank = 3;
  options.probe_views = {2};
  const EvalReport report =
      run_protocol(test, proj_views, net, metric, options);
  CHECK(report.cmc[0] == doctest::Approx(1.0));
  ProtocolOptions impossible = options;
  impossible.probe_views = {5};
  CHECK_THROWS_AS(run_protocol(test, proj_views, net, metric, impossible),
                  ProtocolError);
}
