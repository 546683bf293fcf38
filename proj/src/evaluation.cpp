#include <camel/evaluation.hpp>

#include <algorithm>
#include <camel/errors.hpp>
#include <camel/rng.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

namespace camel {

namespace {

constexpr double kIntraFloor = 1e-12;

RankedResult rank_projected(int probe_index,
                            const Eigen::VectorXd& probe_proj,
                            std::optional<int> probe_identity,
                            const std::vector<Eigen::VectorXd>& gallery_proj,
                            const std::vector<std::optional<int>>& gallery_ids) {
  if (gallery_proj.empty()) throw ArgumentError("empty gallery");
  const int n = static_cast<int>(gallery_proj.size());
  std::vector<std::pair<double, int>> scored;
  scored.reserve(n);
  for (int g = 0; g < n; ++g)
    scored.emplace_back((probe_proj - gallery_proj[g]).norm(), g);
  std::sort(scored.begin(), scored.end());

  RankedResult result;
  result.probe = probe_index;
  result.order.reserve(n);
  result.relevant.reserve(n);
  for (const auto& [dist, g] : scored) {
    result.order.push_back(g);
    result.relevant.push_back(probe_identity && gallery_ids[g] &&
                              *gallery_ids[g] == *probe_identity);
  }
  return result;
}

int first_hit_rank(const RankedResult& result) {
  for (std::size_t r = 0; r < result.relevant.size(); ++r)
    if (result.relevant[r]) return static_cast<int>(r) + 1;
  throw ProtocolError("probe " + std::to_string(result.probe) +
                      " has no relevant gallery item");
}

double average_precision(const RankedResult& result) {
  int hits = 0;
  double total = 0.0;
  for (std::size_t r = 0; r < result.relevant.size(); ++r)
    if (result.relevant[r]) {
      ++hits;
      total += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  if (hits == 0)
    throw ProtocolError("probe " + std::to_string(result.probe) +
                        " has no relevant gallery item");
  return total / hits;
}

}  // namespace

double asym_distance(const Eigen::VectorXd& xi, int vi,
                     const Eigen::VectorXd& xj, int vj,
                     const AsymmetricMetric& metric) {
  return (metric.project(xi, vi) - metric.project(xj, vj)).norm();
}

double asym_distance(const Eigen::VectorXd& mi, int vi,
                     const Eigen::VectorXd& mj, int vj,
                     const FeatureExtractor& extractor,
                     const AsymmetricMetric& metric) {
  return asym_distance(extractor.forward(mi), vi, extractor.forward(mj), vj,
                       metric);
}

RankedResult rank_gallery(const ViewedSample& probe,
                          const std::vector<ViewedSample>& gallery,
                          const FeatureExtractor& extractor,
                          const AsymmetricMetric& metric) {
  std::vector<Eigen::VectorXd> gallery_proj;
  std::vector<std::optional<int>> gallery_ids;
  gallery_proj.reserve(gallery.size());
  for (const auto& item : gallery) {
    gallery_proj.push_back(
        metric.project(extractor.forward(item.features), item.view));
    gallery_ids.push_back(item.identity);
  }
  const Eigen::VectorXd probe_proj =
      metric.project(extractor.forward(probe.features), probe.view);
  return rank_projected(0, probe_proj, probe.identity, gallery_proj,
                        gallery_ids);
}

std::vector<double> cmc(const std::vector<RankedResult>& results,
                        int max_rank) {
  if (results.empty()) throw ArgumentError("cmc of an empty result set");
  if (max_rank < 1) throw ArgumentError("cmc needs max_rank >= 1");
  std::vector<double> curve(max_rank, 0.0);
  for (const auto& result : results) {
    const int hit = first_hit_rank(result);
    for (int k = hit; k <= max_rank; ++k) curve[k - 1] += 1.0;
  }
  for (double& v : curve) v /= static_cast<double>(results.size());
  return curve;
}

double mean_ap(const std::vector<RankedResult>& results) {
  if (results.empty()) throw ArgumentError("mean_ap of an empty result set");
  double total = 0.0;
  for (const auto& result : results) total += average_precision(result);
  return total / static_cast<double>(results.size());
}

SValue s_value(const std::vector<Eigen::VectorXd>& points,
               const std::vector<int>& labels) {
  if (points.size() != labels.size() || points.empty())
    throw ArgumentError("s-value: points and labels disagree");
  std::map<int, std::vector<int>> by_identity;
  for (std::size_t i = 0; i < points.size(); ++i)
    by_identity[labels[i]].push_back(static_cast<int>(i));
  if (by_identity.size() < 2)
    throw ArgumentError("s-value needs at least two identities");

  std::vector<Eigen::VectorXd> centroids;
  double intra = 0.0;
  for (const auto& [label, members] : by_identity) {
    Eigen::VectorXd centroid =
        Eigen::VectorXd::Zero(points.front().size());
    for (int i : members) centroid += points[i];
    centroid /= static_cast<double>(members.size());
    for (int i : members) intra += (points[i] - centroid).norm();
    centroids.push_back(std::move(centroid));
  }
  intra /= static_cast<double>(points.size());

  double inter = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < centroids.size(); ++a)
    for (std::size_t b = a + 1; b < centroids.size(); ++b) {
      inter += (centroids[a] - centroids[b]).norm();
      ++pairs;
    }
  inter /= static_cast<double>(pairs);

  SValue s;
  s.degenerate = intra < kIntraFloor;
  s.value = inter / std::max(intra, kIntraFloor);
  return s;
}

Projection2D pca_project_2d(const std::vector<Eigen::VectorXd>& points) {
  if (points.size() < 2)
    throw ArgumentError("2-d projection needs at least two points");
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  const Eigen::Index dim = points.front().size();
  Eigen::MatrixXd data(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (points[i].size() != dim)
      throw ArgumentError("2-d projection: inconsistent dimensions");
    data.row(i) = points[i].transpose();
  }
  const Eigen::RowVectorXd center = data.colwise().mean();
  data.rowwise() -= center;
  const Eigen::MatrixXd cov =
      data.transpose() * data / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw NumericError("2-d projection: eigen solve failed");

  Projection2D out;
  out.coords = Eigen::MatrixXd::Zero(n, 2);
  if (cov.norm() <= 1e-28) {
    out.degenerate = true;
    return out;
  }
  // Eigenvalues come out ascending; take the top of the spectrum.
  const int available = static_cast<int>(std::min<Eigen::Index>(2, dim));
  for (int j = 0; j < available; ++j) {
    const Eigen::Index col = dim - 1 - j;
    Eigen::VectorXd direction = solver.eigenvectors().col(col);
    Eigen::Index largest = 0;
    direction.cwiseAbs().maxCoeff(&largest);
    if (direction(largest) < 0.0) direction = -direction;
    out.coords.col(j) = data * direction;
    out.explained_variance[j] = std::max(0.0, solver.eigenvalues()(col));
  }
  return out;
}

EvalReport run_protocol(const std::vector<ViewedSample>& test,
                        const std::vector<int>& projection_views,
                        const FeatureExtractor& extractor,
                        const AsymmetricMetric& metric,
                        const ProtocolOptions& options) {
  if (test.empty()) throw ArgumentError("protocol: empty test set");
  if (projection_views.size() != test.size())
    throw ArgumentError("protocol: projection view list length mismatch");
  if (options.repetitions < 1)
    throw ConfigError("protocol: repetitions must be positive");
  if (options.max_rank < 1)
    throw ConfigError("protocol: max_rank must be positive");

  const int n = static_cast<int>(test.size());
  std::vector<Eigen::VectorXd> projected;
  projected.reserve(n);
  for (int i = 0; i < n; ++i)
    projected.push_back(metric.project(extractor.forward(test[i].features),
                                       projection_views[i]));

  EvalReport report;
  report.mode = options.single_shot ? "single-shot" : "multi-shot";
  report.repetitions = options.repetitions;
  report.seed = options.seed;

  // Identities qualify for probing when seen from at least two original
  // views.
  std::map<int, std::set<int>> identity_views;
  for (int i = 0; i < n; ++i)
    if (test[i].identity)
      identity_views[*test[i].identity].insert(test[i].view);
  std::set<int> probe_identities;
  for (const auto& [identity, views] : identity_views) {
    if (views.size() >= 2) {
      probe_identities.insert(identity);
    } else {
      report.warnings.push_back(
          "identity " + std::to_string(identity) +
          " appears in a single view and is excluded from probing");
    }
  }
  if (probe_identities.empty())
    throw ProtocolError("protocol: no identity spans two views");

  const std::set<int> probe_view_filter(options.probe_views.begin(),
                                        options.probe_views.end());
  std::vector<int> probes;
  for (int i = 0; i < n; ++i) {
    if (!test[i].identity || !probe_identities.count(*test[i].identity))
      continue;
    if (!probe_view_filter.empty() && !probe_view_filter.count(test[i].view))
      continue;
    probes.push_back(i);
  }
  if (probes.empty())
    throw ProtocolError("protocol: probe view restriction left no probes");

  // Gallery candidates are all labeled samples; single-shot draws one per
  // (identity, original view) group each repetition.
  std::vector<int> labeled;
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (!test[i].identity) continue;
    labeled.push_back(i);
    groups[{*test[i].identity, test[i].view}].push_back(i);
  }

  std::vector<double> cmc_sum(options.max_rank, 0.0);
  double map_sum = 0.0;
  for (int rep = 0; rep < options.repetitions; ++rep) {
    std::vector<int> gallery;
    if (options.single_shot) {
      Rng rng(derive_seed(options.seed, "gallery",
                          static_cast<std::uint64_t>(rep)));
      for (const auto& [key, members] : groups)
        gallery.push_back(members[rng.uniform_int(members.size())]);
    } else {
      gallery = labeled;
    }

    std::vector<RankedResult> results;
    results.reserve(probes.size());
    for (int p : probes) {
      std::vector<Eigen::VectorXd> gallery_proj;
      std::vector<std::optional<int>> gallery_ids;
      for (int g : gallery) {
        // Junk filter: the probe's identity seen from the probe's own
        // original view stays out of the ranking (it carries no cross-view
        // information and includes the probe itself).
        if (test[g].identity == test[p].identity &&
            test[g].view == test[p].view)
          continue;
        gallery_proj.push_back(projected[g]);
        gallery_ids.push_back(test[g].identity);
      }
      results.push_back(rank_projected(p, projected[p], test[p].identity,
                                       gallery_proj, gallery_ids));
    }
    const std::vector<double> curve = cmc(results, options.max_rank);
    for (int k = 0; k < options.max_rank; ++k) cmc_sum[k] += curve[k];
    map_sum += mean_ap(results);
  }

  report.cmc.resize(options.max_rank);
  for (int k = 0; k < options.max_rank; ++k)
    report.cmc[k] = cmc_sum[k] / options.repetitions;
  report.map = map_sum / options.repetitions;

  // Cluster-structure measure over the labeled shared-space projections.
  std::vector<Eigen::VectorXd> labeled_proj;
  std::vector<int> labels;
  for (int i : labeled) {
    labeled_proj.push_back(projected[i]);
    labels.push_back(*test[i].identity);
  }
  const SValue s = s_value(labeled_proj, labels);
  report.s = s.value;
  report.s_degenerate = s.degenerate;
  return report;
}

}  // namespace camel
