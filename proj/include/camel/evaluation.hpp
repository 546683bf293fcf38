#pragma once

#include <Eigen/Dense>
#include <array>
#include <camel/dataset.hpp>
#include <camel/extractor.hpp>
#include <camel/metric.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace camel {

// Cross-view distance in the shared space; each sample is projected by its
// own view's transform first.
double asym_distance(const Eigen::VectorXd& xi, int vi,
                     const Eigen::VectorXd& xj, int vj,
                     const AsymmetricMetric& metric);

// Same, but raw inputs pass through the extractor before projection.
double asym_distance(const Eigen::VectorXd& mi, int vi,
                     const Eigen::VectorXd& mj, int vj,
                     const FeatureExtractor& extractor,
                     const AsymmetricMetric& metric);

struct RankedResult {
  int probe = 0;
  std::vector<int> order;      // gallery indices, ascending distance
  std::vector<char> relevant;  // aligned with order
};

// Ranks the gallery for one probe by ascending shared-space distance,
// ties broken by gallery index. Relevance means equal identity.
RankedResult rank_gallery(const ViewedSample& probe,
                          const std::vector<ViewedSample>& gallery,
                          const FeatureExtractor& extractor,
                          const AsymmetricMetric& metric);

// CMC(k) = fraction of probes whose first relevant item ranks <= k.
std::vector<double> cmc(const std::vector<RankedResult>& results,
                        int max_rank);

// Interpolation-free mean average precision.
double mean_ap(const std::vector<RankedResult>& results);

struct SValue {
  double value = 0.0;
  bool degenerate = false;  // intra spread hit the epsilon floor
};

// Ratio of mean inter-identity centroid distance to mean point-to-own-
// centroid distance.
SValue s_value(const std::vector<Eigen::VectorXd>& points,
               const std::vector<int>& labels);

struct Projection2D {
  Eigen::MatrixXd coords;  // N x 2
  std::array<double, 2> explained_variance = {0.0, 0.0};
  bool degenerate = false;
};

// Top-2 principal directions of the centered cloud, signs fixed so each
// direction's largest-magnitude loading is positive.
Projection2D pca_project_2d(const std::vector<Eigen::VectorXd>& points);

struct ProtocolOptions {
  bool single_shot = false;
  int repetitions = 1;
  int max_rank = 10;
  std::uint64_t seed = 0;
  std::vector<int> probe_views;  // restrict probes to these original views
};

struct EvalReport {
  std::vector<double> cmc;
  double map = 0.0;
  double s = 0.0;
  bool s_degenerate = false;
  std::string mode;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// Retrieval protocol over a labeled test set. Distances use
// projection_views (which may remap views to prototypes); junk filtering
// and relevance always use the samples' original views: a gallery item of
// the probe's identity seen from the probe's own original view is dropped
// from that probe's ranking. Identities visible in a single original view
// are excluded from probing with a warning. Single-shot mode draws one
// gallery image per (identity, view) pair per repetition.
EvalReport run_protocol(const std::vector<ViewedSample>& test,
                        const std::vector<int>& projection_views,
                        const FeatureExtractor& extractor,
                        const AsymmetricMetric& metric,
                        const ProtocolOptions& options);

}  // namespace camel
