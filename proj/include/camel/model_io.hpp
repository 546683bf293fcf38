#pragma once

#include <camel/decamel.hpp>
#include <camel/evaluation.hpp>
#include <camel/extractor.hpp>
#include <camel/metric.hpp>
#include <camel/view_clustering.hpp>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace camel {

// Everything one training run persists: the metric, the extractor that
// feeds it, the joint-phase settings, and (when view clustering ran) the
// prototype sets before and after training.
struct ModelFile {
  AsymmetricMetric metric = AsymmetricMetric::identity(1, 1, 1);
  double lambda = 0.01;
  std::unique_ptr<FeatureExtractor> extractor;
  std::optional<DecamelConfig> train_config;
  std::optional<ViewPrototypeSet> initial_prototypes;
  std::optional<ViewPrototypeSet> prototypes;
};

std::unique_ptr<FeatureExtractor> make_extractor(const std::string& kind,
                                                 int input_dim, int output_dim,
                                                 int hidden_dim,
                                                 std::uint64_t seed);

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

void save_loss_trace(const std::vector<double>& trace,
                     const std::string& path);

void save_report(const EvalReport& report, const std::string& path);

/// CSV export of 2-D coordinates: x,y,view,identity per row.
void save_projection_csv(const Eigen::MatrixXd& coords,
                         const std::vector<int>& views,
                         const std::vector<std::optional<int>>& identities,
                         const std::string& path);

}  // namespace camel
