#pragma once

#include <camel/camel.hpp>
#include <camel/dataset.hpp>
#include <camel/decamel.hpp>
#include <camel/evaluation.hpp>
#include <camel/model_io.hpp>
#include <camel/view_clustering.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace camel {

// One training run end to end: optional view clustering, metric
// initialization (alternating fit, identity, or random), the joint SGD
// phase, and packaging of everything a later evaluation needs.
struct TrainOptions {
  CamelConfig camel;
  DecamelConfig joint;
  std::string extractor_kind = "identity";
  int hidden_dim = 16;
  std::string init = "camel";  // camel | identity | random
  bool symmetric = false;
  int view_clusters = 0;  // 0 disables view clustering
  bool ivc = false;       // prototypes constrain only the initialization
  FreezeSpec freeze;
  double labels_fraction = 0.0;
  std::uint64_t seed = 0;
};

struct TrainOutput {
  ModelFile model;
  std::vector<double> camel_trace;
  std::vector<double> loss_trace;
  bool camel_converged = false;
  int alternations = 0;
};

TrainOutput train_pipeline(const Dataset& data, const TrainOptions& options);

// View index each sample should be projected with. Views listed in
// `unseen` are matched to the nearest stored prototype by representation;
// the rest map through the model's training-view relabeling (if any).
std::vector<int> map_eval_views(const Dataset& data, const ModelFile& model,
                                const std::vector<int>& unseen);

EvalReport eval_pipeline(const Dataset& data, const ModelFile& model,
                         ProtocolOptions protocol,
                         const std::vector<int>& unseen_views);

struct ProjectionExport {
  Projection2D raw;
  Projection2D shared;
};

ProjectionExport project_pipeline(const Dataset& data, const ModelFile& model,
                                  const std::vector<int>& unseen_views);

}  // namespace camel
