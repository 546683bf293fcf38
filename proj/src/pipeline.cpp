#include <algorithm>
#include <camel/errors.hpp>
#include <camel/pipeline.hpp>
#include <camel/rng.hpp>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace camel {

namespace {

std::vector<Eigen::VectorXd> forward_all(
    const std::vector<Eigen::VectorXd>& raw,
    const FeatureExtractor& extractor) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(raw.size());
  for (const auto& m : raw) out.push_back(extractor.forward(m));
  return out;
}

std::vector<Eigen::VectorXd> project_all(
    const std::vector<Eigen::VectorXd>& features, const std::vector<int>& views,
    const AsymmetricMetric& metric) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i)
    out.push_back(metric.project(features[i], views[i]));
  return out;
}

// (sample index, identity) pairs for a seeded fraction of the labelled
// identities. The identity list is shuffled once; the rounded prefix is the
// labelled set.
std::vector<std::pair<int, int>> draw_labelled_pairs(const Dataset& data,
                                                     double fraction,
                                                     std::uint64_t seed) {
  std::vector<int> ids = data.identities();
  if (ids.empty())
    throw ConfigError("train: labels requested but the data carries none");
  Rng rng(derive_seed(seed, "labels"));
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_int(i + 1);
    std::swap(ids[i], ids[j]);
  }
  const int count = static_cast<int>(
      std::lround(fraction * static_cast<double>(ids.size())));
  const std::set<int> labelled(ids.begin(), ids.begin() + count);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < data.size(); ++i) {
    const auto& identity = data[i].identity;
    if (identity && labelled.count(*identity)) pairs.push_back({i, *identity});
  }
  return pairs;
}

void validate_options(const Dataset& data, const TrainOptions& options) {
  if (data.empty()) throw ArgumentError("train: empty dataset");
  if (options.symmetric && options.view_clusters > 0)
    throw ConfigError(
        "train: symmetric mode and view clustering are mutually exclusive");
  if (options.ivc && options.view_clusters == 0)
    throw ConfigError(
        "train: initialization-only view clustering needs view clusters");
  if (options.view_clusters < 0)
    throw ConfigError("train: view clusters must be >= 0");
  if (options.labels_fraction < 0.0 || options.labels_fraction >= 1.0)
    throw ConfigError("train: labels fraction must lie in [0, 1)");
  if (options.init != "camel" && options.init != "identity" &&
      options.init != "random")
    throw ConfigError("train: unknown init '" + options.init + "'");
  if (options.joint.iterations < 0)
    throw ConfigError("train: iterations must be >= 0");
}

}  // namespace

TrainOutput train_pipeline(const Dataset& data, const TrainOptions& options) {
  validate_options(data, options);

  const int d = data.dim();
  CamelConfig camel_cfg = options.camel;
  camel_cfg.seed = options.seed;
  DecamelConfig joint_cfg = options.joint;
  joint_cfg.seed = options.seed;
  joint_cfg.lambda = camel_cfg.lambda;

  auto extractor =
      make_extractor(options.extractor_kind, d, d, options.hidden_dim,
                     derive_seed(options.seed, "extractor"));

  const std::vector<Eigen::VectorXd> raw = data.feature_vectors();
  const std::vector<Eigen::VectorXd> features = forward_all(raw, *extractor);

  // The training view labels: prototype ids under view clustering, a single
  // pooled view in symmetric mode, the dataset's own labels otherwise.
  std::optional<ViewPrototypeSet> initial_prototypes;
  std::vector<int> train_views = data.views();
  int num_train_views = data.num_views();
  if (options.view_clusters > 0) {
    initial_prototypes = cluster_views(
        raw, train_views, num_train_views, *extractor, options.view_clusters,
        derive_seed(options.seed, "view-clusters"));
    train_views = relabel_views(train_views, *initial_prototypes);
    num_train_views = initial_prototypes->num_prototypes();
  }
  if (options.symmetric) {
    train_views.assign(train_views.size(), 1);
    num_train_views = 1;
  }

  std::vector<std::pair<int, int>> pins;
  if (options.labels_fraction > 0.0)
    pins = draw_labelled_pairs(data, options.labels_fraction, options.seed);

  const int k = std::min(camel_cfg.clusters, data.size());
  if (k < 1) throw ConfigError("train: clusters must be >= 1");
  const int target_dim = camel_cfg.target_dim == 0 ? d : camel_cfg.target_dim;

  TrainOutput out;
  AsymmetricMetric init_metric;
  ClusterState init_state;

  if (options.init == "camel") {
    ClusterState seeded =
        kmeans(features, k, derive_seed(camel_cfg.seed, "camel-init"),
               camel_cfg.kmeans_max_iterations);
    if (!pins.empty()) {
      seeded = pin_labelled_clusters(features, seeded, pins);
      seeded = kmeans_refine(features, std::move(seeded),
                             camel_cfg.kmeans_max_iterations);
    }
    CamelFitResult fit = camel_fit(features, train_views, num_train_views,
                                   camel_cfg, std::move(seeded));
    init_metric = std::move(fit.metric);
    init_state = std::move(fit.state);
    out.camel_trace = std::move(fit.objective_trace);
    out.camel_converged = fit.converged;
    out.alternations = fit.alternations;
  } else {
    if (options.init == "identity") {
      if (target_dim > d)
        throw ConfigError("train: identity init needs target_dim <= dim");
      init_metric = AsymmetricMetric::identity(num_train_views, d, target_dim);
    } else {
      Rng rng(derive_seed(options.seed, "metric-init"));
      std::vector<Eigen::MatrixXd> transforms;
      transforms.reserve(num_train_views);
      for (int v = 0; v < num_train_views; ++v)
        transforms.push_back(rng.normal_matrix(d, target_dim));
      init_metric = AsymmetricMetric(std::move(transforms));
    }
    const std::vector<Eigen::VectorXd> projected =
        project_all(features, train_views, init_metric);
    init_state = kmeans(projected, k, derive_seed(camel_cfg.seed, "camel-init"),
                        camel_cfg.kmeans_max_iterations);
    if (!pins.empty()) {
      init_state = pin_labelled_clusters(projected, init_state, pins);
      init_state = kmeans_refine(projected, std::move(init_state),
                                 camel_cfg.kmeans_max_iterations);
    }
  }

  // With initialization-only view clustering the joint phase runs over the
  // original views, each starting from its prototype's transform. The
  // projections are unchanged, so the cluster state stays valid.
  std::vector<int> joint_views = std::move(train_views);
  if (options.ivc) {
    std::vector<Eigen::MatrixXd> expanded;
    expanded.reserve(data.num_views());
    for (int v = 1; v <= data.num_views(); ++v)
      expanded.push_back(
          init_metric.transform(initial_prototypes->prototype_of(v)));
    init_metric = AsymmetricMetric(std::move(expanded));
    joint_views = data.views();
  }

  ModelFile model;
  model.lambda = camel_cfg.lambda;
  model.train_config = joint_cfg;

  if (joint_cfg.iterations == 0) {
    model.metric = std::move(init_metric);
    model.extractor = std::move(extractor);
  } else {
    TrainedModel trained =
        freeze_variants(raw, joint_views, *extractor, init_metric, init_state,
                        joint_cfg, options.freeze);
    model.metric = std::move(trained.metric);
    model.extractor = std::move(trained.extractor);
    out.loss_trace = std::move(trained.loss_trace);
  }

  if (options.symmetric) {
    std::vector<Eigen::MatrixXd> tied(data.num_views(),
                                      model.metric.transform(1));
    model.metric = AsymmetricMetric(std::move(tied));
  }

  if (initial_prototypes) {
    model.prototypes = recompute_prototypes(raw, data.views(),
                                            *initial_prototypes,
                                            *model.extractor);
    model.initial_prototypes = std::move(initial_prototypes);
  }

  out.model = std::move(model);
  return out;
}

std::vector<int> map_eval_views(const Dataset& data, const ModelFile& model,
                                const std::vector<int>& unseen) {
  if (!model.extractor) throw ConfigError("eval: model carries no extractor");
  if (data.dim() != model.extractor->input_dim())
    throw ConfigError("eval: data dimension does not match the model");

  const std::set<int> unseen_set(unseen.begin(), unseen.end());
  for (int v : unseen_set)
    if (v < 1 || v > data.num_views())
      throw ConfigError("eval: unseen view " + std::to_string(v) +
                        " is not present in the data");
  if (!unseen_set.empty() && !model.prototypes)
    throw ConfigError("eval: unseen views need a model with view prototypes");

  // A metric indexed by prototype ids has one transform per prototype;
  // initialization-only clustering leaves one transform per original view.
  const bool prototype_indexed =
      model.prototypes &&
      model.metric.num_views() == model.prototypes->num_prototypes();

  std::map<int, int> unseen_target;
  for (int v : unseen_set) {
    std::vector<Eigen::VectorXd> members;
    for (int i = 0; i < data.size(); ++i)
      if (data[i].view == v) members.push_back(data[i].features);
    const int proto =
        assign_unseen_view(members, *model.prototypes, *model.extractor);
    if (prototype_indexed) {
      unseen_target[v] = proto;
    } else {
      // Representative original view: the smallest member of the prototype.
      int representative = 0;
      for (int w = 1; w <= model.prototypes->num_views(); ++w)
        if (model.prototypes->prototype_of(w) == proto) {
          representative = w;
          break;
        }
      unseen_target[v] = representative;
    }
  }

  std::vector<int> mapped(data.size());
  for (int i = 0; i < data.size(); ++i) {
    const int v = data[i].view;
    const auto hit = unseen_target.find(v);
    if (hit != unseen_target.end()) {
      mapped[i] = hit->second;
      continue;
    }
    int target = v;
    if (prototype_indexed) {
      if (v > model.prototypes->num_views())
        throw ConfigError("eval: view " + std::to_string(v) +
                          " was not part of training; list it as unseen");
      target = model.prototypes->prototype_of(v);
    }
    if (target < 1 || target > model.metric.num_views())
      throw ConfigError("eval: view " + std::to_string(v) +
                        " has no transform in the model; list it as unseen");
    mapped[i] = target;
  }
  return mapped;
}

EvalReport eval_pipeline(const Dataset& data, const ModelFile& model,
                         ProtocolOptions protocol,
                         const std::vector<int>& unseen_views) {
  const std::vector<int> mapped = map_eval_views(data, model, unseen_views);
  if (protocol.probe_views.empty() && !unseen_views.empty())
    protocol.probe_views = unseen_views;
  return run_protocol(data.samples(), mapped, *model.extractor, model.metric,
                      protocol);
}

ProjectionExport project_pipeline(const Dataset& data, const ModelFile& model,
                                  const std::vector<int>& unseen_views) {
  const std::vector<int> mapped = map_eval_views(data, model, unseen_views);
  const std::vector<Eigen::VectorXd> raw = data.feature_vectors();

  ProjectionExport out;
  out.raw = pca_project_2d(raw);
  std::vector<Eigen::VectorXd> shared;
  shared.reserve(raw.size());
  for (int i = 0; i < data.size(); ++i)
    shared.push_back(
        model.metric.project(model.extractor->forward(raw[i]), mapped[i]));
  out.shared = pca_project_2d(shared);
  return out;
}

}  // namespace camel
