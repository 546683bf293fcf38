#include <camel/model_io.hpp>

#include <camel/dataset.hpp>
#include <camel/errors.hpp>
#include <fstream>
#include <json.hpp>
#include <utility>

namespace camel {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty())
    throw ParseError(std::string(what) + ": expected a non-empty array");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != cols)
      throw ParseError(std::string(what) + ": ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array())
    throw ParseError(std::string(what) + ": expected an array");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

json prototypes_to_json(const ViewPrototypeSet& set) {
  json doc;
  doc["count"] = set.num_prototypes();
  json centroids = json::array();
  for (const auto& b : set.prototypes) centroids.push_back(vector_to_json(b));
  doc["centroids"] = std::move(centroids);
  doc["view_to_prototype"] = set.view_to_prototype;
  return doc;
}

ViewPrototypeSet prototypes_from_json(const json& doc) {
  ViewPrototypeSet set;
  const int count = doc.at("count").get<int>();
  for (const auto& c : doc.at("centroids"))
    set.prototypes.push_back(vector_from_json(c, "prototype centroid"));
  set.view_to_prototype =
      doc.at("view_to_prototype").get<std::vector<int>>();
  if (static_cast<int>(set.prototypes.size()) != count)
    throw ParseError("prototype count disagrees with the centroid list");
  return set;
}

json config_to_json(const DecamelConfig& config) {
  json doc;
  doc["lambda"] = config.lambda;
  doc["gamma"] = config.gamma;
  doc["iterations"] = config.iterations;
  doc["learning_rate"] = config.learning_rate;
  doc["batch_size"] = config.batch_size;
  doc["centroid_refresh_period"] = config.centroid_refresh_period;
  doc["seed"] = config.seed;
  return doc;
}

DecamelConfig config_from_json(const json& doc) {
  DecamelConfig config;
  config.lambda = doc.at("lambda").get<double>();
  config.gamma = doc.at("gamma").get<double>();
  config.iterations = doc.at("iterations").get<long>();
  config.learning_rate = doc.at("learning_rate").get<double>();
  config.batch_size = doc.at("batch_size").get<int>();
  config.centroid_refresh_period =
      doc.at("centroid_refresh_period").get<int>();
  config.seed = doc.at("seed").get<std::uint64_t>();
  return config;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace

std::unique_ptr<FeatureExtractor> make_extractor(const std::string& kind,
                                                 int input_dim, int output_dim,
                                                 int hidden_dim,
                                                 std::uint64_t seed) {
  if (kind == "identity") {
    if (input_dim != output_dim)
      throw ConfigError("identity extractor requires equal input and output");
    return std::make_unique<IdentityExtractor>(input_dim);
  }
  if (kind == "linear")
    return std::make_unique<LinearExtractor>(input_dim, output_dim);
  if (kind == "mlp")
    return std::make_unique<MlpExtractor>(input_dim, hidden_dim, output_dim,
                                          seed);
  throw ConfigError("unknown extractor kind '" + kind + "'");
}

void save_model(const ModelFile& model, const std::string& path) {
  json doc;
  doc["format"] = "camel-model";
  doc["version"] = 1;
  doc["num_views"] = model.metric.num_views();
  doc["dim"] = model.metric.dim();
  doc["target_dim"] = model.metric.target_dim();
  doc["lambda"] = model.lambda;
  json transforms = json::array();
  for (int v = 1; v <= model.metric.num_views(); ++v)
    transforms.push_back(matrix_to_json(model.metric.transform(v)));
  doc["transforms"] = std::move(transforms);

  if (model.extractor) {
    json net;
    net["kind"] = model.extractor->kind();
    net["input_dim"] = model.extractor->input_dim();
    net["output_dim"] = model.extractor->output_dim();
    if (const auto* mlp = dynamic_cast<const MlpExtractor*>(
            model.extractor.get()))
      net["hidden_dim"] = mlp->hidden_dim();
    net["parameters"] = vector_to_json(model.extractor->parameters());
    doc["extractor"] = std::move(net);
  }
  if (model.train_config)
    doc["train_config"] = config_to_json(*model.train_config);
  if (model.initial_prototypes)
    doc["prototypes_initial"] = prototypes_to_json(*model.initial_prototypes);
  if (model.prototypes)
    doc["prototypes"] = prototypes_to_json(*model.prototypes);

  write_text(path, doc.dump(2) + "\n");
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& err) {
    throw ParseError("model file '" + path + "': " + err.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "camel-model")
      throw ParseError("'" + path + "' is not a model file");
    ModelFile model;
    model.lambda = doc.at("lambda").get<double>();
    const int num_views = doc.at("num_views").get<int>();
    std::vector<Eigen::MatrixXd> transforms;
    for (const auto& t : doc.at("transforms"))
      transforms.push_back(matrix_from_json(t, "transform"));
    if (static_cast<int>(transforms.size()) != num_views)
      throw ParseError("transform count disagrees with num_views");
    model.metric = AsymmetricMetric(std::move(transforms));
    if (model.metric.dim() != doc.at("dim").get<int>() ||
        model.metric.target_dim() != doc.at("target_dim").get<int>())
      throw ParseError("stored dimensions disagree with the transforms");

    if (doc.contains("extractor")) {
      const json& net = doc.at("extractor");
      model.extractor = make_extractor(
          net.at("kind").get<std::string>(), net.at("input_dim").get<int>(),
          net.at("output_dim").get<int>(), net.value("hidden_dim", 0), 0);
      model.extractor->set_parameters(
          vector_from_json(net.at("parameters"), "extractor parameters"));
    }
    if (doc.contains("train_config"))
      model.train_config = config_from_json(doc.at("train_config"));
    if (doc.contains("prototypes_initial"))
      model.initial_prototypes =
          prototypes_from_json(doc.at("prototypes_initial"));
    if (doc.contains("prototypes"))
      model.prototypes = prototypes_from_json(doc.at("prototypes"));
    return model;
  } catch (const json::exception& err) {
    throw ParseError("model file '" + path + "': " + err.what());
  }
}

void save_loss_trace(const std::vector<double>& trace,
                     const std::string& path) {
  std::string text = "step,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    text += std::to_string(i) + "," + format_double(trace[i]) + "\n";
  write_text(path, text);
}

void save_report(const EvalReport& report, const std::string& path) {
  json doc;
  doc["cmc"] = report.cmc;
  doc["map"] = report.map;
  doc["s"] = report.s;
  doc["s_degenerate"] = report.s_degenerate;
  doc["mode"] = report.mode;
  doc["repetitions"] = report.repetitions;
  doc["seed"] = report.seed;
  doc["warnings"] = report.warnings;
  write_text(path, doc.dump(2) + "\n");
}

void save_projection_csv(const Eigen::MatrixXd& coords,
                         const std::vector<int>& views,
                         const std::vector<std::optional<int>>& identities,
                         const std::string& path) {
  if (coords.cols() != 2 ||
      coords.rows() != static_cast<Eigen::Index>(views.size()) ||
      views.size() != identities.size())
    throw ArgumentError("projection export: inconsistent row counts");
  std::string text = "x,y,view,identity\n";
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    text += format_double(coords(i, 0)) + "," + format_double(coords(i, 1)) +
            "," + std::to_string(views[i]) + ",";
    if (identities[i]) text += std::to_string(*identities[i]);
    text += "\n";
  }
  write_text(path, text);
}

}  // namespace camel
