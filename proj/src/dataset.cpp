#include "camel/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "camel/errors.hpp"
#include "camel/rng.hpp"

namespace camel {

Dataset::Dataset(std::vector<ViewedSample> samples, int num_views)
    : samples_(std::move(samples)), num_views_(num_views) {
  if (num_views_ < 1) throw ArgumentError("dataset: num_views must be >= 1");
  if (samples_.empty()) throw ArgumentError("dataset: no samples");
  dim_ = static_cast<int>(samples_[0].features.size());
  if (dim_ < 1) throw ArgumentError("dataset: feature dimension must be >= 1");

  std::vector<int> per_view(num_views_ + 1, 0);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const ViewedSample& s = samples_[i];
    if (s.features.size() != dim_)
      throw ArgumentError("dataset: sample " + std::to_string(i) +
                          " has inconsistent dimension");
    if (!s.features.allFinite())
      throw ArgumentError("dataset: sample " + std::to_string(i) +
                          " has non-finite features");
    if (s.view < 1 || s.view > num_views_)
      throw ArgumentError("dataset: sample " + std::to_string(i) +
                          " has view id outside [1, " +
                          std::to_string(num_views_) + "]");
    if (s.identity && *s.identity < 0)
      throw ArgumentError("dataset: sample " + std::to_string(i) +
                          " has negative identity");
    ++per_view[s.view];
  }
  for (int v = 1; v <= num_views_; ++v)
    if (per_view[v] == 0)
      throw ArgumentError("dataset: view " + std::to_string(v) + " is empty");
}

std::vector<int> Dataset::identities() const {
  std::set<int> ids;
  for (const ViewedSample& s : samples_)
    if (s.identity) ids.insert(*s.identity);
  return {ids.begin(), ids.end()};
}

std::vector<Eigen::VectorXd> Dataset::feature_vectors() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(samples_.size());
  for (const ViewedSample& s : samples_) out.push_back(s.features);
  return out;
}

std::vector<int> Dataset::views() const {
  std::vector<int> out;
  out.reserve(samples_.size());
  for (const ViewedSample& s : samples_) out.push_back(s.view);
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
  if (config.identities < 1)
    throw ConfigError("synthetic: identities must be >= 1");
  if (config.views < 1) throw ConfigError("synthetic: views must be >= 1");
  if (config.images_per_identity_per_view < 1)
    throw ConfigError("synthetic: images_per_identity_per_view must be >= 1");
  if (config.dim < 1) throw ConfigError("synthetic: dim must be >= 1");
  if (config.identity_spread < 0.0 || config.within_identity_noise < 0.0)
    throw ConfigError("synthetic: spread and noise must be non-negative");
  if (config.view_distortion_strength < 0.0 ||
      config.view_distortion_strength > 1.0)
    throw ConfigError("synthetic: view_distortion_strength must be in [0, 1]");

  const int d = config.dim;
  const double strength = config.view_distortion_strength;

  // Per-view affine distortion; view 1 is the undistorted reference.
  std::vector<Eigen::MatrixXd> warp(config.views + 1);
  std::vector<Eigen::VectorXd> offset(config.views + 1);
  warp[1] = Eigen::MatrixXd::Identity(d, d);
  offset[1] = Eigen::VectorXd::Zero(d);
  // Views 2..4 get fresh distortions; later views reuse one of those three
  // camera families with a small jitter, so large multi-view sets contain
  // related cameras that view clustering can discover.
  const double kFamilyAngleJitter = 0.15;
  const double kFamilyShiftJitter = 0.75;
  Rng view_rng(derive_seed(config.seed, "synthetic-views"));
  std::vector<Eigen::VectorXd> shift(config.views + 1);
  auto plane_rotation = [&](double angle_scale) {
    // Rotation through random planes, each by angle_scale * U(0, quarter
    // turn), so the family interpolates from the identity and stays a
    // rotation at every strength.
    const Eigen::MatrixXd basis = random_rotation(d, view_rng);
    Eigen::MatrixXd core = Eigen::MatrixXd::Identity(d, d);
    for (int k = 0; k + 1 < d; k += 2) {
      const double angle = angle_scale * std::acos(0.0) * view_rng.uniform();
      core(k, k) = std::cos(angle);
      core(k, k + 1) = -std::sin(angle);
      core(k + 1, k) = std::sin(angle);
      core(k + 1, k + 1) = std::cos(angle);
    }
    return Eigen::MatrixXd(basis * core * basis.transpose());
  };
  for (int v = 2; v <= config.views; ++v) {
    if (v <= 4) {
      warp[v] = plane_rotation(strength);
      // The offset dwarfs the prototype spread so untransformed cross-view
      // distances are dominated by the camera shift, not the identity.
      shift[v] = view_rng.normal_vector(d) * (1.5 * config.identity_spread);
    } else {
      const int anchor = 2 + (v - 2) % 3;
      warp[v] = warp[anchor] * plane_rotation(strength * kFamilyAngleJitter);
      shift[v] = shift[anchor] + view_rng.normal_vector(d) *
                                     (kFamilyShiftJitter * 1.5 *
                                      config.identity_spread);
    }
    offset[v] = strength * shift[v];
  }

  Rng proto_rng(derive_seed(config.seed, "synthetic-prototypes"));
  std::vector<Eigen::VectorXd> prototypes(config.identities);
  for (int p = 0; p < config.identities; ++p)
    prototypes[p] = proto_rng.normal_vector(d) * config.identity_spread;

  Rng noise_rng(derive_seed(config.seed, "synthetic-noise"));
  std::vector<ViewedSample> samples;
  samples.reserve(static_cast<std::size_t>(config.identities) * config.views *
                  config.images_per_identity_per_view);
  for (int p = 0; p < config.identities; ++p) {
    for (int v = 1; v <= config.views; ++v) {
      for (int n = 0; n < config.images_per_identity_per_view; ++n) {
        Eigen::VectorXd noisy =
            prototypes[p] +
            noise_rng.normal_vector(d) * config.within_identity_noise;
        ViewedSample s;
        s.features = warp[v] * noisy + offset[v];
        s.view = v;
        s.identity = p + 1;
        samples.push_back(std::move(s));
      }
    }
  }
  return Dataset(std::move(samples), config.views);
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

long parse_int(const std::string& text, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    long value = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                     " '" + text + "'");
  }
}

double parse_value(const std::string& text, int line_no) {
  try {
    std::size_t pos = 0;
    double value = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    if (!std::isfinite(value))
      throw ParseError("line " + std::to_string(line_no) +
                       ": non-finite feature value '" + text + "'");
    return value;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": bad feature value '" + text + "'");
  }
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "view" || header[1] != "identity")
    throw ParseError("line 1: expected header 'view,identity,f1,...'");
  const int dim = static_cast<int>(header.size()) - 2;
  for (int j = 0; j < dim; ++j)
    if (header[2 + j] != "f" + std::to_string(j + 1))
      throw ParseError("line 1: expected feature column 'f" +
                       std::to_string(j + 1) + "'");

  std::vector<ViewedSample> samples;
  int max_view = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != dim + 2)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dim + 2) + " fields, got " +
                       std::to_string(fields.size()));
    ViewedSample s;
    long view = parse_int(fields[0], line_no, "view id");
    if (view < 1)
      throw ParseError("line " + std::to_string(line_no) +
                       ": view id must be >= 1");
    s.view = static_cast<int>(view);
    max_view = std::max(max_view, s.view);
    if (!fields[1].empty()) {
      long id = parse_int(fields[1], line_no, "identity");
      if (id < 0)
        throw ParseError("line " + std::to_string(line_no) +
                         ": identity must be non-negative");
      s.identity = static_cast<int>(id);
    }
    s.features.resize(dim);
    for (int j = 0; j < dim; ++j)
      s.features(j) = parse_value(fields[2 + j], line_no);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw ParseError(path + ": no samples");

  std::vector<bool> seen(max_view + 1, false);
  for (const ViewedSample& s : samples) seen[s.view] = true;
  for (int v = 1; v <= max_view; ++v)
    if (!seen[v])
      throw ParseError(path + ": view " + std::to_string(v) +
                       " has no samples");

  return Dataset(std::move(samples), max_view);
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset file '" + path + "'");
  out << "view,identity";
  for (int j = 1; j <= dataset.dim(); ++j) out << ",f" << j;
  out << "\n";
  for (const ViewedSample& s : dataset.samples()) {
    out << s.view << ",";
    if (s.identity) out << *s.identity;
    for (int j = 0; j < dataset.dim(); ++j)
      out << "," << format_double(s.features(j));
    out << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset,
                                             double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("split: train_fraction must lie in (0, 1)");
  std::vector<int> ids = dataset.identities();
  if (ids.size() < 2)
    throw ProtocolError("split: need at least two labelled identities");

  Rng rng(derive_seed(seed, "split"));
  // Fisher-Yates over the sorted identity list.
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_int(i + 1));
    std::swap(ids[i], ids[j]);
  }
  const int total = static_cast<int>(ids.size());
  int n_train = static_cast<int>(std::llround(train_fraction * total));
  n_train = std::clamp(n_train, 1, total - 1);
  std::set<int> train_ids(ids.begin(), ids.begin() + n_train);

  std::vector<ViewedSample> train, test;
  for (const ViewedSample& s : dataset.samples()) {
    // Unlabelled rows cannot be evaluated, so they stay on the training side.
    if (!s.identity || train_ids.count(*s.identity))
      train.push_back(s);
    else
      test.push_back(s);
  }
  return {Dataset(std::move(train), dataset.num_views()),
          Dataset(std::move(test), dataset.num_views())};
}

}  // namespace camel
