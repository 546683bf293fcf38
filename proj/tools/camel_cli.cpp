#include <CLI11.hpp>
#include <camel/errors.hpp>
#include <camel/pipeline.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace camel;

struct GenerateArgs {
  SyntheticConfig syn;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::string out;
  std::string trace_out;
  std::vector<std::string> freeze;
  TrainOptions options;
};

struct EvalArgs {
  std::string data;
  std::string model;
  std::string out;
  ProtocolOptions protocol;
  std::vector<int> unseen;
};

struct ExportArgs {
  std::string data;
  std::string model;
  std::string out;
  std::vector<int> unseen;
};

int run_generate(const GenerateArgs& args) {
  const Dataset data = generate_synthetic(args.syn);
  save_dataset(data, args.out);
  std::cout << "wrote " << data.size() << " samples across "
            << data.num_views() << " views to " << args.out << "\n";
  return 0;
}

int run_train(TrainArgs& args) {
  for (const auto& part : args.freeze) {
    if (part == "metric")
      args.options.freeze.metric = true;
    else if (part == "extractor")
      args.options.freeze.extractor = true;
    else
      throw ConfigError("train: --freeze accepts 'metric' or 'extractor'");
  }
  const Dataset data = load_dataset(args.data);
  const TrainOutput result = train_pipeline(data, args.options);
  save_model(result.model, args.out);

  // One trace per run: the SGD loss when the joint phase ran, otherwise the
  // alternating fit's objective.
  const std::vector<double>& trace =
      result.loss_trace.empty() ? result.camel_trace : result.loss_trace;
  const std::string trace_path =
      args.trace_out.empty() ? args.out + ".loss.csv" : args.trace_out;
  save_loss_trace(trace, trace_path);

  std::cout << "model written to " << args.out << "\n";
  if (!result.camel_trace.empty())
    std::cout << "alternating fit: " << result.alternations << " alternations, "
              << (result.camel_converged ? "converged" : "not converged")
              << ", objective " << result.camel_trace.back() << "\n";
  if (!result.loss_trace.empty())
    std::cout << "joint phase: " << result.loss_trace.size()
              << " iterations, final loss " << result.loss_trace.back()
              << "\n";
  return 0;
}

int run_eval(const EvalArgs& args) {
  const Dataset data = load_dataset(args.data);
  const ModelFile model = load_model(args.model);
  const EvalReport report =
      eval_pipeline(data, model, args.protocol, args.unseen);
  save_report(report, args.out);
  for (const auto& warning : report.warnings)
    std::cerr << "warning: " << warning << "\n";
  std::cout << "rank-1 " << (report.cmc.empty() ? 0.0 : report.cmc.front())
            << ", mAP " << report.map << ", S " << report.s << " ("
            << report.mode << ")\n";
  return 0;
}

int run_export(const ExportArgs& args) {
  const Dataset data = load_dataset(args.data);
  const ModelFile model = load_model(args.model);
  const ProjectionExport exported = project_pipeline(data, model, args.unseen);

  std::vector<std::optional<int>> identities;
  identities.reserve(data.size());
  for (int i = 0; i < data.size(); ++i)
    identities.push_back(data[i].identity);

  save_projection_csv(exported.raw.coords, data.views(), identities,
                      args.out + ".raw.csv");
  save_projection_csv(exported.shared.coords, data.views(), identities,
                      args.out + ".shared.csv");
  std::cout << "wrote " << args.out << ".raw.csv and " << args.out
            << ".shared.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised cross-view metric learning workbench"};
  app.set_config("--config", "", "Flat INI config, one section per command");
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate =
      app.add_subcommand("generate", "Write a synthetic multi-view dataset");
  generate->add_option("--identities", gen.syn.identities)
      ->capture_default_str();
  generate->add_option("--views", gen.syn.views)->capture_default_str();
  generate->add_option("--images-per-id", gen.syn.images_per_identity_per_view)
      ->capture_default_str();
  generate->add_option("--dim", gen.syn.dim)->capture_default_str();
  generate->add_option("--spread", gen.syn.identity_spread)
      ->capture_default_str();
  generate->add_option("--noise", gen.syn.within_identity_noise)
      ->capture_default_str();
  generate->add_option("--distortion", gen.syn.view_distortion_strength)
      ->capture_default_str();
  generate->add_option("--seed", gen.syn.seed, "Root seed")->required();
  generate->add_option("--out", gen.out, "Output CSV path")->required();

  TrainArgs tr;
  CLI::App* train = app.add_subcommand("train", "Fit a model on a dataset");
  train->add_option("--data", tr.data, "Training CSV")->required();
  train->add_option("--out", tr.out, "Model JSON path")->required();
  train->add_option("--trace-out", tr.trace_out,
                    "Loss trace CSV (default <out>.loss.csv)");
  train->add_option("--seed", tr.options.seed, "Root seed")->required();
  train->add_option("--lambda", tr.options.camel.lambda)
      ->capture_default_str();
  train->add_option("--clusters", tr.options.camel.clusters)
      ->capture_default_str();
  train->add_option("--target-dim", tr.options.camel.target_dim)
      ->capture_default_str();
  train->add_option("--alternations", tr.options.camel.max_alternations)
      ->capture_default_str();
  train->add_option("--tolerance", tr.options.camel.tolerance)
      ->capture_default_str();
  train->add_option("--gamma", tr.options.joint.gamma)->capture_default_str();
  train->add_option("--iterations", tr.options.joint.iterations)
      ->capture_default_str();
  train->add_option("--learning-rate", tr.options.joint.learning_rate)
      ->capture_default_str();
  train->add_option("--batch-size", tr.options.joint.batch_size)
      ->capture_default_str();
  train->add_option("--refresh-period",
                    tr.options.joint.centroid_refresh_period)
      ->capture_default_str();
  train->add_option("--extractor", tr.options.extractor_kind,
                    "identity | linear | mlp")
      ->capture_default_str();
  train->add_option("--hidden-dim", tr.options.hidden_dim)
      ->capture_default_str();
  train->add_option("--init", tr.options.init, "camel | identity | random")
      ->capture_default_str();
  train->add_flag("--symmetric", tr.options.symmetric,
                  "One shared transform for all views");
  train->add_option("--freeze", tr.freeze,
                    "Freeze 'metric' and/or 'extractor' during the joint phase")
      ->delimiter(',');
  train->add_option("--view-clusters", tr.options.view_clusters,
                    "Train one transform per view prototype (0 = off)")
      ->capture_default_str();
  train->add_flag("--ivc", tr.options.ivc,
                  "Prototypes constrain only the initialization");
  train->add_option("--labels-fraction", tr.options.labels_fraction,
                    "Fraction of identities pinned during initialization")
      ->capture_default_str();

  EvalArgs ev;
  CLI::App* eval = app.add_subcommand("eval", "Run the retrieval protocol");
  eval->add_option("--data", ev.data, "Test CSV")->required();
  eval->add_option("--model", ev.model, "Model JSON")->required();
  eval->add_option("--out", ev.out, "Report JSON path")->required();
  eval->add_option("--seed", ev.protocol.seed, "Root seed")->required();
  eval->add_flag("--single-shot", ev.protocol.single_shot,
                 "One gallery image per identity and view");
  eval->add_option("--repetitions", ev.protocol.repetitions)
      ->capture_default_str();
  eval->add_option("--max-rank", ev.protocol.max_rank)->capture_default_str();
  eval->add_option("--probe-views", ev.protocol.probe_views,
                   "Original views probes may come from")
      ->delimiter(',');
  eval->add_option("--unseen-views", ev.unseen,
                   "Views the model never saw; also the probe set")
      ->delimiter(',');

  ExportArgs ex;
  CLI::App* expo = app.add_subcommand(
      "export-projection", "Write 2-d PCA projections for plotting");
  expo->add_option("--data", ex.data, "Dataset CSV")->required();
  expo->add_option("--model", ex.model, "Model JSON")->required();
  expo->add_option("--out", ex.out, "Output base path")->required();
  std::uint64_t export_seed = 0;
  expo->add_option("--seed", export_seed,
                   "Accepted for uniformity; the export is deterministic");
  expo->add_option("--unseen-views", ex.unseen,
                   "Views mapped to their nearest prototype")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    if (train->parsed()) return run_train(tr);
    if (eval->parsed()) return run_eval(ev);
    if (expo->parsed()) return run_export(ex);
    return 2;
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}
