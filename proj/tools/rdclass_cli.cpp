#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "rdclass/pipeline.hpp"

#include <CLI11.hpp>

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitComputeError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-distortion profiling toolkit for sensor time series"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::uint64_t seed = 0;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load CSV files and/or generate synthetic windows");
  std::vector<std::string> csv_paths;
  std::vector<std::string> csv_classes;
  rdclass::pipeline::IngestOptions ing;
  ingest->add_option("--csv", csv_paths, "CSV input file (repeatable)");
  ingest->add_option("--class", csv_classes,
                     "class label per CSV file: noisy|quasi_periodic|trend (repeatable)");
  ingest->add_option("--synthetic", ing.synthetic_per_class, "synthetic windows per class");
  ingest->add_option("--window-len", ing.window_len, "window length (default 500)");
  ingest->add_option("--config", ing.gen_config_path, "generator config file (key=value)");
  ingest->add_option("--seed", seed, "base seed");
  ingest->add_option("--out", out_dir, "output directory");

  // rd
  auto* rd = app.add_subcommand("rd", "Rate-distortion sweeps and per-class average curves");
  std::string windows_path = "out/windows.json";
  std::string algorithm = "dct";
  std::vector<double> eps_grid;
  rd->add_option("--in", windows_path, "window store (windows.json)");
  rd->add_option("--algorithm", algorithm, "ltc|dct");
  rd->add_option("--eps-grid", eps_grid, "error budgets, percent of range");
  rd->add_option("--out", out_dir, "output directory");

  // features
  auto* feat = app.add_subcommand("features", "Extract, filter and normalize the feature bank");
  feat->add_option("--in", windows_path, "window store (windows.json)");
  feat->add_option("--out", out_dir, "output directory");

  // select
  auto* sel = app.add_subcommand("select", "Greedy forward feature selection");
  std::string matrix_path = "out/features.csv";
  std::size_t k_features = 20;
  std::size_t folds = 10;
  sel->add_option("--in", matrix_path, "feature matrix CSV");
  sel->add_option("--k", k_features, "number of features to select (default 20)");
  sel->add_option("--folds", folds, "CV folds (default 10)");
  sel->add_option("--seed", seed, "fold seed");
  sel->add_option("--out", out_dir, "output directory");

  // train-eval
  auto* te = app.add_subcommand("train-eval", "Cross-validated accuracy for a classifier");
  rdclass::pipeline::TrainEvalOptions teo;
  te->add_option("--in", matrix_path, "feature matrix CSV");
  te->add_option("--classifier", teo.classifier, "svm|ffnn");
  te->add_option("--features", teo.feature_mode, "all|selected|pca:<L>");
  te->add_option("--selection", teo.selection_path, "selection.json (for --features selected)");
  te->add_option("--folds", teo.folds, "CV folds (default 10)");
  te->add_option("--seed", teo.seed, "fold seed");
  te->add_option("--out", out_dir, "output directory");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Star-topology energy/report-period simulation");
  std::string scenario_path;
  std::string curves_dir = "out";
  sim->add_option("--scenario", scenario_path, "scenario JSON")->required();
  sim->add_option("--curves", curves_dir, "directory with DCT curve files");
  sim->add_option("--seed", seed, "simulation seed");
  sim->add_option("--out", out_dir, "output directory");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run ingest -> rd -> features -> select -> train -> simulate");
  rdclass::pipeline::PipelineOptions po;
  pipe->add_option("--synthetic", po.synthetic_per_class, "synthetic windows per class (default 100)");
  pipe->add_option("--window-len", po.window_len, "window length (default 500)");
  pipe->add_option("--k", po.selection_k, "features to select (default 20)");
  pipe->add_option("--folds", po.folds, "CV folds (default 10)");
  pipe->add_option("--classifier", po.classifier, "svm|ffnn");
  pipe->add_option("--seed", po.seed, "base seed");
  pipe->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      if (!csv_classes.empty() && csv_classes.size() != csv_paths.size())
        throw rdclass::InputError("--class count must match --csv count");
      ing.seed = seed;
      for (std::size_t i = 0; i < csv_paths.size(); ++i) {
        rdclass::pipeline::CsvInput in;
        in.path = csv_paths[i];
        if (i < csv_classes.size()) {
          auto cls = rdclass::signal_class_from_string(csv_classes[i]);
          if (!cls) throw rdclass::InputError("unknown class: " + csv_classes[i]);
          in.label = cls;
        }
        ing.csv_inputs.push_back(std::move(in));
      }
      auto st = rdclass::pipeline::cmd_ingest(ing, out_dir);
      std::printf("windows=%zu dropped=%zu discarded_samples=%zu\n", st.windows.size(),
                  st.dropped_windows, st.discarded_samples);
    } else if (*rd) {
      rdclass::pipeline::RdOptions opt;
      auto alg = rdclass::algorithm_from_string(algorithm);
      if (!alg) throw rdclass::InputError("unknown algorithm: " + algorithm);
      opt.algorithm = *alg;
      opt.eps_grid_pct = eps_grid;
      auto set = rdclass::pipeline::cmd_rd(windows_path, opt, out_dir);
      std::printf("curves written for %zu classes plus classless average\n",
                  set.per_class.size());
    } else if (*feat) {
      std::string path = rdclass::pipeline::cmd_features(windows_path, out_dir);
      std::printf("feature matrix: %s\n", path.c_str());
    } else if (*sel) {
      std::string path =
          rdclass::pipeline::cmd_select(matrix_path, k_features, folds, seed, out_dir);
      std::printf("selection: %s\n", path.c_str());
    } else if (*te) {
      auto res = rdclass::pipeline::cmd_train_eval(matrix_path, teo, out_dir);
      std::printf("accuracy=%.4f report=%s\n", res.accuracy, res.report_path.c_str());
    } else if (*sim) {
      rdclass::pipeline::cmd_simulate(scenario_path, curves_dir, seed, out_dir);
      std::printf("simulation written to %s\n", out_dir.c_str());
    } else if (*pipe) {
      rdclass::pipeline::cmd_pipeline(po, out_dir);
      std::printf("pipeline artifacts written to %s\n", out_dir.c_str());
    }
  } catch (const rdclass::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitComputeError;
  }
  return 0;
}
