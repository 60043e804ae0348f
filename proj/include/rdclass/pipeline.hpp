#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdclass/compression.hpp"
#include "rdclass/netsim.hpp"
#include "rdclass/timeseries.hpp"

namespace rdclass::pipeline {

// File-level orchestration behind the CLI subcommands. Each command reads and
// writes artifacts under an output directory and is deterministic given its
// options; the CLI binary is a thin wrapper over these.

struct WindowStore {
  std::vector<TimeSeriesWindow> windows;
  std::size_t window_len = 0;
  std::size_t dropped_windows = 0;
  std::size_t discarded_samples = 0;
};

struct CsvInput {
  std::string path;
  std::optional<SignalClass> label;
};

struct IngestOptions {
  std::vector<CsvInput> csv_inputs;
  std::size_t synthetic_per_class = 0;
  std::size_t window_len = 500;
  std::uint64_t seed = 0;
  std::string gen_config_path;
};

WindowStore cmd_ingest(const IngestOptions& opt, const std::string& out_dir);

void save_window_store(const WindowStore& st, const std::string& path);
WindowStore load_window_store(const std::string& path);

struct RdOptions {
  Algorithm algorithm = Algorithm::Dct;
  std::vector<double> eps_grid_pct;  // empty = default grid
  SampleEncoding encoding;
};

// Per-class average curves plus the classless average; files named
// curve_<class>_<alg>.{csv,json} and curve_all_<alg>.{csv,json}.
CurveSet cmd_rd(const std::string& windows_path, const RdOptions& opt,
                const std::string& out_dir);

CurveSet load_curve_set(const std::string& dir, Algorithm alg);

// Extract + filter + normalize; writes features.csv and features.sidecar.json.
std::string cmd_features(const std::string& windows_path, const std::string& out_dir);

std::string cmd_select(const std::string& matrix_path, std::size_t k, std::size_t folds,
                       std::uint64_t seed, const std::string& out_dir);

struct TrainEvalOptions {
  std::string classifier = "svm";     // svm | ffnn
  std::string feature_mode = "all";   // all | selected | pca:<L>
  std::string selection_path;         // required for "selected"
  std::size_t folds = 10;
  std::uint64_t seed = 0;
};

struct TrainEvalResult {
  double accuracy;
  std::string report_path;
};

TrainEvalResult cmd_train_eval(const std::string& matrix_path, const TrainEvalOptions& opt,
                               const std::string& out_dir);

void cmd_simulate(const std::string& scenario_path, const std::string& curves_dir,
                  std::uint64_t seed, const std::string& out_dir);

struct PipelineOptions {
  std::size_t synthetic_per_class = 100;
  std::size_t window_len = 500;
  std::size_t selection_k = 20;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::string classifier = "svm";
};

// ingest -> rd (both algorithms) -> features -> select -> train -> simulate.
void cmd_pipeline(const PipelineOptions& opt, const std::string& out_dir);

}  // namespace rdclass::pipeline
