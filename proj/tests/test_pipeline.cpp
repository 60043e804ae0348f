#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rdclass/pipeline.hpp"
#include "rdclass/reduce.hpp"

using namespace rdclass;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("rdclass_pipe_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

pipeline::IngestOptions small_corpus(std::size_t per_class = 5,
                                     std::size_t window_len = 200) {
  pipeline::IngestOptions opt;
  opt.synthetic_per_class = per_class;
  opt.window_len = window_len;
  opt.seed = 42;
  return opt;
}

}  // namespace

TEST_CASE("ingest: synthetic corpus lands in a loadable store") {
  TempDir dir("ingest");
  const pipeline::WindowStore st = pipeline::cmd_ingest(small_corpus(), dir.str());
  CHECK(st.windows.size() == 15);
  CHECK(st.window_len == 200);
  const pipeline::WindowStore back =
      pipeline::load_window_store((dir.path / "windows.json").string());
  REQUIRE(back.windows.size() == st.windows.size());
  for (std::size_t i = 0; i < st.windows.size(); ++i) {
    CHECK(back.windows[i].class_label == st.windows[i].class_label);
    CHECK(back.windows[i].samples == st.windows[i].samples);
  }
}

TEST_CASE("ingest: csv inputs pass through load_csv with drop accounting") {
  TempDir dir("ingest_csv");
  const fs::path csv = dir.path / "input.csv";
  {
    std::ofstream out(csv);
    out << "value\n";
    for (int i = 0; i < 110; ++i) out << 0.25 * i << "\n";
  }
  pipeline::IngestOptions opt;
  opt.csv_inputs.push_back({csv.string(), SignalClass::Trend});
  opt.window_len = 50;
  const pipeline::WindowStore st = pipeline::cmd_ingest(opt, dir.str());
  CHECK(st.windows.size() == 2);
  CHECK(st.discarded_samples == 10);
  CHECK(st.windows[0].class_label == SignalClass::Trend);
}

TEST_CASE("rd: single window per class makes the class average its own curve") {
  TempDir dir("rd_single");
  pipeline::cmd_ingest(small_corpus(1), dir.str());
  pipeline::RdOptions opt;
  opt.algorithm = Algorithm::Dct;
  const CurveSet set =
      pipeline::cmd_rd((dir.path / "windows.json").string(), opt, dir.str());
  REQUIRE(set.per_class.size() == 3);

  const pipeline::WindowStore st =
      pipeline::load_window_store((dir.path / "windows.json").string());
  std::vector<ErrorBudget> grid;
  for (double e : default_eps_grid()) grid.push_back({e});
  for (const TimeSeriesWindow& w : st.windows) {
    const RdCurve own = rd_sweep(w, Algorithm::Dct, grid, SampleEncoding{});
    REQUIRE(w.class_label.has_value());
    // A one-window class average is the window's own curve resampled onto the
    // eps grid: averaging cannot move any rate outside the window's range.
    const RdCurve single = average_curve({own}, default_eps_grid());
    const RdCurve& avg = set.per_class.at(*w.class_label);
    REQUIRE(avg.points.size() == single.points.size());
    for (std::size_t i = 0; i < single.points.size(); ++i) {
      CHECK(avg.points[i].distortion_pct == single.points[i].distortion_pct);
      CHECK(avg.points[i].rate == single.points[i].rate);
    }
  }
  // Written files reload into the same curves.
  const CurveSet reload = pipeline::load_curve_set(dir.str(), Algorithm::Dct);
  CHECK(reload.per_class.size() == 3);
  CHECK(reload.classless.points.size() == set.classless.points.size());
}

TEST_CASE("features -> select -> train-eval chain runs on a small corpus") {
  TempDir dir("chain");
  pipeline::cmd_ingest(small_corpus(8), dir.str());
  const std::string matrix_path =
      pipeline::cmd_features((dir.path / "windows.json").string(), dir.str());
  CHECK(fs::exists(dir.path / "features.csv"));
  CHECK(fs::exists(dir.path / "features.sidecar.json"));

  const std::string sel_path =
      pipeline::cmd_select(matrix_path, 3, 4, 7, dir.str());
  const SelectionResult sel = selection_from_json(slurp(sel_path));
  CHECK(sel.selected_indices.size() == 3);
  CHECK(sel.accuracy_trajectory.size() == 3);

  pipeline::TrainEvalOptions te;
  te.folds = 4;
  te.seed = 7;
  te.feature_mode = "selected";
  te.selection_path = sel_path;
  const pipeline::TrainEvalResult r =
      pipeline::cmd_train_eval(matrix_path, te, dir.str());
  CHECK(r.accuracy >= 0.0);
  CHECK(r.accuracy <= 1.0);
  CHECK(fs::exists(r.report_path));

  te.feature_mode = "pca:2";
  const pipeline::TrainEvalResult rp =
      pipeline::cmd_train_eval(matrix_path, te, dir.str());
  CHECK(rp.accuracy >= 0.0);
  CHECK(rp.accuracy <= 1.0);

  te.feature_mode = "bogus";
  CHECK_THROWS_AS(pipeline::cmd_train_eval(matrix_path, te, dir.str()), InputError);
}

TEST_CASE("simulate command consumes scenario plus curve artifacts") {
  TempDir dir("sim");
  pipeline::cmd_ingest(small_corpus(2, 500), dir.str());
  pipeline::RdOptions opt;
  opt.algorithm = Algorithm::Dct;
  pipeline::cmd_rd((dir.path / "windows.json").string(), opt, dir.str());

  const fs::path scenario = dir.path / "scenario.json";
  {
    std::ofstream out(scenario);
    out << R"({
      "window_len": 500,
      "xi_grid_pct": [2, 8],
      "strategies": ["no_compression", "dct_cl", "dct_ca"],
      "nodes": [
        {"id": "n0", "class": "noisy", "seed": 1},
        {"id": "n1", "class": "quasi_periodic", "seed": 2},
        {"id": "n2", "class": "trend", "seed": 3}
      ]
    })";
  }
  pipeline::cmd_simulate(scenario.string(), dir.str(), 9, dir.str());
  CHECK(fs::exists(dir.path / "simulation.csv"));
  const std::string agg = slurp(dir.path / "simulation_aggregates.json");
  CHECK(agg.find("no_compression") != std::string::npos);
  CHECK(agg.find("e_tx_per_bit") != std::string::npos);
}

TEST_CASE("reruns with the same seed produce byte-identical artifacts") {
  TempDir a("det_a");
  TempDir b("det_b");
  for (const TempDir* d : {&a, &b}) {
    pipeline::cmd_ingest(small_corpus(3), d->str());
    pipeline::RdOptions opt;
    opt.algorithm = Algorithm::Ltc;
    pipeline::cmd_rd((d->path / "windows.json").string(), opt, d->str());
    const std::string matrix =
        pipeline::cmd_features((d->path / "windows.json").string(), d->str());
    pipeline::cmd_select(matrix, 2, 3, 11, d->str());
  }
  for (const char* name :
       {"windows.json", "curve_noisy_ltc.csv", "curve_quasi_periodic_ltc.csv",
        "curve_trend_ltc.csv", "curve_all_ltc.csv", "features.csv",
        "features.sidecar.json", "selection.json"}) {
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  }
}
