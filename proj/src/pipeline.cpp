#include "rdclass/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "rdclass/classify.hpp"
#include "rdclass/features.hpp"
#include "rdclass/reduce.hpp"

#include <nlohmann/json.hpp>

namespace rdclass::pipeline {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory: " + dir);
}

std::string curve_base(const std::optional<SignalClass>& cls, Algorithm alg) {
  std::string c = cls ? to_string(*cls) : "all";
  return std::string("curve_") + c + "_" + to_string(alg);
}

}  // namespace

WindowStore cmd_ingest(const IngestOptions& opt, const std::string& out_dir) {
  if (opt.csv_inputs.empty() && opt.synthetic_per_class == 0)
    throw InputError("ingest: no inputs (give CSV files or --synthetic count)");
  ensure_dir(out_dir);

  WindowStore st;
  st.window_len = opt.window_len;
  for (const auto& in : opt.csv_inputs) {
    CsvLoadResult res = load_csv(in.path, opt.window_len);
    for (auto& w : res.windows) {
      w.class_label = in.label;
      st.windows.push_back(std::move(w));
    }
    st.dropped_windows += res.dropped_windows;
    st.discarded_samples += res.discarded_samples;
  }
  if (opt.synthetic_per_class > 0) {
    GeneratorConfig gen;
    if (!opt.gen_config_path.empty()) gen = load_generator_config(opt.gen_config_path);
    for (int c = 0; c < kNumClasses; ++c) {
      for (std::size_t i = 0; i < opt.synthetic_per_class; ++i) {
        st.windows.push_back(gen_synthetic(static_cast<SignalClass>(c), opt.window_len,
                                           opt.seed + i, gen));
      }
    }
  }
  if (st.windows.empty()) throw InputError("ingest produced zero windows");
  save_window_store(st, (fs::path(out_dir) / "windows.json").string());
  return st;
}

void save_window_store(const WindowStore& st, const std::string& path) {
  nlohmann::json j;
  j["window_len"] = st.window_len;
  j["dropped_windows"] = st.dropped_windows;
  j["discarded_samples"] = st.discarded_samples;
  auto& arr = j["windows"] = nlohmann::json::array();
  for (const auto& w : st.windows) {
    nlohmann::json jw;
    jw["source_id"] = w.source_id;
    if (w.class_label) jw["label"] = to_string(*w.class_label);
    jw["samples"] = w.samples;
    arr.push_back(std::move(jw));
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump() << "\n";
}

WindowStore load_window_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open window store: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  WindowStore st;
  st.window_len = j.at("window_len").get<std::size_t>();
  st.dropped_windows = j.at("dropped_windows").get<std::size_t>();
  st.discarded_samples = j.at("discarded_samples").get<std::size_t>();
  for (const auto& jw : j.at("windows")) {
    TimeSeriesWindow w;
    w.source_id = jw.at("source_id").get<std::string>();
    w.samples = jw.at("samples").get<std::vector<double>>();
    if (jw.contains("label")) {
      auto cls = signal_class_from_string(jw.at("label").get<std::string>());
      if (!cls) throw InputError("unknown label in window store");
      w.class_label = cls;
    }
    st.windows.push_back(std::move(w));
  }
  return st;
}

CurveSet cmd_rd(const std::string& windows_path, const RdOptions& opt,
                const std::string& out_dir) {
  WindowStore st = load_window_store(windows_path);
  ensure_dir(out_dir);
  std::vector<double> grid_pct = opt.eps_grid_pct.empty() ? default_eps_grid()
                                                          : opt.eps_grid_pct;
  std::vector<ErrorBudget> grid;
  for (double e : grid_pct) grid.push_back({e});

  std::map<SignalClass, std::vector<RdCurve>> by_class;
  for (const auto& w : st.windows) {
    if (!w.class_label) throw InputError("rd requires labeled windows");
    by_class[*w.class_label].push_back(rd_sweep(w, opt.algorithm, grid, opt.encoding));
  }
  if (by_class.empty()) throw InputError("rd: no labeled windows");

  CurveSet set;
  for (const auto& [cls, curves] : by_class) {
    RdCurve avg = average_curve(curves, grid_pct);
    avg.class_label = cls;
    std::string base = (fs::path(out_dir) / curve_base(cls, opt.algorithm)).string();
    write_curve_csv(avg, base + ".csv");
    write_curve_sidecar(avg, curves.size(), base + ".json");
    set.per_class[cls] = std::move(avg);
  }
  set.classless = make_classless(set, grid_pct);
  std::string base = (fs::path(out_dir) / curve_base(std::nullopt, opt.algorithm)).string();
  write_curve_csv(set.classless, base + ".csv");
  write_curve_sidecar(set.classless, st.windows.size(), base + ".json");
  return set;
}

CurveSet load_curve_set(const std::string& dir, Algorithm alg) {
  CurveSet set;
  for (int c = 0; c < kNumClasses; ++c) {
    SignalClass cls = static_cast<SignalClass>(c);
    std::string base = (fs::path(dir) / curve_base(cls, alg)).string();
    if (fs::exists(base + ".csv"))
      set.per_class[cls] = read_curve_csv(base + ".csv", base + ".json");
  }
  if (set.per_class.empty()) throw InputError("no class curves found in " + dir);
  std::string base = (fs::path(dir) / curve_base(std::nullopt, alg)).string();
  if (fs::exists(base + ".csv"))
    set.classless = read_curve_csv(base + ".csv", base + ".json");
  else
    set.classless = make_classless(set, default_eps_grid());
  return set;
}

std::string cmd_features(const std::string& windows_path, const std::string& out_dir) {
  WindowStore st = load_window_store(windows_path);
  ensure_dir(out_dir);
  std::vector<SignalClass> labels;
  for (const auto& w : st.windows) {
    if (!w.class_label) throw InputError("features requires labeled windows");
    labels.push_back(*w.class_label);
  }
  BuildStats stats;
  SignalFeatureMatrix m = build_matrix(st.windows, labels, &stats);
  SignalFeatureMatrix norm = normalize(m);
  std::string path = (fs::path(out_dir) / "features.csv").string();
  write_matrix_csv(norm, path);
  write_matrix_sidecar(norm, stats, (fs::path(out_dir) / "features.sidecar.json").string());
  return path;
}

std::string cmd_select(const std::string& matrix_path, std::size_t k, std::size_t folds,
                       std::uint64_t seed, const std::string& out_dir) {
  SignalFeatureMatrix m = read_matrix_csv(matrix_path);
  ensure_dir(out_dir);
  SelectionResult res = greedy_select(m, k, folds, seed);
  std::string path = (fs::path(out_dir) / "selection.json").string();
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << to_json(res) << "\n";
  return path;
}

TrainEvalResult cmd_train_eval(const std::string& matrix_path, const TrainEvalOptions& opt,
                               const std::string& out_dir) {
  SignalFeatureMatrix m = read_matrix_csv(matrix_path);
  ensure_dir(out_dir);

  TrainerSpec spec;
  if (opt.classifier == "svm") {
    spec.kind = TrainerSpec::Kind::Svm;
  } else if (opt.classifier == "ffnn") {
    spec.kind = TrainerSpec::Kind::Ffnn;
  } else {
    throw InputError("unknown classifier: " + opt.classifier);
  }

  Matrix x;
  std::string mode = opt.feature_mode;
  if (mode == "all") {
    x = m.rows;
  } else if (mode == "selected") {
    if (opt.selection_path.empty())
      throw InputError("feature mode 'selected' needs a selection file");
    std::ifstream in(opt.selection_path);
    if (!in) throw InputError("cannot open " + opt.selection_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    SelectionResult sel = selection_from_json(text);
    for (const auto& row : m.rows) {
      std::vector<double> sub;
      for (std::size_t j : sel.selected_indices) {
        if (j >= row.size()) throw InputError("selection index out of range");
        sub.push_back(row[j]);
      }
      x.push_back(std::move(sub));
    }
  } else if (mode.rfind("pca:", 0) == 0) {
    std::size_t l = std::stoul(mode.substr(4));
    PcaModel p = pca_fit(m, l);
    x = pca_transform(p, m);
  } else {
    throw InputError("unknown feature mode: " + mode);
  }

  double acc = cross_validate(spec, x, m.labels, opt.folds, opt.seed);

  nlohmann::json j;
  j["classifier"] = opt.classifier;
  j["feature_mode"] = opt.feature_mode;
  j["folds"] = opt.folds;
  j["seed"] = opt.seed;
  j["n_samples"] = m.n_rows();
  j["accuracy"] = acc;
  std::string path = (fs::path(out_dir) / ("accuracy_" + opt.classifier + "_" +
                                           [&] {
                                             std::string s = opt.feature_mode;
                                             std::replace(s.begin(), s.end(), ':', '_');
                                             return s;
                                           }() +
                                           ".json"))
                         .string();
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << "\n";
  return {acc, path};
}

void cmd_simulate(const std::string& scenario_path, const std::string& curves_dir,
                  std::uint64_t seed, const std::string& out_dir) {
  Scenario sc = load_scenario(scenario_path);
  CurveSet curves = load_curve_set(curves_dir, Algorithm::Dct);
  ensure_dir(out_dir);
  SimulationReport rep = simulate(sc, curves, seed);
  write_results_csv(rep, (fs::path(out_dir) / "simulation.csv").string());
  write_aggregates_json(rep, sc, (fs::path(out_dir) / "simulation_aggregates.json").string());
}

void cmd_pipeline(const PipelineOptions& opt, const std::string& out_dir) {
  ensure_dir(out_dir);
  IngestOptions ing;
  ing.synthetic_per_class = opt.synthetic_per_class;
  ing.window_len = opt.window_len;
  ing.seed = opt.seed;
  WindowStore st = cmd_ingest(ing, out_dir);
  std::string windows_path = (fs::path(out_dir) / "windows.json").string();

  RdOptions rd;
  rd.algorithm = Algorithm::Ltc;
  cmd_rd(windows_path, rd, out_dir);
  rd.algorithm = Algorithm::Dct;
  cmd_rd(windows_path, rd, out_dir);

  std::string matrix_path = cmd_features(windows_path, out_dir);
  std::string selection_path =
      cmd_select(matrix_path, opt.selection_k, opt.folds, opt.seed, out_dir);

  TrainEvalOptions te;
  te.classifier = opt.classifier;
  te.feature_mode = "selected";
  te.selection_path = selection_path;
  te.folds = opt.folds;
  te.seed = opt.seed;
  cmd_train_eval(matrix_path, te, out_dir);

  // Star-topology scenario over the same synthetic population.
  nlohmann::json sc;
  auto& nodes = sc["nodes"] = nlohmann::json::array();
  int id = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < std::max<std::size_t>(1, opt.synthetic_per_class / 10); ++i) {
      nodes.push_back({{"id", "node" + std::to_string(id++)},
                       {"class", to_string(static_cast<SignalClass>(c))},
                       {"seed", opt.seed + i}});
    }
  }
  sc["strategies"] = {"no_compression", "dct_cl", "dct_ca"};
  sc["xi_grid_pct"] = {1.0, 2.0, 4.0, 8.0, 16.0};
  sc["window_len"] = opt.window_len;
  std::string scenario_path = (fs::path(out_dir) / "scenario.json").string();
  {
    std::ofstream out(scenario_path);
    if (!out) throw InputError("cannot write " + scenario_path);
    out << sc.dump(2) << "\n";
  }
  cmd_simulate(scenario_path, out_dir, opt.seed, out_dir);
}

}  // namespace rdclass::pipeline
