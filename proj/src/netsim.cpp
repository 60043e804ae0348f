#include "rdclass/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace rdclass {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double comp_energy(std::size_t n, const EnergyConfig& cfg) {
  double nd = static_cast<double>(n);
  return cfg.comp_c0 * nd * std::log2(nd) + cfg.comp_c1 * nd;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::NoCompression: return "no_compression";
    case Strategy::DctClassless: return "dct_cl";
    case Strategy::DctClassAware: return "dct_ca";
  }
  return "?";
}

std::optional<Strategy> strategy_from_string(const std::string& s) {
  if (s == "no_compression" || s == "none") return Strategy::NoCompression;
  if (s == "dct_cl") return Strategy::DctClassless;
  if (s == "dct_ca") return Strategy::DctClassAware;
  return std::nullopt;
}

void validate(const EnergyConfig& cfg) {
  if (cfg.e_tx_per_bit <= 0 || cfg.comp_c0 <= 0 || cfg.comp_c1 <= 0 ||
      cfg.header_bytes_per_packet <= 0 || cfg.max_payload_bytes < 1 ||
      cfg.bits_per_sample <= 0 || cfg.sampling_interval_s <= 0 ||
      cfg.retransmission_mult <= 0)
    throw InputError("all energy config fields must be positive");
}

PacketizeResult packetize(std::uint64_t payload_bits, const EnergyConfig& cfg) {
  if (payload_bits == 0) return {0, 0};
  std::uint64_t payload_cap = 8ULL * static_cast<std::uint64_t>(cfg.max_payload_bytes);
  std::uint64_t packets = (payload_bits + payload_cap - 1) / payload_cap;
  std::uint64_t total =
      payload_bits + packets * 8ULL * static_cast<std::uint64_t>(cfg.header_bytes_per_packet);
  return {packets, total};
}

RdCurve make_classless(const CurveSet& set, const std::vector<double>& grid) {
  std::vector<RdCurve> curves;
  for (const auto& [cls, curve] : set.per_class) curves.push_back(curve);
  if (curves.empty()) throw InputError("make_classless: no class curves");
  RdCurve avg = average_curve(curves, grid);
  avg.class_label.reset();
  return avg;
}

ReportPeriodResult run_period(const NodeSpec& node, const TimeSeriesWindow& window,
                              Strategy strategy, double xi_pct, const CurveSet& curves,
                              const EnergyConfig& cfg) {
  validate(cfg);
  validate(window);
  const std::size_t n = window.samples.size();
  SampleEncoding enc{cfg.bits_per_sample};
  std::uint64_t raw = raw_bits(window, enc);

  ReportPeriodResult res;
  res.node_id = node.node_id;
  res.strategy = strategy;
  res.xi_pct = xi_pct;

  std::uint64_t payload;
  if (strategy == Strategy::NoCompression) {
    payload = raw;
    res.energy_comp = 0.0;
    res.measured_distortion_pct = 0.0;
  } else {
    const RdCurve* curve;
    if (strategy == Strategy::DctClassless) {
      curve = &curves.classless;
    } else {
      auto it = curves.per_class.find(node.assigned_class);
      if (it == curves.per_class.end())
        throw InputError(std::string("no curve for class ") + to_string(node.assigned_class));
      curve = &it->second;
    }
    const auto [lo, hi] =
        std::minmax_element(window.samples.begin(), window.samples.end());
    std::size_t k;
    if (*lo == *hi) {
      k = 1;  // constant window: one coefficient reproduces it
    } else {
      ToleranceLookup lk = min_rate_for_tolerance(*curve, xi_pct, n, enc);
      k = lk.k_equiv;
    }
    DctModel m = dct_compress_rate(window, k);
    payload = model_bits(m, enc);
    if (payload >= raw) payload = raw;  // rate cap: never send more than raw
    res.energy_comp = comp_energy(n, cfg);
    res.measured_distortion_pct =
        *lo == *hi ? 0.0 : distortion(window, dct_reconstruct(m));
  }

  PacketizeResult pk = packetize(payload, cfg);
  res.packets = pk.packets;
  res.bits_sent = pk.total_bits;
  res.energy_tx = static_cast<double>(pk.total_bits) * cfg.e_tx_per_bit *
                  cfg.retransmission_mult;
  return res;
}

SimulationReport simulate(const Scenario& scenario, const CurveSet& curves,
                          std::uint64_t seed) {
  if (scenario.nodes.empty() || scenario.strategies.empty() || scenario.xi_grid_pct.empty())
    throw InputError("simulate: empty scenario");
  validate(scenario.config);

  SimulationReport rep;
  // Fixed iteration order (node, strategy, xi) keeps runs reproducible.
  for (std::size_t ni = 0; ni < scenario.nodes.size(); ++ni) {
    const NodeSpec& node = scenario.nodes[ni];
    for (std::size_t xi_idx = 0; xi_idx < scenario.xi_grid_pct.size(); ++xi_idx) {
      // One fresh window per node and grid point, shared across strategies so
      // they are compared on identical data.
      TimeSeriesWindow w;
      if (!node.csv_source.empty()) {
        auto loaded = load_csv(node.csv_source, scenario.window_len);
        w = loaded.windows[xi_idx % loaded.windows.size()];
        w.class_label = node.true_class;
      } else {
        std::uint64_t wseed = seed ^ (node.window_seed * 0x100000001B3ULL) ^
                              (static_cast<std::uint64_t>(xi_idx) << 32);
        w = gen_synthetic(node.true_class, scenario.window_len, wseed, scenario.generator);
      }
      for (Strategy st : scenario.strategies)
        rep.results.push_back(run_period(node, w, st, scenario.xi_grid_pct[xi_idx], curves,
                                         scenario.config));
    }
  }

  // Aggregates per (strategy, xi) overall and per true class.
  for (Strategy st : scenario.strategies) {
    for (double xi : scenario.xi_grid_pct) {
      for (int cls = -1; cls < kNumClasses; ++cls) {
        double e_sum = 0.0, d_sum = 0.0, d_max = 0.0;
        std::size_t count = 0;
        for (std::size_t ni = 0; ni < scenario.nodes.size(); ++ni) {
          if (cls >= 0 && scenario.nodes[ni].true_class != static_cast<SignalClass>(cls))
            continue;
          for (const auto& r : rep.results) {
            if (r.node_id != scenario.nodes[ni].node_id || r.strategy != st ||
                r.xi_pct != xi)
              continue;
            e_sum += r.energy_tx + r.energy_comp;
            d_sum += r.measured_distortion_pct;
            d_max = std::max(d_max, r.measured_distortion_pct);
            ++count;
          }
        }
        if (count == 0) continue;
        Aggregate a;
        a.strategy = st;
        if (cls >= 0) a.true_class = static_cast<SignalClass>(cls);
        a.xi_pct = xi;
        a.mean_energy_j = e_sum / static_cast<double>(count);
        a.mean_distortion_pct = d_sum / static_cast<double>(count);
        a.max_distortion_pct = d_max;
        rep.aggregates.push_back(a);
      }
    }
  }
  return rep;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  Scenario sc;
  for (const auto& jn : j.at("nodes")) {
    NodeSpec n;
    n.node_id = jn.at("id").get<std::string>();
    auto tc = signal_class_from_string(jn.at("class").get<std::string>());
    if (!tc) throw InputError("unknown node class in scenario");
    n.true_class = *tc;
    n.assigned_class = n.true_class;
    if (jn.contains("assigned_class")) {
      auto ac = signal_class_from_string(jn.at("assigned_class").get<std::string>());
      if (!ac) throw InputError("unknown assigned_class in scenario");
      n.assigned_class = *ac;
    }
    if (jn.contains("seed")) n.window_seed = jn.at("seed").get<std::uint64_t>();
    if (jn.contains("csv")) n.csv_source = jn.at("csv").get<std::string>();
    sc.nodes.push_back(std::move(n));
  }
  for (const auto& js : j.at("strategies")) {
    auto st = strategy_from_string(js.get<std::string>());
    if (!st) throw InputError("unknown strategy in scenario");
    sc.strategies.push_back(*st);
  }
  sc.xi_grid_pct = j.at("xi_grid_pct").get<std::vector<double>>();
  if (j.contains("window_len")) sc.window_len = j.at("window_len").get<std::size_t>();
  if (j.contains("config")) {
    const auto& jc = j.at("config");
    auto set = [&](const char* key, auto& field) {
      if (jc.contains(key)) field = jc.at(key).get<std::decay_t<decltype(field)>>();
    };
    set("e_tx_per_bit", sc.config.e_tx_per_bit);
    set("comp_c0", sc.config.comp_c0);
    set("comp_c1", sc.config.comp_c1);
    set("header_bytes_per_packet", sc.config.header_bytes_per_packet);
    set("max_payload_bytes", sc.config.max_payload_bytes);
    set("bits_per_sample", sc.config.bits_per_sample);
    set("sampling_interval_s", sc.config.sampling_interval_s);
    set("retransmission_mult", sc.config.retransmission_mult);
  }
  return sc;
}

void write_results_csv(const SimulationReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "node_id,strategy,xi_pct,bits_sent,packets,energy_tx_j,energy_comp_j,"
         "measured_distortion_pct\n";
  for (const auto& r : rep.results) {
    out << r.node_id << "," << to_string(r.strategy) << "," << fmt_double(r.xi_pct) << ","
        << r.bits_sent << "," << r.packets << "," << fmt_double(r.energy_tx) << ","
        << fmt_double(r.energy_comp) << "," << fmt_double(r.measured_distortion_pct) << "\n";
  }
}

void write_aggregates_json(const SimulationReport& rep, const Scenario& scenario,
                           const std::string& path) {
  nlohmann::json j;
  auto& cfg = j["config"];
  cfg["e_tx_per_bit"] = scenario.config.e_tx_per_bit;
  cfg["comp_c0"] = scenario.config.comp_c0;
  cfg["comp_c1"] = scenario.config.comp_c1;
  cfg["header_bytes_per_packet"] = scenario.config.header_bytes_per_packet;
  cfg["max_payload_bytes"] = scenario.config.max_payload_bytes;
  cfg["bits_per_sample"] = scenario.config.bits_per_sample;
  cfg["sampling_interval_s"] = scenario.config.sampling_interval_s;
  cfg["retransmission_mult"] = scenario.config.retransmission_mult;
  j["window_len"] = scenario.window_len;
  j["report_period_s"] =
      static_cast<double>(scenario.window_len) * scenario.config.sampling_interval_s;
  auto& aggs = j["aggregates"] = nlohmann::json::array();
  for (const auto& a : rep.aggregates) {
    aggs.push_back({{"strategy", to_string(a.strategy)},
                    {"class", a.true_class ? to_string(*a.true_class) : "all"},
                    {"xi_pct", a.xi_pct},
                    {"mean_energy_j", a.mean_energy_j},
                    {"mean_distortion_pct", a.mean_distortion_pct},
                    {"max_distortion_pct", a.max_distortion_pct}});
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace rdclass
