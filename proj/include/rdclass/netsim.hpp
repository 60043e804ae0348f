#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rdclass/compression.hpp"
#include "rdclass/timeseries.hpp"

namespace rdclass {

enum class Strategy : int { NoCompression = 0, DctClassless = 1, DctClassAware = 2 };

const char* to_string(Strategy s);
std::optional<Strategy> strategy_from_string(const std::string& s);

struct EnergyConfig {
  double e_tx_per_bit = 2.3e-7;    // J/bit
  double comp_c0 = 1e-9;           // J per (N * log2 N) unit
  double comp_c1 = 5e-9;           // J per sample
  int header_bytes_per_packet = 13;
  int max_payload_bytes = 114;
  int bits_per_sample = 16;
  double sampling_interval_s = 10.0;
  double retransmission_mult = 1.0;  // CSMA/CA abstraction
};

void validate(const EnergyConfig& cfg);

struct NodeSpec {
  std::string node_id;
  SignalClass true_class = SignalClass::Noisy;
  SignalClass assigned_class = SignalClass::Noisy;  // classifier output
  std::uint64_t window_seed = 0;                    // generator seed
  std::string csv_source;                           // used instead when non-empty
};

struct ReportPeriodResult {
  std::string node_id;
  Strategy strategy = Strategy::NoCompression;
  double xi_pct = 0.0;
  std::uint64_t bits_sent = 0;
  std::uint64_t packets = 0;
  double energy_tx = 0.0;
  double energy_comp = 0.0;
  double measured_distortion_pct = 0.0;
};

struct PacketizeResult {
  std::uint64_t packets;
  std::uint64_t total_bits;
};

PacketizeResult packetize(std::uint64_t payload_bits, const EnergyConfig& cfg);

// Rate-distortion curves the strategies draw from: one per class plus the
// classless average.
struct CurveSet {
  std::map<SignalClass, RdCurve> per_class;
  RdCurve classless;
};

// Equal-weight pointwise mean of the three class curves.
RdCurve make_classless(const CurveSet& set, const std::vector<double>& grid);

ReportPeriodResult run_period(const NodeSpec& node, const TimeSeriesWindow& window,
                              Strategy strategy, double xi_pct, const CurveSet& curves,
                              const EnergyConfig& cfg);

struct Scenario {
  std::vector<NodeSpec> nodes;
  std::vector<Strategy> strategies;
  std::vector<double> xi_grid_pct;
  EnergyConfig config;
  std::size_t window_len = 500;
  GeneratorConfig generator;
};

struct Aggregate {
  Strategy strategy;
  std::optional<SignalClass> true_class;  // nullopt = all nodes
  double xi_pct;
  double mean_energy_j;
  double mean_distortion_pct;
  double max_distortion_pct;
};

struct SimulationReport {
  std::vector<ReportPeriodResult> results;
  std::vector<Aggregate> aggregates;
};

SimulationReport simulate(const Scenario& scenario, const CurveSet& curves,
                          std::uint64_t seed);

Scenario load_scenario(const std::string& path);
void write_results_csv(const SimulationReport& rep, const std::string& path);
void write_aggregates_json(const SimulationReport& rep, const Scenario& scenario,
                           const std::string& path);

}  // namespace rdclass
