#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdclass {

// Fixed order (Noisy < QuasiPeriodic < Trend) so iteration over classes is
// deterministic everywhere.
enum class SignalClass : int { Noisy = 0, QuasiPeriodic = 1, Trend = 2 };

inline constexpr int kNumClasses = 3;

const char* to_string(SignalClass c);
std::optional<SignalClass> signal_class_from_string(const std::string& s);

struct TimeSeriesWindow {
  std::vector<double> samples;
  std::string source_id;
  std::optional<SignalClass> class_label;

  std::size_t size() const { return samples.size(); }
};

struct SampleEncoding {
  int bits_per_sample = 16;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate(const TimeSeriesWindow& w);
void validate(const SampleEncoding& enc);

struct CsvLoadResult {
  std::vector<TimeSeriesWindow> windows;
  std::size_t dropped_windows = 0;   // windows containing non-finite samples
  std::size_t discarded_samples = 0; // trailing remainder shorter than window_len
};

// One record per line: `value` or `timestamp,value`. A non-numeric first line
// is treated as a header. Timestamps, when present, must be non-decreasing and
// are then ignored.
CsvLoadResult load_csv(const std::string& path, std::size_t window_len);

// Tunable shape parameters for the synthetic generators. Defaults mimic the
// qualitative look of the three classes; all overridable from a key=value file.
struct GeneratorConfig {
  // Noisy: unit-variance AR(1) noise plus a random walk rescaled to this
  // amplitude.
  double noisy_walk_amplitude = 0.2;
  double noisy_ar_coeff = 0.8;
  // QuasiPeriodic: fundamental period drawn uniformly in [n/period_div_max,
  // n/period_div_min] samples, +-10% amplitude/period jitter per cycle, two
  // harmonics, additive noise relative to amplitude.
  double qp_period_div_min = 10.0;
  double qp_period_div_max = 25.0;
  double qp_jitter = 0.015;
  double qp_noise_rel = 0.01;
  double qp_harmonic2 = 0.5;
  double qp_harmonic3 = 0.25;
  // Trend: natural cubic spline through ceil(n/100)+2 knots whose values
  // drift linearly with jitter, plus noise relative to the knot range.
  double trend_drift = 1.0;
  double trend_knot_jitter = 0.25;
  double trend_noise_rel = 0.03;
};

GeneratorConfig load_generator_config(const std::string& path);

TimeSeriesWindow gen_synthetic(SignalClass cls, std::size_t n, std::uint64_t seed,
                               const GeneratorConfig& cfg = {});

std::uint64_t raw_bits(const TimeSeriesWindow& w, const SampleEncoding& enc);

}  // namespace rdclass
