#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdclass/timeseries.hpp"

namespace rdclass {

enum class Algorithm : int { Ltc = 0, Dct = 1 };

const char* to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(const std::string& s);

// Per-sample error budget, in percent of the window's value range.
struct ErrorBudget {
  double epsilon_pct = 0.0;

  double absolute(const TimeSeriesWindow& w) const;
};

struct LtcModel {
  struct Endpoint {
    std::size_t index;  // 1-based sample index
    double value;
  };
  std::vector<Endpoint> endpoints;
  std::size_t n_original = 0;
};

struct DctModel {
  std::vector<double> coeffs;  // lowest frequency first
  std::size_t n_original = 0;
};

struct RdPoint {
  double distortion_pct;
  double rate;
};

struct RdCurve {
  std::vector<RdPoint> points;  // distortion ascending, rate non-increasing
  Algorithm algorithm = Algorithm::Ltc;
  std::optional<SignalClass> class_label;
};

void validate(const LtcModel& m);
void validate(const DctModel& m);

LtcModel ltc_compress(const TimeSeriesWindow& x, const ErrorBudget& eps);
TimeSeriesWindow ltc_reconstruct(const LtcModel& m);

// Orthonormal DCT-II / DCT-III pair.
std::vector<double> dct_forward(const std::vector<double>& x);
std::vector<double> dct_inverse(const std::vector<double>& coeffs);

DctModel dct_compress(const TimeSeriesWindow& x, const ErrorBudget& eps);
DctModel dct_compress_rate(const TimeSeriesWindow& x, std::size_t k);
TimeSeriesWindow dct_reconstruct(const DctModel& m);

std::size_t index_field_bits(std::size_t n);  // ceil(log2 n)
std::uint64_t model_bits(const LtcModel& m, const SampleEncoding& enc);
std::uint64_t model_bits(const DctModel& m, const SampleEncoding& enc);

struct RateResult {
  double rate;        // in (0, 1]
  bool fallback_raw;  // model not smaller than raw; transmit uncompressed
};

RateResult rate(std::uint64_t model_bits, std::uint64_t raw_bits);

// Def. 2 distortion, percent of range. Throws ComputeError for a zero-range
// window with an imperfect reconstruction.
double distortion(const TimeSeriesWindow& x, const TimeSeriesWindow& xhat);

// Default sweep grid, percent of range.
const std::vector<double>& default_eps_grid();

RdCurve rd_sweep(const TimeSeriesWindow& x, Algorithm alg, const std::vector<ErrorBudget>& grid,
                 const SampleEncoding& enc = {});

RdCurve average_curve(const std::vector<RdCurve>& curves, const std::vector<double>& grid);

// DCT curve for provisioning a fleet of like windows with one coefficient
// count: mean distortion across the windows at each fixed k. Unlike
// average_curve (mean rate at fixed distortion), looking up a tolerance on
// this curve yields the k whose fleet-mean distortion matches it, which is
// what a class-aware transmitter needs. Windows must share one length.
// distortion_margin inflates the distortion axis so a tolerance lookup
// over-provisions slightly, covering coefficient-count granularity and
// train/deploy sampling drift.
RdCurve dct_provisioning_curve(const std::vector<TimeSeriesWindow>& windows,
                               const SampleEncoding& enc = {},
                               double distortion_margin = 0.1);

// Rate at the requested tolerance by linear interpolation, clamped at curve
// ends, plus the equivalent DCT coefficient count for that rate.
struct ToleranceLookup {
  double rate;
  std::size_t k_equiv;
};

ToleranceLookup min_rate_for_tolerance(const RdCurve& c, double xi_pct, std::size_t n,
                                       const SampleEncoding& enc = {});

// Serialization per the curve file conventions: CSV of points plus a JSON
// sidecar with algorithm/class/window-count metadata.
void write_curve_csv(const RdCurve& c, const std::string& path);
void write_curve_sidecar(const RdCurve& c, std::size_t n_windows, const std::string& path);
RdCurve read_curve_csv(const std::string& csv_path, const std::string& sidecar_path);

std::string to_json(const LtcModel& m);
std::string to_json(const DctModel& m);

}  // namespace rdclass
