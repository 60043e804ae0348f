#pragma once

#include <string>
#include <vector>

#include "rdclass/timeseries.hpp"

namespace rdclass {

inline constexpr const char* kFeatureBankVersion = "bank-24/v1";
inline constexpr std::size_t kFeatureCount = 24;
inline constexpr std::size_t kMinFeatureWindow = 20;

const std::vector<std::string>& feature_names();

struct FeatureVector {
  std::vector<double> values;
  std::string bank_version = kFeatureBankVersion;
};

struct SignalFeatureMatrix {
  std::vector<std::vector<double>> rows;
  std::vector<SignalClass> labels;
  std::vector<std::string> feature_names;
  bool normalized = false;
  // Columns forced to 0.5 during normalization because their iqr collapsed.
  std::vector<std::size_t> degenerate_columns;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return feature_names.size(); }
};

// The fixed 24-feature bank. Degenerate (zero-std) windows take documented
// sentinel values so the row stays finite.
FeatureVector extract(const TimeSeriesWindow& x);

struct BuildStats {
  std::size_t dropped_rows = 0;
  std::vector<std::size_t> dropped_columns;
};

// Columns non-finite in more than `column_drop_frac` of rows are removed
// first; then any row still holding a non-finite entry is removed.
SignalFeatureMatrix filter_matrix(const std::vector<std::vector<double>>& raw_rows,
                                  const std::vector<SignalClass>& labels,
                                  const std::vector<std::string>& names,
                                  BuildStats* stats = nullptr,
                                  double column_drop_frac = 0.01);

SignalFeatureMatrix build_matrix(const std::vector<TimeSeriesWindow>& windows,
                                 const std::vector<SignalClass>& labels,
                                 BuildStats* stats = nullptr,
                                 double column_drop_frac = 0.01);

// Outlier-robust sigmoid per column (median / 1.35*iqr), then min-max rescale
// to [0,1]. Columns with iqr = 0 are set to 0.5 and recorded.
SignalFeatureMatrix normalize(const SignalFeatureMatrix& m);

// Type-7 (linear interpolation) quantile of a column; q in [0,1].
double quantile(std::vector<double> sorted_or_not, double q);

void write_matrix_csv(const SignalFeatureMatrix& m, const std::string& path);
void write_matrix_sidecar(const SignalFeatureMatrix& m, const BuildStats& stats,
                          const std::string& path);
SignalFeatureMatrix read_matrix_csv(const std::string& path);

}  // namespace rdclass
