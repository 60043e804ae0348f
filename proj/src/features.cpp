#include "rdclass/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rdclass/compression.hpp"

#include <nlohmann/json.hpp>

namespace rdclass {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sample standard deviation (n-1 denominator) used throughout the bank.
double std_of(const std::vector<double>& x, double mean) {
  if (x.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double acf(const std::vector<double>& x, double mean, double ss, std::size_t lag) {
  double acc = 0.0;
  for (std::size_t t = 0; t + lag < x.size(); ++t)
    acc += (x[t] - mean) * (x[t + lag] - mean);
  return acc / ss;
}

double apen(const std::vector<double>& x, double r) {
  const std::size_t n = x.size();
  auto phi = [&](std::size_t m) {
    const std::size_t cnt = n - m + 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < cnt; ++i) {
      std::size_t matches = 0;
      for (std::size_t j = 0; j < cnt; ++j) {
        bool ok = true;
        for (std::size_t k = 0; k < m; ++k) {
          if (std::fabs(x[i + k] - x[j + k]) > r) {
            ok = false;
            break;
          }
        }
        if (ok) ++matches;
      }
      acc += std::log(static_cast<double>(matches) / static_cast<double>(cnt));
    }
    return acc / static_cast<double>(cnt);
  };
  return phi(2) - phi(3);
}

double permutation_entropy3(const std::vector<double>& x) {
  std::array<std::size_t, 6> counts{};
  const std::size_t n = x.size();
  for (std::size_t t = 0; t + 2 < n; ++t) {
    // Ordinal pattern with stable (index-order) tie handling.
    std::array<int, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return x[t + a] < x[t + b]; });
    std::size_t code = static_cast<std::size_t>(idx[0]) * 2;
    code += idx[1] > idx[2] ? 1 : 0;
    counts[code] += 1;
  }
  double total = static_cast<double>(n - 2);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h / std::log(6.0);
}

// Kaspar-Schuster phrase count for the LZ76 parsing.
std::size_t lz76(const std::vector<int>& s) {
  const std::size_t n = s.size();
  std::size_t c = 1, l = 1, i = 0, k = 1, k_max = 1;
  while (true) {
    if (s[i + k - 1] == s[l + k - 1]) {
      ++k;
      if (l + k > n) {
        ++c;
        break;
      }
    } else {
      if (k > k_max) k_max = k;
      ++i;
      if (i == l) {
        ++c;
        l += k_max;
        if (l + 1 > n) break;
        i = 0;
        k = 1;
        k_max = 1;
      } else {
        k = 1;
      }
    }
  }
  return c;
}

}  // namespace

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names{
      "mean",
      "std",
      "skewness",
      "kurtosis_excess",
      "median",
      "iqr",
      "outlier_frac_2std",
      "acf_lag1",
      "acf_lag2",
      "acf_lag5",
      "acf_lag10",
      "first_neg_acf_lag",
      "spectral_centroid",
      "spectral_entropy",
      "lowfreq_energy_frac",
      "statav_25",
      "sliding_std_ratio",
      "apen_m2",
      "perm_entropy_o3",
      "lz_complexity",
      "time_rev_asym",
      "ar2_residual_ratio",
      "trend_slope_norm",
      "trend_r2",
  };
  return names;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw InputError("quantile of empty vector");
  std::sort(v.begin(), v.end());
  double h = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

FeatureVector extract(const TimeSeriesWindow& w) {
  validate(w);
  const std::vector<double>& x = w.samples;
  const std::size_t n = x.size();
  if (n < kMinFeatureWindow) throw InputError("window too short for feature extraction");

  FeatureVector fv;
  fv.values.reserve(kFeatureCount);
  const double nd = static_cast<double>(n);

  const double mean = mean_of(x);
  const double sd = std_of(x, mean);
  const bool degen = sd == 0.0;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= nd;
  m3 /= nd;
  m4 /= nd;

  fv.values.push_back(mean);                                              // 1
  fv.values.push_back(sd);                                                // 2
  fv.values.push_back(degen ? 0.0 : m3 / std::pow(m2, 1.5));              // 3
  fv.values.push_back(degen ? 0.0 : m4 / (m2 * m2) - 3.0);                // 4
  fv.values.push_back(quantile(x, 0.5));                                  // 5
  fv.values.push_back(quantile(x, 0.75) - quantile(x, 0.25));             // 6

  std::size_t outliers = 0;
  for (double v : x)
    if (std::fabs(v - mean) > 2.0 * sd) ++outliers;
  fv.values.push_back(degen ? 0.0 : static_cast<double>(outliers) / nd);  // 7

  double ss = m2 * nd;
  for (std::size_t lag : {1u, 2u, 5u, 10u})                               // 8-11
    fv.values.push_back(degen ? 1.0 : acf(x, mean, ss, lag));

  double first_neg = 1.0;                                                 // 12
  if (!degen) {
    for (std::size_t lag = 1; lag < n; ++lag) {
      if (acf(x, mean, ss, lag) < 0.0) {
        first_neg = static_cast<double>(lag) / nd;
        break;
      }
    }
  }
  fv.values.push_back(first_neg);

  // Spectral features on the mean-removed window, so the DC offset does not
  // mask the shape of the spectrum.
  std::vector<double> centered(x);
  for (double& v : centered) v -= mean;
  std::vector<double> spec = dct_forward(centered);
  double energy = 0.0, mag_sum = 0.0, centroid = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double a = std::fabs(spec[k]);
    mag_sum += a;
    centroid += a * static_cast<double>(k) / (nd - 1.0);
    energy += spec[k] * spec[k];
  }
  fv.values.push_back(mag_sum > 0.0 ? centroid / mag_sum : 0.0);          // 13
  double sent = 0.0;
  if (energy > 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      double p = spec[k] * spec[k] / energy;
      if (p > 0.0) sent -= p * std::log(p);
    }
    sent /= std::log(nd);
  }
  fv.values.push_back(sent);                                              // 14
  std::size_t low = std::max<std::size_t>(1, n / 10);
  double low_energy = 0.0;
  for (std::size_t k = 0; k < low; ++k) low_energy += spec[k] * spec[k];
  fv.values.push_back(energy > 0.0 ? low_energy / energy : 1.0);          // 15

  const std::size_t block = 25;
  const std::size_t n_blocks = n / block;
  double statav = 0.0, slide = 0.0;
  if (!degen && n_blocks >= 2) {
    std::vector<double> bmeans(n_blocks), bstds(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) {
      std::vector<double> blk(x.begin() + static_cast<long>(b * block),
                              x.begin() + static_cast<long>((b + 1) * block));
      bmeans[b] = mean_of(blk);
      bstds[b] = std_of(blk, bmeans[b]);
    }
    statav = std_of(bmeans, mean_of(bmeans)) / sd;
    slide = mean_of(bstds) / sd;
  }
  fv.values.push_back(statav);                                            // 16
  fv.values.push_back(slide);                                             // 17

  fv.values.push_back(degen ? 0.0 : apen(x, 0.2 * sd));                   // 18
  fv.values.push_back(degen ? 0.0 : permutation_entropy3(x));             // 19

  double med = quantile(x, 0.5);
  std::vector<int> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = x[i] > med ? 1 : 0;
  fv.values.push_back(static_cast<double>(lz76(bits)) * std::log2(nd) / nd);  // 20

  double d2 = 0.0, d3 = 0.0;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    double d = x[t + 1] - x[t];
    d2 += d * d;
    d3 += d * d * d;
  }
  d2 /= nd - 1.0;
  d3 /= nd - 1.0;
  fv.values.push_back(d2 > 0.0 ? d3 / std::pow(d2, 1.5) : 0.0);           // 21

  double ar_ratio = 0.0;                                                  // 22
  if (!degen) {
    double r1 = acf(x, mean, ss, 1);
    double r2 = acf(x, mean, ss, 2);
    double denom = 1.0 - r1 * r1;
    if (std::fabs(denom) > 1e-12) {
      double phi1 = r1 * (1.0 - r2) / denom;
      double phi2 = (r2 - r1 * r1) / denom;
      ar_ratio = 1.0 - phi1 * r1 - phi2 * r2;
    }
  }
  fv.values.push_back(ar_ratio);

  // Least-squares line x_i ~ a*i + b over i = 0..n-1.
  double ti = (nd - 1.0) / 2.0;
  double stt = 0.0, stx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dt = static_cast<double>(i) - ti;
    stt += dt * dt;
    stx += dt * (x[i] - mean);
  }
  double slope = stx / stt;
  double ss_fit = slope * stx;  // explained sum of squares
  fv.values.push_back(degen ? 0.0 : slope * nd / sd);                     // 23
  fv.values.push_back(degen ? 0.0 : ss_fit / ss);                         // 24

  return fv;
}

SignalFeatureMatrix filter_matrix(const std::vector<std::vector<double>>& raw,
                                  const std::vector<SignalClass>& labels,
                                  const std::vector<std::string>& names, BuildStats* stats,
                                  double column_drop_frac) {
  if (raw.size() != labels.size())
    throw InputError("rows and labels must have equal lengths");
  if (raw.empty()) throw InputError("filter_matrix with no rows");
  const std::size_t m = names.size();
  for (const auto& row : raw)
    if (row.size() != m) throw InputError("filter_matrix: ragged rows");
  std::vector<std::size_t> bad_count(m, 0);
  for (const auto& row : raw)
    for (std::size_t j = 0; j < m; ++j)
      if (!std::isfinite(row[j])) ++bad_count[j];

  std::vector<std::size_t> keep_cols;
  BuildStats local;
  for (std::size_t j = 0; j < m; ++j) {
    if (static_cast<double>(bad_count[j]) >
        column_drop_frac * static_cast<double>(raw.size()))
      local.dropped_columns.push_back(j);
    else
      keep_cols.push_back(j);
  }

  SignalFeatureMatrix out;
  for (std::size_t j : keep_cols) out.feature_names.push_back(names[j]);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::vector<double> row;
    row.reserve(keep_cols.size());
    bool ok = true;
    for (std::size_t j : keep_cols) {
      if (!std::isfinite(raw[i][j])) {
        ok = false;
        break;
      }
      row.push_back(raw[i][j]);
    }
    if (!ok) {
      ++local.dropped_rows;
      continue;
    }
    out.rows.push_back(std::move(row));
    out.labels.push_back(labels[i]);
  }
  if (stats) *stats = local;
  if (out.rows.empty()) throw ComputeError("all rows dropped while building feature matrix");
  if (out.feature_names.empty()) throw ComputeError("all columns dropped");
  return out;
}

SignalFeatureMatrix build_matrix(const std::vector<TimeSeriesWindow>& windows,
                                 const std::vector<SignalClass>& labels, BuildStats* stats,
                                 double column_drop_frac) {
  if (windows.size() != labels.size())
    throw InputError("windows and labels must have equal lengths");
  if (windows.empty()) throw InputError("build_matrix with no windows");
  std::vector<std::vector<double>> raw;
  raw.reserve(windows.size());
  for (const auto& w : windows) raw.push_back(extract(w).values);
  return filter_matrix(raw, labels, feature_names(), stats, column_drop_frac);
}

SignalFeatureMatrix normalize(const SignalFeatureMatrix& m) {
  if (m.normalized) throw InputError("matrix already normalized");
  if (m.rows.empty()) throw InputError("cannot normalize empty matrix");
  SignalFeatureMatrix out = m;
  out.normalized = true;
  out.degenerate_columns.clear();
  const std::size_t cols = m.n_cols();
  const std::size_t rows = m.n_rows();
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<double> col(rows);
    for (std::size_t i = 0; i < rows; ++i) col[i] = m.rows[i][j];
    double med = quantile(col, 0.5);
    double iqr = quantile(col, 0.75) - quantile(col, 0.25);
    if (iqr == 0.0) {
      for (std::size_t i = 0; i < rows; ++i) out.rows[i][j] = 0.5;
      out.degenerate_columns.push_back(j);
      continue;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 1.0 / (1.0 + std::exp(-(col[i] - med) / (1.35 * iqr)));
      out.rows[i][j] = s;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    double span = hi - lo;
    for (std::size_t i = 0; i < rows; ++i)
      out.rows[i][j] = span > 0.0 ? (out.rows[i][j] - lo) / span : 0.5;
  }
  return out;
}

void write_matrix_csv(const SignalFeatureMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  for (std::size_t j = 0; j < m.feature_names.size(); ++j) out << m.feature_names[j] << ",";
  out << "label\n";
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    for (double v : m.rows[i]) out << fmt_double(v) << ",";
    out << to_string(m.labels[i]) << "\n";
  }
}

void write_matrix_sidecar(const SignalFeatureMatrix& m, const BuildStats& stats,
                          const std::string& path) {
  nlohmann::json j;
  j["bank_version"] = kFeatureBankVersion;
  j["normalized"] = m.normalized;
  j["dropped_rows"] = stats.dropped_rows;
  j["dropped_columns"] = stats.dropped_columns;
  j["degenerate_columns"] = m.degenerate_columns;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << "\n";
}

SignalFeatureMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  SignalFeatureMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty matrix file " + path);
  std::stringstream hdr(line);
  std::string tok;
  std::vector<std::string> cols;
  while (std::getline(hdr, tok, ',')) cols.push_back(tok);
  if (cols.empty() || cols.back() != "label")
    throw InputError("matrix file must end with a label column");
  m.feature_names.assign(cols.begin(), cols.end() - 1);
  bool all01 = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::vector<double> vals;
    std::string cell;
    for (std::size_t j = 0; j < m.feature_names.size(); ++j) {
      if (!std::getline(row, cell, ',')) throw InputError("short row in " + path);
      vals.push_back(std::stod(cell));
      if (vals.back() < 0.0 || vals.back() > 1.0) all01 = false;
    }
    if (!std::getline(row, cell, ',')) throw InputError("missing label in " + path);
    auto cls = signal_class_from_string(cell);
    if (!cls) throw InputError("unknown class label in " + path);
    m.rows.push_back(std::move(vals));
    m.labels.push_back(*cls);
  }
  if (m.rows.empty()) throw InputError("matrix file has no rows: " + path);
  m.normalized = all01;
  return m;
}

}  // namespace rdclass
