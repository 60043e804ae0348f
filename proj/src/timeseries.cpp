#include "rdclass/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace rdclass {

namespace {

constexpr double kTau = 6.283185307179586476925
;

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Natural cubic spline through (xs, ys); evaluates at integer t.
class NaturalSpline {
 public:
  NaturalSpline(std::vector<double> xs, std::vector<double> ys)
      : xs_(std::move(xs)), ys_(std::move(ys)), m_(xs_.size(), 0.0) {
    const std::size_t n = xs_.size();
    if (n < 3) return;
    // Tridiagonal solve for second derivatives, natural end conditions.
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h0 = xs_[i] - xs_[i - 1];
      double h1 = xs_[i + 1] - xs_[i];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      d[i] = 6.0 * ((ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      double f = a[i] / b[i - 1];
      b[i] -= f * c[i - 1];
      d[i] -= f * d[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
      if (i == 1) break;
    }
  }

  double operator()(double x) const {
    std::size_t hi = 1;
    while (hi + 1 < xs_.size() && xs_[hi] < x) ++hi;
    std::size_t lo = hi - 1;
    double h = xs_[hi] - xs_[lo];
    double t = (x - xs_[lo]) / h;
    double u = 1.0 - t;
    return u * ys_[lo] + t * ys_[hi] +
           h * h / 6.0 * ((u * u * u - u) * m_[lo] + (t * t * t - t) * m_[hi]);
  }

 private:
  std::vector<double> xs_, ys_, m_;
};

TimeSeriesWindow gen_noisy(std::size_t n, std::mt19937_64& rng, const GeneratorConfig& cfg) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> walk(n);
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w += gauss(rng);
    walk[i] = w;
  }
  // Rescale the walk to the configured amplitude so the noise component
  // stays dominant regardless of n.
  double mean = 0.0;
  for (double v : walk) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : walk) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  double scale = var > 0.0 ? cfg.noisy_walk_amplitude / std::sqrt(var) : 0.0;

  // Unit-variance AR(1) noise: erratic but with a smoothly decaying spectrum,
  // like real sensor noise, rather than flat white noise.
  const double phi = cfg.noisy_ar_coeff;
  if (phi < 0.0 || phi >= 1.0) throw InputError("noisy_ar_coeff must be in [0, 1)");
  const double innov = std::sqrt(1.0 - phi * phi);
  TimeSeriesWindow out;
  out.samples.resize(n);
  double x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x = phi * x + innov * gauss(rng);
    out.samples[i] = x + scale * (walk[i] - mean);
  }
  return out;
}

TimeSeriesWindow gen_quasi_periodic(std::size_t n, std::mt19937_64& rng,
                                    const GeneratorConfig& cfg) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> uni01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double nd = static_cast<double>(n);
  double base_period = nd / cfg.qp_period_div_max +
                       uni01(rng) * (nd / cfg.qp_period_div_min - nd / cfg.qp_period_div_max);
  double amplitude = 1.0;

  TimeSeriesWindow out;
  out.samples.resize(n);
  double phase = 0.0;
  double cycle_amp = amplitude * (1.0 + cfg.qp_jitter * uni(rng));
  double cycle_period = base_period * (1.0 + cfg.qp_jitter * uni(rng));
  for (std::size_t i = 0; i < n; ++i) {
    double s = std::sin(kTau * phase) + cfg.qp_harmonic2 * std::sin(2.0 * kTau * phase) +
               cfg.qp_harmonic3 * std::sin(3.0 * kTau * phase);
    out.samples[i] = cycle_amp * s + cfg.qp_noise_rel * amplitude * gauss(rng);
    phase += 1.0 / cycle_period;
    if (phase >= 1.0) {
      phase -= 1.0;
      cycle_amp = amplitude * (1.0 + cfg.qp_jitter * uni(rng));
      cycle_period = base_period * (1.0 + cfg.qp_jitter * uni(rng));
    }
  }
  return out;
}

TimeSeriesWindow gen_trend(std::size_t n, std::mt19937_64& rng, const GeneratorConfig& cfg) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::size_t knots = static_cast<std::size_t>((n + 99) / 100) + 2;
  std::vector<double> xs(knots), ys(knots);
  double direction = uni(rng) >= 0.0 ? 1.0 : -1.0;
  for (std::size_t k = 0; k < knots; ++k) {
    xs[k] = static_cast<double>(k) * static_cast<double>(n - 1) / static_cast<double>(knots - 1);
    ys[k] = direction * cfg.trend_drift * static_cast<double>(k) /
                static_cast<double>(knots - 1) +
            cfg.trend_knot_jitter * uni(rng);
  }
  auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  double knot_range = *hi - *lo;

  NaturalSpline spline(xs, ys);
  TimeSeriesWindow out;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = spline(static_cast<double>(i)) + cfg.trend_noise_rel * knot_range * gauss(rng);
  return out;
}

}  // namespace

const char* to_string(SignalClass c) {
  switch (c) {
    case SignalClass::Noisy: return "noisy";
    case SignalClass::QuasiPeriodic: return "quasi_periodic";
    case SignalClass::Trend: return "trend";
  }
  return "?";
}

std::optional<SignalClass> signal_class_from_string(const std::string& s) {
  if (s == "noisy") return SignalClass::Noisy;
  if (s == "quasi_periodic" || s == "quasiperiodic") return SignalClass::QuasiPeriodic;
  if (s == "trend") return SignalClass::Trend;
  return std::nullopt;
}

void validate(const TimeSeriesWindow& w) {
  if (w.samples.size() < 2) throw InputError("window must contain at least 2 samples");
  for (double v : w.samples)
    if (!std::isfinite(v)) throw InputError("window contains non-finite sample");
}

void validate(const SampleEncoding& enc) {
  if (enc.bits_per_sample < 8 || enc.bits_per_sample > 64)
    throw InputError("bits_per_sample must be in [8, 64]");
}

CsvLoadResult load_csv(const std::string& path, std::size_t window_len) {
  if (window_len < 2) throw InputError("window_len must be >= 2");
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);

  std::vector<double> values;
  std::string line;
  bool first = true;
  bool any_numeric = false;
  double prev_ts = -std::numeric_limits<double>::infinity();
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    double v = 0.0, ts = 0.0;
    auto comma = t.find(',');
    bool ok;
    bool has_ts = comma != std::string::npos;
    if (has_ts) {
      ok = parse_double(trim(t.substr(0, comma)), ts) &&
           parse_double(trim(t.substr(comma + 1)), v);
    } else {
      ok = parse_double(t, v);
    }
    if (!ok) {
      if (first) {  // header line
        first = false;
        continue;
      }
      throw InputError("unparseable record at line " + std::to_string(line_no));
    }
    first = false;
    any_numeric = true;
    if (has_ts) {
      if (ts < prev_ts)
        throw InputError("timestamps not ordered at line " + std::to_string(line_no));
      prev_ts = ts;
    }
    values.push_back(v);
  }
  if (!any_numeric) throw InputError("no parseable numeric column in " + path);

  CsvLoadResult res;
  std::size_t n_windows = values.size() / window_len;
  res.discarded_samples = values.size() - n_windows * window_len;
  for (std::size_t w = 0; w < n_windows; ++w) {
    TimeSeriesWindow win;
    win.samples.assign(values.begin() + static_cast<long>(w * window_len),
                       values.begin() + static_cast<long>((w + 1) * window_len));
    win.source_id = path + "#" + std::to_string(w);
    bool finite = std::all_of(win.samples.begin(), win.samples.end(),
                              [](double v) { return std::isfinite(v); });
    if (finite)
      res.windows.push_back(std::move(win));
    else
      ++res.dropped_windows;
  }
  if (res.windows.empty() && res.dropped_windows == 0)
    throw InputError("zero complete windows in " + path);
  if (res.windows.empty()) throw InputError("all windows dropped (non-finite samples)");
  return res;
}

GeneratorConfig load_generator_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open generator config: " + path);
  GeneratorConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError("expected key=value at line " + std::to_string(line_no));
    std::string key = trim(t.substr(0, eq));
    double val;
    if (!parse_double(trim(t.substr(eq + 1)), val))
      throw InputError("non-numeric value at line " + std::to_string(line_no));
    if (key == "noisy_walk_amplitude") cfg.noisy_walk_amplitude = val;
    else if (key == "noisy_ar_coeff") cfg.noisy_ar_coeff = val;
    else if (key == "qp_period_div_min") cfg.qp_period_div_min = val;
    else if (key == "qp_period_div_max") cfg.qp_period_div_max = val;
    else if (key == "qp_jitter") cfg.qp_jitter = val;
    else if (key == "qp_noise_rel") cfg.qp_noise_rel = val;
    else if (key == "qp_harmonic2") cfg.qp_harmonic2 = val;
    else if (key == "qp_harmonic3") cfg.qp_harmonic3 = val;
    else if (key == "trend_drift") cfg.trend_drift = val;
    else if (key == "trend_knot_jitter") cfg.trend_knot_jitter = val;
    else if (key == "trend_noise_rel") cfg.trend_noise_rel = val;
    else throw InputError("unknown generator config key: " + key);
  }
  return cfg;
}

TimeSeriesWindow gen_synthetic(SignalClass cls, std::size_t n, std::uint64_t seed,
                               const GeneratorConfig& cfg) {
  if (n < 2) throw InputError("n must be >= 2");
  // Decorrelate streams across (class, seed) pairs.
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(cls) + 1);
  TimeSeriesWindow out;
  switch (cls) {
    case SignalClass::Noisy: out = gen_noisy(n, rng, cfg); break;
    case SignalClass::QuasiPeriodic: out = gen_quasi_periodic(n, rng, cfg); break;
    case SignalClass::Trend: out = gen_trend(n, rng, cfg); break;
  }
  out.source_id = std::string("synthetic:") + to_string(cls) + ":" + std::to_string(seed);
  out.class_label = cls;
  return out;
}

std::uint64_t raw_bits(const TimeSeriesWindow& w, const SampleEncoding& enc) {
  return static_cast<std::uint64_t>(w.samples.size()) *
         static_cast<std::uint64_t>(enc.bits_per_sample);
}

}  // namespace rdclass
