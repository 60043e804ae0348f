#include "rdclass/compression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>

#include "rdclass/kernels.hpp"

#include <nlohmann/json.hpp>

namespace rdclass {

namespace {

constexpr double kPi = 3.14159265358979323846;

double range_of(const std::vector<double>& x) {
  auto mm = kernels::active().min_max(x.data(), x.size());
  return mm.max - mm.min;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Cosine basis rows for the orthonormal DCT pair, cached per length.
// row[k][i] = cos(pi * (2i+1) * k / (2N)); scale s_0 = sqrt(1/N), s_k = sqrt(2/N).
struct DctTable {
  std::vector<std::vector<double>> rows;
  std::vector<double> scale;
};

const DctTable& dct_table(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, DctTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  DctTable t;
  t.rows.resize(n);
  t.scale.resize(n);
  double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    t.scale[k] = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    t.rows[k].resize(n);
    for (std::size_t i = 0; i < n; ++i)
      t.rows[k][i] = std::cos(kPi * (2.0 * static_cast<double>(i) + 1.0) *
                              static_cast<double>(k) / (2.0 * nd));
  }
  return cache.emplace(n, std::move(t)).first->second;
}

}  // namespace

const char* to_string(Algorithm a) { return a == Algorithm::Ltc ? "ltc" : "dct"; }

std::optional<Algorithm> algorithm_from_string(const std::string& s) {
  if (s == "ltc") return Algorithm::Ltc;
  if (s == "dct") return Algorithm::Dct;
  return std::nullopt;
}

double ErrorBudget::absolute(const TimeSeriesWindow& w) const {
  return epsilon_pct / 100.0 * range_of(w.samples);
}

void validate(const LtcModel& m) {
  if (m.endpoints.size() < 2) throw ComputeError("ltc model needs >= 2 endpoints");
  if (m.endpoints.front().index != 1) throw ComputeError("ltc model must start at index 1");
  if (m.endpoints.back().index != m.n_original)
    throw ComputeError("ltc model must end at index N");
  for (std::size_t i = 1; i < m.endpoints.size(); ++i)
    if (m.endpoints[i].index <= m.endpoints[i - 1].index)
      throw ComputeError("ltc endpoint indices must be strictly increasing");
}

void validate(const DctModel& m) {
  if (m.coeffs.empty() || m.coeffs.size() > m.n_original)
    throw ComputeError("dct model needs 1 <= K <= N coefficients");
  for (double c : m.coeffs)
    if (!std::isfinite(c)) throw ComputeError("dct coefficient not finite");
}

namespace {

// (junction value, slope) pair; the feasible set for one segment is a convex
// polygon in this plane.
struct VsPoint {
  double v;
  double s;
};

// Sutherland-Hodgman clip of a convex polygon against a*v + b*s <= c.
std::vector<VsPoint> clip_half_plane(const std::vector<VsPoint>& poly, double a,
                                     double b, double c) {
  std::vector<VsPoint> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const VsPoint& p = poly[i];
    const VsPoint& q = poly[(i + 1) % m];
    const double gp = a * p.v + b * p.s - c;
    const double gq = a * q.v + b * q.s - c;
    if (gp <= 0.0) out.push_back(p);
    if ((gp < 0.0 && gq > 0.0) || (gp > 0.0 && gq < 0.0)) {
      const double t = gp / (gp - gq);
      out.push_back({p.v + t * (q.v - p.v), p.s + t * (q.s - p.s)});
    }
  }
  return out;
}

// Region for a fresh segment anchored at ordinate interval [alo, ahi] whose
// first covered sample (distance 1) must lie within [y - e, y + e].
std::vector<VsPoint> seed_region(double alo, double ahi, double y, double e) {
  return {{alo, y - e - alo}, {ahi, y - e - ahi}, {ahi, y + e - ahi}, {alo, y + e - alo}};
}

}  // namespace

LtcModel ltc_compress(const TimeSeriesWindow& x, const ErrorBudget& eps) {
  validate(x);
  if (eps.epsilon_pct < 0) throw InputError("epsilon_pct must be >= 0");
  const std::vector<double>& s = x.samples;
  const std::size_t n = s.size();
  LtcModel m;
  m.n_original = n;

  if (range_of(s) == 0.0) {  // constant window: one segment
    m.endpoints = {{1, s.front()}, {n, s.back()}};
    return m;
  }
  // Clip against a hair less than the budget: selected lines often sit on the
  // feasible boundary, and reconstruction arithmetic rounds differently from
  // the clipping arithmetic. The slack dwarfs that rounding noise while being
  // far too small to change which runs are feasible on real data.
  const double e = eps.absolute(x) * (1.0 - 1e-9);

  // Greedy segmentation into maximal disjoint runs: each run [p, q] is the
  // longest prefix coverable by a single free line within +-e, and the next
  // run starts at q+1. Each run stores both of its endpoints, so consecutive
  // segments do not share a junction ordinate. Maximal-prefix runs are the
  // fewest possible (sub-runs of feasible runs stay feasible), and a feasible
  // run at a tighter budget stays feasible at a looser one, which makes the
  // endpoint count - and hence model_bits - provably non-increasing in
  // epsilon. Continuous segmentations (one shared junction value) lack that
  // guarantee: the junction drifts with the budget and occasionally costs
  // extra segments at looser budgets.
  //
  // Feasibility is tracked as a convex polygon over (anchor ordinate, slope);
  // any line within e of all covered samples has its ordinate at p inside
  // [s[p]-e, s[p]+e], so that interval seeds the polygon exactly.
  std::size_t p = 0;
  while (p < n) {
    if (p + 1 == n) {  // trailing single sample
      m.endpoints.push_back({n, s[p]});
      break;
    }
    std::vector<VsPoint> region = seed_region(s[p] - e, s[p] + e, s[p + 1], e);
    std::size_t q = p + 1;
    for (std::size_t j = p + 2; j < n; ++j) {
      const double d = static_cast<double>(j - p);
      std::vector<VsPoint> next = clip_half_plane(region, 1.0, d, s[j] + e);
      next = clip_half_plane(next, -1.0, -d, e - s[j]);
      if (next.empty()) break;
      region = std::move(next);
      q = j;
    }

    // Pick the run's line: anchor ordinate nearest the first sample, then the
    // end ordinate nearest the last sample among lines with that anchor, so
    // exactly representable signals keep their sample values.
    double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
    for (const VsPoint& pt : region) {
      vlo = std::min(vlo, pt.v);
      vhi = std::max(vhi, pt.v);
    }
    const double v = std::clamp(s[p], vlo, vhi);
    const double d = static_cast<double>(q - p);
    double slo = std::numeric_limits<double>::infinity(), shi = -slo;
    double nearest_s = region.front().s;
    double nearest_gap = std::numeric_limits<double>::infinity();
    const std::size_t cnt = region.size();
    for (std::size_t i = 0; i < cnt; ++i) {
      const VsPoint& a = region[i];
      const VsPoint& b = region[(i + 1) % cnt];
      const double ga = a.v - v;
      const double gb = b.v - v;
      if (ga == 0.0) {
        slo = std::min(slo, a.s);
        shi = std::max(shi, a.s);
      } else if ((ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0)) {
        const double t = ga / (ga - gb);
        const double sm = a.s + t * (b.s - a.s);
        slo = std::min(slo, sm);
        shi = std::max(shi, sm);
      }
      if (std::fabs(ga) < nearest_gap) {
        nearest_gap = std::fabs(ga);
        nearest_s = a.s;
      }
    }
    // Rounding can keep the cut from registering; a region vertex still
    // satisfies the bound by construction.
    const double w = slo <= shi ? std::clamp(s[q], v + slo * d, v + shi * d)
                                : v + nearest_s * d;
    m.endpoints.push_back({p + 1, v});
    m.endpoints.push_back({q + 1, w});
    p = q + 1;
  }
  return m;
}

TimeSeriesWindow ltc_reconstruct(const LtcModel& m) {
  validate(m);
  TimeSeriesWindow out;
  out.samples.resize(m.n_original);
  for (std::size_t seg = 0; seg + 1 < m.endpoints.size(); ++seg) {
    const auto& a = m.endpoints[seg];
    const auto& b = m.endpoints[seg + 1];
    double dx = static_cast<double>(b.index - a.index);
    for (std::size_t i = a.index; i <= b.index; ++i) {
      double t = static_cast<double>(i - a.index) / dx;
      out.samples[i - 1] = a.value + t * (b.value - a.value);
    }
  }
  return out;
}

std::vector<double> dct_forward(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const DctTable& t = dct_table(n);
  const auto& k = kernels::active();
  std::vector<double> out(n);
  for (std::size_t f = 0; f < n; ++f)
    out[f] = t.scale[f] * k.dot(t.rows[f].data(), x.data(), n);
  return out;
}

std::vector<double> dct_inverse(const std::vector<double>& coeffs) {
  const std::size_t n = coeffs.size();
  const DctTable& t = dct_table(n);
  const auto& k = kernels::active();
  std::vector<double> out(n, 0.0);
  for (std::size_t f = 0; f < n; ++f) {
    if (coeffs[f] == 0.0) continue;
    k.axpy(t.scale[f] * coeffs[f], t.rows[f].data(), out.data(), n);
  }
  return out;
}

DctModel dct_compress(const TimeSeriesWindow& x, const ErrorBudget& eps) {
  validate(x);
  if (eps.epsilon_pct < 0) throw InputError("epsilon_pct must be >= 0");
  const std::size_t n = x.samples.size();
  DctModel m;
  m.n_original = n;
  if (range_of(x.samples) == 0.0) {
    m.coeffs = {dct_forward(x.samples)[0]};
    return m;
  }
  const double e = eps.absolute(x);
  std::vector<double> coeffs = dct_forward(x.samples);
  const DctTable& t = dct_table(n);
  const auto& kk = kernels::active();

  std::vector<double> xhat(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    kk.axpy(t.scale[k] * coeffs[k], t.rows[k].data(), xhat.data(), n);
    if (kk.max_abs_diff(x.samples.data(), xhat.data(), n) <= e) {
      m.coeffs.assign(coeffs.begin(), coeffs.begin() + static_cast<long>(k + 1));
      return m;
    }
  }
  m.coeffs = std::move(coeffs);  // K = N always satisfies the bound
  return m;
}

DctModel dct_compress_rate(const TimeSeriesWindow& x, std::size_t k) {
  validate(x);
  const std::size_t n = x.samples.size();
  if (k < 1 || k > n) throw InputError("coefficient count out of range");
  std::vector<double> coeffs = dct_forward(x.samples);
  DctModel m;
  m.n_original = n;
  m.coeffs.assign(coeffs.begin(), coeffs.begin() + static_cast<long>(k));
  return m;
}

TimeSeriesWindow dct_reconstruct(const DctModel& m) {
  validate(m);
  std::vector<double> padded(m.n_original, 0.0);
  std::copy(m.coeffs.begin(), m.coeffs.end(), padded.begin());
  TimeSeriesWindow out;
  out.samples = dct_inverse(padded);
  return out;
}

std::size_t index_field_bits(std::size_t n) {
  std::size_t bits = 0;
  std::size_t v = 1;
  while (v < n) {
    v <<= 1;
    ++bits;
  }
  return bits;
}

std::uint64_t model_bits(const LtcModel& m, const SampleEncoding& enc) {
  validate(enc);
  return static_cast<std::uint64_t>(m.endpoints.size()) *
         (static_cast<std::uint64_t>(enc.bits_per_sample) + index_field_bits(m.n_original));
}

std::uint64_t model_bits(const DctModel& m, const SampleEncoding& enc) {
  validate(enc);
  return static_cast<std::uint64_t>(m.coeffs.size()) *
             static_cast<std::uint64_t>(enc.bits_per_sample) +
         index_field_bits(m.n_original);
}

RateResult rate(std::uint64_t model_bits, std::uint64_t raw_bits) {
  if (raw_bits == 0) throw InputError("raw_bits must be positive");
  if (model_bits >= raw_bits) return {1.0, true};
  return {static_cast<double>(model_bits) / static_cast<double>(raw_bits), false};
}

double distortion(const TimeSeriesWindow& x, const TimeSeriesWindow& xhat) {
  if (x.samples.size() != xhat.samples.size())
    throw InputError("distortion requires equal lengths");
  const auto& k = kernels::active();
  double err = k.max_abs_diff(x.samples.data(), xhat.samples.data(), x.samples.size());
  double range = range_of(x.samples);
  if (range == 0.0) {
    if (err == 0.0) return 0.0;
    throw ComputeError("zero-range window with imperfect reconstruction");
  }
  return 100.0 * err / range;
}

const std::vector<double>& default_eps_grid() {
  static const std::vector<double> grid{0.5, 1, 2, 3, 4, 5, 7, 10, 15, 20};
  return grid;
}

RdCurve rd_sweep(const TimeSeriesWindow& x, Algorithm alg, const std::vector<ErrorBudget>& grid,
                 const SampleEncoding& enc) {
  if (grid.empty()) throw InputError("eps grid must be non-empty");
  RdCurve c;
  c.algorithm = alg;
  c.class_label = x.class_label;
  std::uint64_t raw = raw_bits(x, enc);
  for (const auto& eps : grid) {
    TimeSeriesWindow xhat;
    std::uint64_t bits;
    if (alg == Algorithm::Ltc) {
      LtcModel m = ltc_compress(x, eps);
      xhat = ltc_reconstruct(m);
      bits = model_bits(m, enc);
    } else {
      DctModel m = dct_compress(x, eps);
      xhat = dct_reconstruct(m);
      bits = model_bits(m, enc);
    }
    c.points.push_back({distortion(x, xhat), rate(bits, raw).rate});
  }
  std::stable_sort(c.points.begin(), c.points.end(),
                   [](const RdPoint& a, const RdPoint& b) {
                     return a.distortion_pct < b.distortion_pct;
                   });
  // Dedup equal distortions (keep the cheapest), then enforce non-increasing
  // rate with a running minimum: measured distortion can land below the
  // requested budget and create local inversions.
  std::vector<RdPoint> out;
  for (const auto& p : c.points) {
    if (!out.empty() && out.back().distortion_pct == p.distortion_pct)
      out.back().rate = std::min(out.back().rate, p.rate);
    else
      out.push_back(p);
  }
  double run_min = std::numeric_limits<double>::infinity();
  for (auto& p : out) {
    run_min = std::min(run_min, p.rate);
    p.rate = run_min;
  }
  c.points = std::move(out);
  return c;
}

namespace {

double interp_rate(const RdCurve& c, double d) {
  const auto& pts = c.points;
  if (d <= pts.front().distortion_pct) return pts.front().rate;
  if (d >= pts.back().distortion_pct) return pts.back().rate;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (d <= pts[i].distortion_pct) {
      double d0 = pts[i - 1].distortion_pct, d1 = pts[i].distortion_pct;
      double t = (d - d0) / (d1 - d0);
      return pts[i - 1].rate + t * (pts[i].rate - pts[i - 1].rate);
    }
  }
  return pts.back().rate;
}

}  // namespace

RdCurve average_curve(const std::vector<RdCurve>& curves, const std::vector<double>& grid) {
  if (curves.empty()) throw InputError("average_curve requires at least one curve");
  if (grid.empty()) throw InputError("average_curve requires a non-empty grid");
  for (const auto& c : curves) {
    if (c.algorithm != curves.front().algorithm)
      throw InputError("average_curve requires a single algorithm");
    if (c.points.empty()) throw InputError("average_curve given an empty curve");
  }
  RdCurve out;
  out.algorithm = curves.front().algorithm;
  bool same_class = std::all_of(curves.begin(), curves.end(), [&](const RdCurve& c) {
    return c.class_label == curves.front().class_label;
  });
  if (same_class) out.class_label = curves.front().class_label;
  for (double d : grid) {
    double sum = 0.0;
    for (const auto& c : curves) sum += interp_rate(c, d);
    out.points.push_back({d, sum / static_cast<double>(curves.size())});
  }
  return out;
}

RdCurve dct_provisioning_curve(const std::vector<TimeSeriesWindow>& windows,
                               const SampleEncoding& enc, double distortion_margin) {
  validate(enc);
  if (windows.empty()) throw InputError("dct_provisioning_curve requires windows");
  if (distortion_margin < 0.0)
    throw InputError("distortion_margin must be non-negative");
  const std::size_t n = windows.front().samples.size();
  for (const auto& w : windows) {
    validate(w);
    if (w.samples.size() != n)
      throw InputError("dct_provisioning_curve requires a single window length");
  }

  // Mean distortion over the windows at every fixed k, built incrementally
  // from prefix reconstructions.
  const DctTable& t = dct_table(n);
  std::vector<double> mean_d(n, 0.0);
  for (const auto& w : windows) {
    const std::vector<double> spec = dct_forward(w.samples);
    const double range = range_of(w.samples);
    std::vector<double> recon(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double c = t.scale[k] * spec[k];
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        recon[i] += c * t.rows[k][i];
        err = std::max(err, std::fabs(recon[i] - w.samples[i]));
      }
      if (range > 0.0) mean_d[k] += 100.0 * err / range;
    }
  }
  for (double& d : mean_d)
    d *= (1.0 + distortion_margin) / static_cast<double>(windows.size());

  RdCurve out;
  out.algorithm = Algorithm::Dct;
  bool same_class =
      std::all_of(windows.begin(), windows.end(), [&](const TimeSeriesWindow& w) {
        return w.class_label == windows.front().class_label;
      });
  if (same_class) out.class_label = windows.front().class_label;

  const std::uint64_t raw =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(enc.bits_per_sample);
  // Distortion ascending means k descending; on ties keep the cheaper k.
  for (std::size_t k = n; k >= 1; --k) {
    const std::uint64_t bits =
        static_cast<std::uint64_t>(k) * enc.bits_per_sample + index_field_bits(n);
    const RdPoint p{mean_d[k - 1], rate(bits, raw).rate};
    // <= also swallows any ULP-level inversion from the incremental sums.
    if (!out.points.empty() && p.distortion_pct <= out.points.back().distortion_pct)
      out.points.back().rate = std::min(out.points.back().rate, p.rate);
    else
      out.points.push_back(p);
  }
  return out;
}

ToleranceLookup min_rate_for_tolerance(const RdCurve& c, double xi_pct, std::size_t n,
                                       const SampleEncoding& enc) {
  if (c.points.empty()) throw InputError("tolerance lookup on empty curve");
  double r = interp_rate(c, xi_pct);
  double raw = static_cast<double>(n) * enc.bits_per_sample;
  double payload = r * raw - static_cast<double>(index_field_bits(n));
  long k = static_cast<long>(std::floor(payload / enc.bits_per_sample));
  if (k < 1) k = 1;
  if (k > static_cast<long>(n)) k = static_cast<long>(n);
  return {r, static_cast<std::size_t>(k)};
}

void write_curve_csv(const RdCurve& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "distortion_pct,rate\n";
  for (const auto& p : c.points)
    out << fmt_double(p.distortion_pct) << "," << fmt_double(p.rate) << "\n";
}

void write_curve_sidecar(const RdCurve& c, std::size_t n_windows, const std::string& path) {
  nlohmann::json j;
  j["algorithm"] = to_string(c.algorithm);
  j["class"] = c.class_label ? to_string(*c.class_label) : "all";
  j["n_windows"] = n_windows;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << "\n";
}

RdCurve read_curve_csv(const std::string& csv_path, const std::string& sidecar_path) {
  std::ifstream side(sidecar_path);
  if (!side) throw InputError("cannot open " + sidecar_path);
  nlohmann::json j = nlohmann::json::parse(side);
  RdCurve c;
  auto alg = algorithm_from_string(j.at("algorithm").get<std::string>());
  if (!alg) throw InputError("unknown algorithm in " + sidecar_path);
  c.algorithm = *alg;
  std::string cls = j.at("class").get<std::string>();
  if (cls != "all") {
    auto sc = signal_class_from_string(cls);
    if (!sc) throw InputError("unknown class in " + sidecar_path);
    c.class_label = sc;
  }
  std::ifstream in(csv_path);
  if (!in) throw InputError("cannot open " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("malformed curve row in " + csv_path);
    c.points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  if (c.points.empty()) throw InputError("empty curve in " + csv_path);
  return c;
}

std::string to_json(const LtcModel& m) {
  nlohmann::json j;
  j["type"] = "ltc";
  j["n_original"] = m.n_original;
  auto& eps = j["endpoints"] = nlohmann::json::array();
  for (const auto& e : m.endpoints) eps.push_back({{"index", e.index}, {"value", e.value}});
  return j.dump(2);
}

std::string to_json(const DctModel& m) {
  nlohmann::json j;
  j["type"] = "dct";
  j["n_original"] = m.n_original;
  j["coeffs"] = m.coeffs;
  return j.dump(2);
}

}  // namespace rdclass
