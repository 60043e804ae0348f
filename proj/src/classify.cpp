#include "rdclass/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rdclass/kernels.hpp"

#include <nlohmann/json.hpp>

namespace rdclass {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<SignalClass> classes_present(const std::vector<SignalClass>& labels) {
  bool seen[kNumClasses] = {};
  for (SignalClass c : labels) seen[static_cast<int>(c)] = true;
  std::vector<SignalClass> out;
  for (int i = 0; i < kNumClasses; ++i)
    if (seen[i]) out.push_back(static_cast<SignalClass>(i));
  return out;
}

}  // namespace

double LinearSvm::decision(const std::vector<double>& x) const {
  return kernels::active().dot(weights.data(), x.data(), weights.size()) + bias;
}

double svm_objective(const LinearSvm& m, const Matrix& x, const std::vector<int>& y) {
  const auto& k = kernels::active();
  double obj = 0.5 * k.sum_sq(m.weights.data(), m.weights.size());
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double margin = 1.0 - y[i] * m.decision(x[i]);
    if (margin > 0.0) hinge += margin;
  }
  return obj + m.hyper_c * hinge;
}

LinearSvm svm_train(const Matrix& x, const std::vector<int>& y, double c) {
  if (x.empty() || x.size() != y.size()) throw InputError("svm_train: bad input sizes");
  if (c <= 0.0) throw InputError("svm_train: c must be positive");
  bool pos = false, neg = false;
  for (int v : y) (v > 0 ? pos : neg) = true;
  if (!pos || !neg) throw InputError("svm_train: single-class input");

  const std::size_t dim = x[0].size();
  const std::size_t s = x.size();
  LinearSvm m;
  m.weights.assign(dim, 0.0);
  m.hyper_c = c;

  std::vector<double> gw(dim);
  std::vector<double> wtry(dim);
  double obj = svm_objective(m, x, y);
  double step = 1.0 / (c * static_cast<double>(s));

  for (int epoch = 0; epoch < 1000; ++epoch) {
    std::copy(m.weights.begin(), m.weights.end(), gw.begin());
    double gb = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      if (1.0 - y[i] * m.decision(x[i]) > 0.0) {
        kernels::active().axpy(-c * y[i], x[i].data(), gw.data(), dim);
        gb -= c * y[i];
      }
    }
    // Backtracking: only accept steps that lower the objective.
    bool accepted = false;
    double new_obj = obj;
    for (int bt = 0; bt < 50; ++bt) {
      std::copy(m.weights.begin(), m.weights.end(), wtry.begin());
      kernels::active().axpy(-step, gw.data(), wtry.data(), dim);
      LinearSvm trial = m;
      trial.weights = wtry;
      trial.bias = m.bias - step * gb;
      new_obj = svm_objective(trial, x, y);
      if (new_obj < obj) {
        m.weights = std::move(trial.weights);
        m.bias = trial.bias;
        accepted = true;
        step *= 1.2;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if ((obj - new_obj) / std::max(obj, 1e-12) < 1e-6) {
      obj = new_obj;
      break;
    }
    obj = new_obj;
  }
  return m;
}

OvoSvm ovo_train(const Matrix& x, const std::vector<SignalClass>& labels, double c) {
  if (x.size() != labels.size()) throw InputError("ovo_train: bad input sizes");
  OvoSvm m;
  m.classes = classes_present(labels);
  if (m.classes.size() < 2) throw InputError("ovo_train: need at least two classes");
  for (std::size_t a = 0; a < m.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < m.classes.size(); ++b) {
      Matrix px;
      std::vector<int> py;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (labels[i] == m.classes[a]) {
          px.push_back(x[i]);
          py.push_back(-1);
        } else if (labels[i] == m.classes[b]) {
          px.push_back(x[i]);
          py.push_back(+1);
        }
      }
      LinearSvm svm = svm_train(px, py, c);
      svm.class_pair_first = m.classes[a];
      svm.class_pair_second = m.classes[b];
      m.machines.push_back(std::move(svm));
    }
  }
  return m;
}

SignalClass ovo_predict(const OvoSvm& m, const std::vector<double>& x) {
  double votes[kNumClasses] = {};
  double margin[kNumClasses] = {};
  for (const auto& svm : m.machines) {
    double d = svm.decision(x);
    SignalClass winner = d > 0.0 ? svm.class_pair_second : svm.class_pair_first;
    votes[static_cast<int>(winner)] += 1.0;
    margin[static_cast<int>(winner)] += std::fabs(d);
  }
  int best = -1;
  for (SignalClass c : m.classes) {
    int i = static_cast<int>(c);
    if (best < 0 || votes[i] > votes[best] ||
        (votes[i] == votes[best] && margin[i] > margin[best]))
      best = i;
  }
  return static_cast<SignalClass>(best);
}

std::vector<double> Ffnn::forward(const std::vector<double>& x) const {
  const auto& k = kernels::active();
  const std::size_t h = hidden_weights.size();
  const std::size_t c = output_weights.size();
  std::vector<double> hid(h);
  for (std::size_t j = 0; j < h; ++j)
    hid[j] = sigmoid(k.dot(hidden_weights[j].data(), x.data(), x.size()) + hidden_bias[j]);
  std::vector<double> out(c);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < c; ++j) {
    out[j] = k.dot(output_weights[j].data(), hid.data(), h) + output_bias[j];
    mx = std::max(mx, out[j]);
  }
  double z = 0.0;
  for (double& v : out) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : out) v /= z;
  return out;
}

std::vector<double> ffnn_flat_params(const Ffnn& m) {
  std::vector<double> p;
  for (const auto& row : m.hidden_weights) p.insert(p.end(), row.begin(), row.end());
  p.insert(p.end(), m.hidden_bias.begin(), m.hidden_bias.end());
  for (const auto& row : m.output_weights) p.insert(p.end(), row.begin(), row.end());
  p.insert(p.end(), m.output_bias.begin(), m.output_bias.end());
  return p;
}

void ffnn_set_flat_params(Ffnn& m, const std::vector<double>& p) {
  std::size_t pos = 0;
  for (auto& row : m.hidden_weights)
    for (auto& v : row) v = p[pos++];
  for (auto& v : m.hidden_bias) v = p[pos++];
  for (auto& row : m.output_weights)
    for (auto& v : row) v = p[pos++];
  for (auto& v : m.output_bias) v = p[pos++];
}

double ffnn_loss(const Ffnn& m, const Matrix& x, const std::vector<std::size_t>& class_idx) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> out = m.forward(x[i]);
    loss -= std::log(std::max(out[class_idx[i]], 1e-300));
  }
  return loss / static_cast<double>(x.size());
}

std::vector<double> ffnn_gradient(const Ffnn& m, const Matrix& x,
                                  const std::vector<std::size_t>& class_idx) {
  const auto& k = kernels::active();
  const std::size_t h = m.hidden_weights.size();
  const std::size_t c = m.output_weights.size();
  const std::size_t dim = m.hidden_weights[0].size();
  const double inv_s = 1.0 / static_cast<double>(x.size());

  Matrix g_hw(h, std::vector<double>(dim, 0.0));
  std::vector<double> g_hb(h, 0.0);
  Matrix g_ow(c, std::vector<double>(h, 0.0));
  std::vector<double> g_ob(c, 0.0);

  std::vector<double> hid(h), delta_h(h);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < h; ++j)
      hid[j] = sigmoid(k.dot(m.hidden_weights[j].data(), x[i].data(), dim) + m.hidden_bias[j]);
    std::vector<double> out(c);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) {
      out[j] = k.dot(m.output_weights[j].data(), hid.data(), h) + m.output_bias[j];
      mx = std::max(mx, out[j]);
    }
    double z = 0.0;
    for (double& v : out) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : out) v /= z;

    // delta_o = softmax - onehot
    for (std::size_t j = 0; j < c; ++j) {
      double d = (out[j] - (j == class_idx[i] ? 1.0 : 0.0)) * inv_s;
      k.axpy(d, hid.data(), g_ow[j].data(), h);
      g_ob[j] += d;
    }
    std::fill(delta_h.begin(), delta_h.end(), 0.0);
    for (std::size_t j = 0; j < c; ++j) {
      double d = (out[j] - (j == class_idx[i] ? 1.0 : 0.0)) * inv_s;
      k.axpy(d, m.output_weights[j].data(), delta_h.data(), h);
    }
    for (std::size_t j = 0; j < h; ++j) {
      double d = delta_h[j] * hid[j] * (1.0 - hid[j]);
      k.axpy(d, x[i].data(), g_hw[j].data(), dim);
      g_hb[j] += d;
    }
  }

  Ffnn g;
  g.hidden_weights = std::move(g_hw);
  g.hidden_bias = std::move(g_hb);
  g.output_weights = std::move(g_ow);
  g.output_bias = std::move(g_ob);
  return ffnn_flat_params(g);
}

Ffnn ffnn_train(const Matrix& x, const std::vector<SignalClass>& labels,
                const FfnnOptions& opt) {
  if (x.empty() || x.size() != labels.size()) throw InputError("ffnn_train: bad input sizes");
  if (opt.hidden < 1) throw InputError("ffnn_train: need at least one hidden unit");

  Ffnn m;
  m.classes = classes_present(labels);
  if (m.classes.size() < 2) throw InputError("ffnn_train: need at least two classes");
  const std::size_t dim = x[0].size();
  const std::size_t h = opt.hidden;
  const std::size_t c = m.classes.size();

  std::mt19937_64 rng(opt.seed);
  double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> uni(-bound, bound);
  m.hidden_weights.assign(h, std::vector<double>(dim));
  m.hidden_bias.assign(h, 0.0);
  m.output_weights.assign(c, std::vector<double>(h));
  m.output_bias.assign(c, 0.0);
  for (auto& row : m.hidden_weights)
    for (auto& v : row) v = uni(rng);
  for (auto& v : m.hidden_bias) v = uni(rng);
  for (auto& row : m.output_weights)
    for (auto& v : row) v = uni(rng);
  for (auto& v : m.output_bias) v = uni(rng);

  std::vector<std::size_t> class_idx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto it = std::find(m.classes.begin(), m.classes.end(), labels[i]);
    class_idx[i] = static_cast<std::size_t>(it - m.classes.begin());
  }

  std::vector<double> params = ffnn_flat_params(m);
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    std::vector<double> g = ffnn_gradient(m, x, class_idx);
    for (std::size_t j = 0; j < params.size(); ++j) params[j] -= opt.rate * g[j];
    ffnn_set_flat_params(m, params);
    double loss = ffnn_loss(m, x, class_idx);
    if (!std::isfinite(loss))
      throw ComputeError("ffnn training diverged at epoch " + std::to_string(epoch));
  }
  return m;
}

SignalClass ffnn_predict(const Ffnn& m, const std::vector<double>& x) {
  std::vector<double> out = m.forward(x);
  std::size_t best = 0;
  for (std::size_t j = 1; j < out.size(); ++j)
    if (out[j] > out[best]) best = j;  // ties keep the lowest class index
  return m.classes[best];
}

FoldAssignment stratified_folds(const std::vector<SignalClass>& labels, std::size_t k,
                                std::uint64_t seed) {
  if (k < 1) throw InputError("stratified_folds:k must be >= 1");
  FoldAssignment fa;
  fa.k = k;
  fa.fold_of_sample.assign(labels.size(), 0);
  std::mt19937_64 rng(seed);
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (static_cast<int>(labels[i]) == c) idx.push_back(i);
    if (idx.empty()) continue;
    if (idx.size() < k)
      throw InputError(std::string("class ") + to_string(static_cast<SignalClass>(c)) +
                       " has fewer samples than folds");
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t p = 0; p < idx.size(); ++p) fa.fold_of_sample[idx[p]] = p % k;
  }
  return fa;
}

double cross_validate(const TrainerSpec& spec, const Matrix& x,
                      const std::vector<SignalClass>& labels, std::size_t k,
                      std::uint64_t seed) {
  if (k < 2) throw InputError("cross_validate: k must be >= 2");
  FoldAssignment fa = stratified_folds(labels, k, seed);
  double acc_sum = 0.0;
  for (std::size_t fold = 0; fold < k; ++fold) {
    Matrix train_x, test_x;
    std::vector<SignalClass> train_y, test_y;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (fa.fold_of_sample[i] == fold) {
        test_x.push_back(x[i]);
        test_y.push_back(labels[i]);
      } else {
        train_x.push_back(x[i]);
        train_y.push_back(labels[i]);
      }
    }
    std::size_t correct = 0;
    if (spec.kind == TrainerSpec::Kind::Svm) {
      OvoSvm m = ovo_train(train_x, train_y, spec.svm_c);
      for (std::size_t i = 0; i < test_x.size(); ++i)
        if (ovo_predict(m, test_x[i]) == test_y[i]) ++correct;
    } else {
      FfnnOptions opt = spec.ffnn;
      opt.seed = seed ^ (0x51ED0000ULL + fold);
      Ffnn m = ffnn_train(train_x, train_y, opt);
      for (std::size_t i = 0; i < test_x.size(); ++i)
        if (ffnn_predict(m, test_x[i]) == test_y[i]) ++correct;
    }
    acc_sum += static_cast<double>(correct) / static_cast<double>(test_x.size());
  }
  return acc_sum / static_cast<double>(k);
}

std::string to_json(const OvoSvm& m) {
  nlohmann::json j;
  j["type"] = "ovo_svm";
  j["bank_version"] = "bank-24/v1";
  auto& cls = j["classes"] = nlohmann::json::array();
  for (SignalClass c : m.classes) cls.push_back(to_string(c));
  auto& machines = j["machines"] = nlohmann::json::array();
  for (const auto& svm : m.machines) {
    machines.push_back({{"weights", svm.weights},
                        {"bias", svm.bias},
                        {"first", to_string(svm.class_pair_first)},
                        {"second", to_string(svm.class_pair_second)},
                        {"c", svm.hyper_c}});
  }
  return j.dump(2);
}

std::string to_json(const Ffnn& m) {
  nlohmann::json j;
  j["type"] = "ffnn";
  j["bank_version"] = "bank-24/v1";
  auto& cls = j["classes"] = nlohmann::json::array();
  for (SignalClass c : m.classes) cls.push_back(to_string(c));
  j["hidden_weights"] = m.hidden_weights;
  j["hidden_bias"] = m.hidden_bias;
  j["output_weights"] = m.output_weights;
  j["output_bias"] = m.output_bias;
  return j.dump(2);
}

namespace {

SignalClass class_from_json(const nlohmann::json& j) {
  auto c = signal_class_from_string(j.get<std::string>());
  if (!c) throw InputError("unknown class in model file");
  return *c;
}

}  // namespace

OvoSvm ovo_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("type") != "ovo_svm") throw InputError("not an ovo_svm model");
  OvoSvm m;
  for (const auto& c : j.at("classes")) m.classes.push_back(class_from_json(c));
  for (const auto& jm : j.at("machines")) {
    LinearSvm svm;
    svm.weights = jm.at("weights").get<std::vector<double>>();
    svm.bias = jm.at("bias").get<double>();
    svm.class_pair_first = class_from_json(jm.at("first"));
    svm.class_pair_second = class_from_json(jm.at("second"));
    svm.hyper_c = jm.at("c").get<double>();
    m.machines.push_back(std::move(svm));
  }
  return m;
}

Ffnn ffnn_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("type") != "ffnn") throw InputError("not an ffnn model");
  Ffnn m;
  for (const auto& c : j.at("classes")) m.classes.push_back(class_from_json(c));
  m.hidden_weights = j.at("hidden_weights").get<Matrix>();
  m.hidden_bias = j.at("hidden_bias").get<std::vector<double>>();
  m.output_weights = j.at("output_weights").get<Matrix>();
  m.output_bias = j.at("output_bias").get<std::vector<double>>();
  return m;
}

}  // namespace rdclass
