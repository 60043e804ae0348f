#include "rdclass/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include <nlohmann/json.hpp>

namespace rdclass {

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. The feature space
// is small (M <= 24), so this is plenty fast and has no dependencies.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors) {
  const std::size_t n = a.size();
  eigenvectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double vip = eigenvectors[i][p], viq = eigenvectors[i][q];
          eigenvectors[i][p] = c * vip - s * viq;
          eigenvectors[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

}  // namespace

PcaModel pca_fit(const SignalFeatureMatrix& m, std::size_t l) {
  if (!m.normalized) throw InputError("pca_fit expects a normalized matrix");
  const std::size_t s = m.n_rows();
  const std::size_t cols = m.n_cols();
  if (l < 1 || l > std::min(s, cols)) throw InputError("pca_fit: l out of range");

  PcaModel p;
  p.mean_vector.assign(cols, 0.0);
  for (const auto& row : m.rows)
    for (std::size_t j = 0; j < cols; ++j) p.mean_vector[j] += row[j];
  for (double& v : p.mean_vector) v /= static_cast<double>(s);

  bool any_variation = false;
  for (const auto& row : m.rows)
    for (std::size_t j = 0; j < cols; ++j)
      if (row[j] != m.rows[0][j]) any_variation = true;
  if (!any_variation) throw ComputeError("pca_fit: all rows identical");

  std::vector<std::vector<double>> cov(cols, std::vector<double>(cols, 0.0));
  for (const auto& row : m.rows) {
    for (std::size_t j = 0; j < cols; ++j) {
      double dj = row[j] - p.mean_vector[j];
      for (std::size_t k = j; k < cols; ++k)
        cov[j][k] += dj * (row[k] - p.mean_vector[k]);
    }
  }
  double denom = static_cast<double>(s - 1);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t k = j; k < cols; ++k) {
      cov[j][k] /= denom;
      cov[k][j] = cov[j][k];
    }

  std::vector<double> evals;
  std::vector<std::vector<double>> evecs;  // columns are eigenvectors
  jacobi_eigen(cov, evals, evecs);

  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return evals[a] > evals[b]; });

  for (std::size_t r = 0; r < l; ++r) {
    std::size_t e = order[r];
    std::vector<double> comp(cols);
    for (std::size_t j = 0; j < cols; ++j) comp[j] = evecs[j][e];
    // Fix the sign so serialization is reproducible.
    std::size_t arg = 0;
    for (std::size_t j = 1; j < cols; ++j)
      if (std::fabs(comp[j]) > std::fabs(comp[arg])) arg = j;
    if (comp[arg] < 0.0)
      for (double& v : comp) v = -v;
    p.components.push_back(std::move(comp));
    p.explained_variance.push_back(std::max(evals[e], 0.0));
  }
  return p;
}

Matrix pca_transform(const PcaModel& p, const Matrix& rows) {
  Matrix out;
  out.reserve(rows.size());
  const std::size_t cols = p.mean_vector.size();
  for (const auto& row : rows) {
    if (row.size() != cols) throw InputError("pca_transform: dimension mismatch");
    std::vector<double> proj(p.components.size(), 0.0);
    for (std::size_t r = 0; r < p.components.size(); ++r)
      for (std::size_t j = 0; j < cols; ++j)
        proj[r] += (row[j] - p.mean_vector[j]) * p.components[r][j];
    out.push_back(std::move(proj));
  }
  return out;
}

Matrix pca_transform(const PcaModel& p, const SignalFeatureMatrix& m) {
  return pca_transform(p, m.rows);
}

SelectionResult greedy_select(const SignalFeatureMatrix& m, std::size_t k_features,
                              std::size_t folds, std::uint64_t seed, double svm_c) {
  if (!m.normalized) throw InputError("greedy_select expects a normalized matrix");
  const std::size_t cols = m.n_cols();
  if (k_features < 1 || k_features > cols) throw InputError("greedy_select: k out of range");

  SelectionResult res;
  std::vector<bool> used(cols, false);
  TrainerSpec spec;
  spec.kind = TrainerSpec::Kind::Svm;
  spec.svm_c = svm_c;

  auto subset_matrix = [&](const std::vector<std::size_t>& idx) {
    Matrix x(m.n_rows());
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
      x[i].reserve(idx.size());
      for (std::size_t j : idx) x[i].push_back(m.rows[i][j]);
    }
    return x;
  };

  for (std::size_t step = 0; step < k_features; ++step) {
    // Candidate scores are computed independently; the argmax below applies
    // the lowest-index tie-break regardless of completion order.
    std::vector<double> score(cols, -1.0);
    std::vector<std::future<void>> jobs;
    for (std::size_t j = 0; j < cols; ++j) {
      if (used[j]) continue;
      jobs.push_back(std::async(std::launch::async, [&, j]() {
        std::vector<std::size_t> idx = res.selected_indices;
        idx.push_back(j);
        score[j] = cross_validate(spec, subset_matrix(idx), m.labels, folds, seed);
      }));
    }
    for (auto& f : jobs) f.get();

    std::size_t best = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (!used[j] && (best == cols || score[j] > score[best])) best = j;
    used[best] = true;
    res.selected_indices.push_back(best);
    res.selected_names.push_back(m.feature_names[best]);
    res.accuracy_trajectory.push_back(score[best]);
  }
  return res;
}

std::string to_json(const SelectionResult& r) {
  nlohmann::json j;
  j["selected_indices"] = r.selected_indices;
  j["selected_names"] = r.selected_names;
  j["accuracy_trajectory"] = r.accuracy_trajectory;
  return j.dump(2);
}

SelectionResult selection_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SelectionResult r;
  r.selected_indices = j.at("selected_indices").get<std::vector<std::size_t>>();
  r.selected_names = j.at("selected_names").get<std::vector<std::string>>();
  r.accuracy_trajectory = j.at("accuracy_trajectory").get<std::vector<double>>();
  return r;
}

}  // namespace rdclass
