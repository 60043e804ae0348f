#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "rdclass/reduce.hpp"

using namespace rdclass;

namespace {

SignalFeatureMatrix make_matrix(Matrix rows, std::vector<SignalClass> labels = {}) {
  SignalFeatureMatrix m;
  m.rows = std::move(rows);
  if (labels.empty()) labels.assign(m.rows.size(), SignalClass::Noisy);
  m.labels = std::move(labels);
  m.feature_names.resize(m.rows.empty() ? 0 : m.rows[0].size());
  for (std::size_t j = 0; j < m.feature_names.size(); ++j)
    m.feature_names[j] = "f" + std::to_string(j);
  m.normalized = true;
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TEST_CASE("pca: points on a line load everything on PC1") {
  Matrix rows;
  for (int i = 0; i < 20; ++i) rows.push_back({0.1 * i, 0.2 * i});
  const PcaModel p = pca_fit(make_matrix(rows), 2);
  REQUIRE(p.explained_variance.size() == 2);
  CHECK(std::abs(p.explained_variance[1]) < 1e-9);
  // PC1 points along (1,2)/sqrt(5), positive by the sign convention.
  CHECK(p.components[0][0] == doctest::Approx(1.0 / std::sqrt(5.0)));
  CHECK(p.components[0][1] == doctest::Approx(2.0 / std::sqrt(5.0)));
}

TEST_CASE("pca: isotropic cloud has matched eigenvalues") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix rows(10000, std::vector<double>(2));
  for (auto& r : rows) {
    r[0] = g(rng);
    r[1] = g(rng);
  }
  const PcaModel p = pca_fit(make_matrix(rows), 2);
  CHECK(p.explained_variance[0] == doctest::Approx(p.explained_variance[1]).epsilon(0.1));
  CHECK(p.explained_variance[0] == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("pca: components orthonormal, eigenvalues ordered, variance conserved") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix rows(60, std::vector<double>(5));
  for (auto& r : rows)
    for (double& v : r) v = u(rng) + 0.5 * u(rng);
  const SignalFeatureMatrix m = make_matrix(rows);
  const PcaModel p = pca_fit(m, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      CHECK(std::abs(dot(p.components[i], p.components[j]) - expect) < 1e-9);
    }
    if (i > 0) CHECK(p.explained_variance[i] <= p.explained_variance[i - 1] + 1e-12);
    CHECK(p.explained_variance[i] >= -1e-12);
  }
  // Total eigenvalue mass equals total column variance at full rank.
  double col_var = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    double mean = 0.0, ss = 0.0;
    for (const auto& r : rows) mean += r[j];
    mean /= 60.0;
    for (const auto& r : rows) ss += (r[j] - mean) * (r[j] - mean);
    col_var += ss / 59.0;
  }
  const double eig_sum =
      std::accumulate(p.explained_variance.begin(), p.explained_variance.end(), 0.0);
  CHECK(eig_sum == doctest::Approx(col_var).epsilon(1e-9));
}

TEST_CASE("pca: full-rank reconstruction reproduces centered data to 1e-9") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix rows(25, std::vector<double>(4));
  for (auto& r : rows)
    for (double& v : r) v = u(rng);
  const SignalFeatureMatrix m = make_matrix(rows);
  const PcaModel p = pca_fit(m, 4);
  const Matrix proj = pca_transform(p, m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double rec = 0.0;
      for (std::size_t l = 0; l < 4; ++l) rec += proj[i][l] * p.components[l][j];
      CHECK(std::abs(rec - (rows[i][j] - p.mean_vector[j])) < 1e-9);
    }
  }
}

TEST_CASE("pca: transform variances match eigenvalues; mean maps to zero") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> g(0.0, 2.0);
  Matrix rows(200, std::vector<double>(3));
  for (auto& r : rows)
    for (double& v : r) v = g(rng);
  const SignalFeatureMatrix m = make_matrix(rows);
  const PcaModel p = pca_fit(m, 3);
  const Matrix proj = pca_transform(p, m);
  for (std::size_t l = 0; l < 3; ++l) {
    double mean = 0.0, ss = 0.0;
    for (const auto& r : proj) mean += r[l];
    mean /= static_cast<double>(proj.size());
    for (const auto& r : proj) ss += (r[l] - mean) * (r[l] - mean);
    const double var = ss / static_cast<double>(proj.size() - 1);
    CHECK(var == doctest::Approx(p.explained_variance[l]).epsilon(1e-6));
  }
  const Matrix at_mean = pca_transform(p, Matrix{p.mean_vector});
  for (double v : at_mean[0]) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("pca: degenerate and dimension errors") {
  Matrix rows(5, std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(pca_fit(make_matrix(rows), 2), ComputeError);
  rows[0][0] = 3.0;
  const PcaModel p = pca_fit(make_matrix(rows), 2);
  CHECK_THROWS_AS(pca_transform(p, Matrix{{1.0, 2.0, 3.0}}), InputError);
}

TEST_CASE("greedy: a single separating feature is picked first with accuracy 1") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix rows;
  std::vector<SignalClass> labels;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 12; ++i) {
      // Feature 0 separates classes cleanly; features 1-3 are noise.
      rows.push_back({10.0 * c + u(rng), u(rng), u(rng), u(rng)});
      labels.push_back(static_cast<SignalClass>(c));
    }
  }
  const SignalFeatureMatrix m = make_matrix(rows, labels);
  const SelectionResult r = greedy_select(m, 2, 4, 5);
  REQUIRE(r.selected_indices.size() == 2);
  CHECK(r.selected_indices[0] == 0);
  CHECK(r.accuracy_trajectory[0] == 1.0);
  CHECK(r.selected_names[0] == "f0");
  // Cross-check step 1 with a direct CV run on feature 0 alone.
  Matrix only0;
  for (const auto& row : rows) only0.push_back({row[0]});
  const double direct =
      cross_validate({.kind = TrainerSpec::Kind::Svm}, only0, labels, 4, 5);
  CHECK(direct == r.accuracy_trajectory[0]);
}

TEST_CASE("greedy: identical candidates break ties to the lower index") {
  Matrix rows;
  std::vector<SignalClass> labels;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 6; ++i) {
      const double v = 5.0 * c + 0.1 * i;
      rows.push_back({v, v});
      labels.push_back(static_cast<SignalClass>(c));
    }
  }
  const SelectionResult r = greedy_select(make_matrix(rows, labels), 1, 3, 1);
  REQUIRE(r.selected_indices.size() == 1);
  CHECK(r.selected_indices[0] == 0);
}

TEST_CASE("greedy: k=M selects a permutation of all features, deterministically") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix rows;
  std::vector<SignalClass> labels;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 8; ++i) {
      rows.push_back({3.0 * c + u(rng), u(rng), u(rng) + 0.2 * c});
      labels.push_back(static_cast<SignalClass>(c));
    }
  }
  const SignalFeatureMatrix m = make_matrix(rows, labels);
  const SelectionResult a = greedy_select(m, 3, 4, 77);
  const SelectionResult b = greedy_select(m, 3, 4, 77);
  CHECK(a.selected_indices == b.selected_indices);
  CHECK(a.accuracy_trajectory == b.accuracy_trajectory);
  std::vector<std::size_t> sorted = a.selected_indices;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("selection json round-trips") {
  SelectionResult r;
  r.selected_indices = {3, 0, 7};
  r.selected_names = {"f3", "f0", "f7"};
  r.accuracy_trajectory = {0.5, 0.75, 1.0 / 3.0};
  const SelectionResult s = selection_from_json(to_json(r));
  CHECK(s.selected_indices == r.selected_indices);
  CHECK(s.selected_names == r.selected_names);
  CHECK(s.accuracy_trajectory == r.accuracy_trajectory);
}
