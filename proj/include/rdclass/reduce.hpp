#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdclass/classify.hpp"
#include "rdclass/features.hpp"

namespace rdclass {

struct PcaModel {
  std::vector<double> mean_vector;           // M
  std::vector<std::vector<double>> components;  // L orthonormal M-vectors
  std::vector<double> explained_variance;    // L eigenvalues, non-increasing
};

// Top-l eigenpairs of the sample covariance (n-1 denominator) of the
// column-centered matrix. Sign convention: the largest-magnitude entry of
// each component is positive.
PcaModel pca_fit(const SignalFeatureMatrix& m, std::size_t l);
Matrix pca_transform(const PcaModel& p, const SignalFeatureMatrix& m);
Matrix pca_transform(const PcaModel& p, const Matrix& rows);

struct SelectionResult {
  std::vector<std::size_t> selected_indices;
  std::vector<std::string> selected_names;
  std::vector<double> accuracy_trajectory;
};

// Greedy forward selection: at each step adds the feature whose addition
// maximizes stratified k-fold CV accuracy of the one-vs-one linear SVM;
// ties go to the lowest feature index.
SelectionResult greedy_select(const SignalFeatureMatrix& m, std::size_t k_features,
                              std::size_t folds, std::uint64_t seed, double svm_c = 1.0);

std::string to_json(const SelectionResult& r);
SelectionResult selection_from_json(const std::string& text);

}  // namespace rdclass
