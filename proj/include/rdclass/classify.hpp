#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdclass/timeseries.hpp"

namespace rdclass {

using Matrix = std::vector<std::vector<double>>;

struct LinearSvm {
  std::vector<double> weights;
  double bias = 0.0;
  SignalClass class_pair_first = SignalClass::Noisy;   // decision < 0
  SignalClass class_pair_second = SignalClass::Noisy;  // decision > 0
  double hyper_c = 1.0;

  double decision(const std::vector<double>& x) const;
};

// Hinge-loss primal 0.5*||w||^2 + c * sum hinge(1 - y*(w.x + b)), minimized by
// subgradient steps with a backtracking line search so the objective is
// non-increasing across epochs. Stops at relative change < 1e-6 or 1000 epochs.
LinearSvm svm_train(const Matrix& x, const std::vector<int>& y, double c = 1.0);

double svm_objective(const LinearSvm& m, const Matrix& x, const std::vector<int>& y);

struct OvoSvm {
  std::vector<LinearSvm> machines;  // one per unordered class pair, pair order fixed
  std::vector<SignalClass> classes;
};

OvoSvm ovo_train(const Matrix& x, const std::vector<SignalClass>& labels, double c = 1.0);
SignalClass ovo_predict(const OvoSvm& m, const std::vector<double>& x);

struct Ffnn {
  Matrix hidden_weights;               // H x M
  std::vector<double> hidden_bias;     // H
  Matrix output_weights;               // C x H
  std::vector<double> output_bias;     // C
  std::vector<SignalClass> classes;

  std::vector<double> forward(const std::vector<double>& x) const;  // softmax outputs
};

struct FfnnOptions {
  std::size_t hidden = 10;
  std::size_t epochs = 500;
  double rate = 0.1;
  std::uint64_t seed = 0;
};

// Single hidden layer, logistic sigmoid hidden units, softmax output,
// mean cross-entropy, full-batch gradient descent.
Ffnn ffnn_train(const Matrix& x, const std::vector<SignalClass>& labels,
                const FfnnOptions& opt = {});
SignalClass ffnn_predict(const Ffnn& m, const std::vector<double>& x);

// Gradients of the mean cross-entropy at the given parameters, flattened in
// (hidden_weights, hidden_bias, output_weights, output_bias) order. Exposed
// for finite-difference checking.
std::vector<double> ffnn_flat_params(const Ffnn& m);
void ffnn_set_flat_params(Ffnn& m, const std::vector<double>& p);
double ffnn_loss(const Ffnn& m, const Matrix& x, const std::vector<std::size_t>& class_idx);
std::vector<double> ffnn_gradient(const Ffnn& m, const Matrix& x,
                                  const std::vector<std::size_t>& class_idx);

struct FoldAssignment {
  std::vector<std::size_t> fold_of_sample;  // values in [0, k)
  std::size_t k = 0;
};

FoldAssignment stratified_folds(const std::vector<SignalClass>& labels, std::size_t k,
                                std::uint64_t seed);

struct TrainerSpec {
  enum class Kind { Svm, Ffnn } kind = Kind::Svm;
  double svm_c = 1.0;
  FfnnOptions ffnn;
};

double cross_validate(const TrainerSpec& spec, const Matrix& x,
                      const std::vector<SignalClass>& labels, std::size_t k,
                      std::uint64_t seed);

// JSON round-trip; a reloaded model predicts identically.
std::string to_json(const OvoSvm& m);
std::string to_json(const Ffnn& m);
OvoSvm ovo_from_json(const std::string& text);
Ffnn ffnn_from_json(const std::string& text);

}  // namespace rdclass
