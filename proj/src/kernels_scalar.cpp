#include "rdclass/kernels.hpp"

namespace rdclass::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    if (d < 0) d = -d;
    if (d > m) m = d;
  }
  return m;
}

MinMax min_max_scalar(const double* a, std::size_t n) {
  MinMax r{a[0], a[0]};
  for (std::size_t i = 1; i < n; ++i) {
    if (a[i] < r.min) r.min = a[i];
    if (a[i] > r.max) r.max = a[i];
  }
  return r;
}

}  // namespace

const Ops& scalar() {
  static const Ops ops{dot_scalar,          sum_scalar,     sum_sq_scalar,
                       axpy_scalar,         max_abs_diff_scalar,
                       min_max_scalar,      "scalar"};
  return ops;
}

}  // namespace rdclass::kernels
