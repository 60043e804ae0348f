#pragma once

#include <cstddef>
#include <utility>

// Low-level arithmetic kernels used by the DCT, distortion metrics and the
// classifiers. Each kernel has a scalar reference implementation and an AVX2
// variant; the active set is chosen once at startup from CPUID. The scalar
// set stays reachable for equivalence testing.

namespace rdclass::kernels {

struct MinMax {
  double min;
  double max;
};

struct Ops {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  MinMax (*min_max)(const double* a, std::size_t n);
  const char* name;
};

const Ops& scalar();
#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2();
bool avx2_supported();
#endif

// Active dispatch table (scalar unless AVX2 is available).
const Ops& active();

// Test hook: force a specific table. Pass nullptr to restore autodetection.
void set_active_for_testing(const Ops* ops);

}  // namespace rdclass::kernels
