#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "rdclass/kernels.hpp"

using namespace rdclass;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar and simd kernels agree on random inputs") {
  const auto& s = kernels::scalar();
  const auto& a = kernels::active();
  std::mt19937_64 rng(42);
  // Odd lengths exercise the tail loops.
  for (std::size_t n : {1u, 2u, 3u, 7u, 8u, 16u, 31u, 500u, 1001u}) {
    for (int rep = 0; rep < 20; ++rep) {
      auto x = random_vec(rng, n);
      auto y = random_vec(rng, n);
      CHECK(s.dot(x.data(), y.data(), n) ==
            doctest::Approx(a.dot(x.data(), y.data(), n)).epsilon(1e-12));
      CHECK(s.sum(x.data(), n) == doctest::Approx(a.sum(x.data(), n)).epsilon(1e-12));
      CHECK(s.sum_sq(x.data(), n) == doctest::Approx(a.sum_sq(x.data(), n)).epsilon(1e-12));
      // max/min are order-independent: exact equality expected.
      CHECK(s.max_abs_diff(x.data(), y.data(), n) == a.max_abs_diff(x.data(), y.data(), n));
      auto ms = s.min_max(x.data(), n);
      auto ma = a.min_max(x.data(), n);
      CHECK(ms.min == ma.min);
      CHECK(ms.max == ma.max);

      auto ys = y;
      auto ya = y;
      s.axpy(1.75, x.data(), ys.data(), n);
      a.axpy(1.75, x.data(), ya.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(ys[i] == doctest::Approx(ya[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("kernel dispatch override") {
  kernels::set_active_for_testing(&kernels::scalar());
  CHECK(std::string(kernels::active().name) == "scalar");
  kernels::set_active_for_testing(nullptr);
#if defined(__x86_64__)
  if (kernels::avx2_supported()) CHECK(std::string(kernels::active().name) == "avx2");
#endif
}

TEST_CASE("dot handles empty input") {
  const auto& a = kernels::active();
  CHECK(a.dot(nullptr, nullptr, 0) == 0.0);
  CHECK(a.sum(nullptr, 0) == 0.0);
}
