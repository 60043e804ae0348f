#include "rdclass/kernels.hpp"

namespace rdclass::kernels {

namespace {

const Ops* g_override = nullptr;

const Ops& detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2_supported()) return avx2();
#endif
  return scalar();
}

}  // namespace

const Ops& active() {
  if (g_override) return *g_override;
  static const Ops& detected = detect();
  return detected;
}

void set_active_for_testing(const Ops* ops) { g_override = ops; }

}  // namespace rdclass::kernels
