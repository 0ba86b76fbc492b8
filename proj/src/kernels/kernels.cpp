#include "mvdc/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace mvdc::kern {

#if defined(MVDC_HAVE_AVX2)
const Ops& avx2_ops();
#endif
#if defined(MVDC_HAVE_NEON)
const Ops& neon_ops();
#endif

namespace {

int64_t dot_masked_i16_scalar(const int16_t* a, const int16_t* b,
                              const uint8_t* mask, size_t n) {
  int64_t acc = 0;
  for (size_t i = 0; i < n; ++i) {
    if (mask[i]) acc += static_cast<int64_t>(a[i]) * b[i];
  }
  return acc;
}

uint64_t sse_u8_scalar(const uint8_t* a, const uint8_t* b, size_t n) {
  uint64_t acc = 0;
  for (size_t i = 0; i < n; ++i) {
    int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    acc += static_cast<uint64_t>(d * d);
  }
  return acc;
}

const Ops kScalar{"scalar", dot_masked_i16_scalar, sse_u8_scalar};

bool force_scalar() {
  const char* env = std::getenv("MVDC_FORCE_SCALAR");
  return env && std::strcmp(env, "1") == 0;
}

const Ops& pick_ops() {
  if (force_scalar()) return kScalar;
#if defined(MVDC_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return avx2_ops();
#endif
#if defined(MVDC_HAVE_NEON)
  return neon_ops();
#endif
  return kScalar;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }

const Ops& active_ops() {
  static const Ops& ops = pick_ops();
  return ops;
}

}  // namespace mvdc::kern
