#if defined(__aarch64__)

#include <arm_neon.h>

#include "mvdc/kernels.hpp"

namespace mvdc::kern {

namespace {

int64_t dot_masked_i16_neon(const int16_t* a, const int16_t* b,
                            const uint8_t* mask, size_t n) {
  int64x2_t acc = vdupq_n_s64(0);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    int16x8_t va = vld1q_s16(a + i);
    int16x8_t vb = vld1q_s16(b + i);
    uint16x8_t m = vmovl_u8(vld1_u8(mask + i));
    uint16x8_t keep = vcgtq_u16(m, vdupq_n_u16(0));
    va = vandq_s16(va, vreinterpretq_s16_u16(keep));
    int32x4_t lo = vmull_s16(vget_low_s16(va), vget_low_s16(vb));
    int32x4_t hi = vmull_s16(vget_high_s16(va), vget_high_s16(vb));
    acc = vaddq_s64(acc, vpaddlq_s32(lo));
    acc = vaddq_s64(acc, vpaddlq_s32(hi));
  }
  int64_t total = vgetq_lane_s64(acc, 0) + vgetq_lane_s64(acc, 1);
  for (; i < n; ++i) {
    if (mask[i]) total += static_cast<int64_t>(a[i]) * b[i];
  }
  return total;
}

uint64_t sse_u8_neon(const uint8_t* a, const uint8_t* b, size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    uint8x8_t ra = vld1_u8(a + i);
    uint8x8_t rb = vld1_u8(b + i);
    int16x8_t d = vreinterpretq_s16_u16(vsubl_u8(ra, rb));
    int32x4_t lo = vmull_s16(vget_low_s16(d), vget_low_s16(d));
    int32x4_t hi = vmull_s16(vget_high_s16(d), vget_high_s16(d));
    acc = vaddq_u64(acc, vreinterpretq_u64_s64(vpaddlq_s32(lo)));
    acc = vaddq_u64(acc, vreinterpretq_u64_s64(vpaddlq_s32(hi)));
  }
  uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) {
    int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    total += static_cast<uint64_t>(d * d);
  }
  return total;
}

const Ops kNeon{"neon", dot_masked_i16_neon, sse_u8_neon};

}  // namespace

const Ops& neon_ops() { return kNeon; }

}  // namespace mvdc::kern

#endif
