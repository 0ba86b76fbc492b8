#include <immintrin.h>

#include "mvdc/kernels.hpp"

namespace mvdc::kern {

namespace {

int64_t hsum_i64(__m256i v) {
  __m128i lo = _mm256_castsi256_si128(v);
  __m128i hi = _mm256_extracti128_si256(v, 1);
  __m128i s = _mm_add_epi64(lo, hi);
  return _mm_cvtsi128_si64(s) + _mm_extract_epi64(s, 1);
}

// Products fit i32 (|a*b| <= 255^2 per lane, madd pairs them: <= 2*255^2),
// so up to 512 vector iterations accumulate safely below 2^31 * lanes before
// widening into the i64 total.
int64_t dot_masked_i16_avx2(const int16_t* a, const int16_t* b,
                            const uint8_t* mask, size_t n) {
  int64_t total = 0;
  size_t i = 0;
  while (i + 16 <= n) {
    size_t block = ((n - i) / 16 < 512) ? (n - i) / 16 : 512;
    __m256i acc = _mm256_setzero_si256();
    for (size_t it = 0; it < block; ++it, i += 16) {
      __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
      __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
      __m128i m8 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(mask + i));
      __m256i m16 = _mm256_cvtepu8_epi16(m8);
      __m256i keep = _mm256_cmpgt_epi16(m16, _mm256_setzero_si256());
      va = _mm256_and_si256(va, keep);
      __m256i prod = _mm256_madd_epi16(va, vb);
      acc = _mm256_add_epi32(acc, prod);
    }
    __m256i lo = _mm256_cvtepi32_epi64(_mm256_castsi256_si128(acc));
    __m256i hi = _mm256_cvtepi32_epi64(_mm256_extracti128_si256(acc, 1));
    total += hsum_i64(_mm256_add_epi64(lo, hi));
  }
  for (; i < n; ++i) {
    if (mask[i]) total += static_cast<int64_t>(a[i]) * b[i];
  }
  return total;
}

// Squared bytes <= 255^2; madd pairs of them stay < 2^17, so 8192 vector
// iterations keep every i32 lane below 2^31.
uint64_t sse_u8_avx2(const uint8_t* a, const uint8_t* b, size_t n) {
  uint64_t total = 0;
  size_t i = 0;
  while (i + 16 <= n) {
    size_t block = ((n - i) / 16 < 8192) ? (n - i) / 16 : 8192;
    __m256i acc = _mm256_setzero_si256();
    for (size_t it = 0; it < block; ++it, i += 16) {
      __m128i ra = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a + i));
      __m128i rb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b + i));
      __m256i wa = _mm256_cvtepu8_epi16(ra);
      __m256i wb = _mm256_cvtepu8_epi16(rb);
      __m256i d = _mm256_sub_epi16(wa, wb);
      acc = _mm256_add_epi32(acc, _mm256_madd_epi16(d, d));
    }
    __m256i lo = _mm256_cvtepi32_epi64(_mm256_castsi256_si128(acc));
    __m256i hi = _mm256_cvtepi32_epi64(_mm256_extracti128_si256(acc, 1));
    total += static_cast<uint64_t>(hsum_i64(_mm256_add_epi64(lo, hi)));
  }
  for (; i < n; ++i) {
    int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    total += static_cast<uint64_t>(d * d);
  }
  return total;
}

const Ops kAvx2{"avx2", dot_masked_i16_avx2, sse_u8_avx2};

}  // namespace

const Ops& avx2_ops() { return kAvx2; }

}  // namespace mvdc::kern
