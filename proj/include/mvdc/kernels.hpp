#pragma once

#include <cstddef>
#include <cstdint>

namespace mvdc::kern {

// Integer inner loops behind the dense passes. Scalar reference plus SIMD
// variants selected at runtime; all variants must agree bit-exactly.
struct Ops {
  const char* name;
  // sum of a[i]*b[i] over i where mask[i] != 0; inputs bounded by |x| <= 255
  int64_t (*dot_masked_i16)(const int16_t* a, const int16_t* b,
                            const uint8_t* mask, size_t n);
  // sum of (a[i]-b[i])^2
  uint64_t (*sse_u8)(const uint8_t* a, const uint8_t* b, size_t n);
};

const Ops& scalar_ops();

// Dispatched implementation; MVDC_FORCE_SCALAR=1 in the environment pins the
// scalar reference.
const Ops& active_ops();

}  // namespace mvdc::kern
