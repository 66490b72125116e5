// Copyright 2026 The MTAL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kernels_internal.hpp"

#if MTAL_HAVE_X86

#include <immintrin.h>

#include <bit>
#include <cstring>

#define MTAL_AVX2 __attribute__((target("avx2")))

namespace mtal::kernels {
namespace {

MTAL_AVX2 void OrWords(const std::uint64_t* a, const std::uint64_t* b,
                       std::uint64_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_or_si256(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] | b[i];
}

MTAL_AVX2 void NotWords(const std::uint64_t* in, std::uint64_t* out,
                        std::size_t n) {
  const __m256i ones = _mm256_set1_epi64x(-1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_xor_si256(v, ones));
  }
  for (; i < n; ++i) out[i] = ~in[i];
}

// Nibble-LUT population count, summed per 64-bit lane with SAD.
MTAL_AVX2 inline __m256i PopcountBytes(__m256i v) {
  const __m256i lut =
      _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1,
                       2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i counts = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo),
                                         _mm256_shuffle_epi8(lut, hi));
  return _mm256_sad_epu8(counts, _mm256_setzero_si256());
}

MTAL_AVX2 inline std::uint64_t HorizontalSum(__m256i acc) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

MTAL_AVX2 std::uint64_t Popcount(const std::uint64_t* w, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(w + i));
    acc = _mm256_add_epi64(acc, PopcountBytes(v));
  }
  std::uint64_t total = HorizontalSum(acc);
  for (; i < n; ++i) total += std::popcount(w[i]);
  return total;
}

MTAL_AVX2 std::uint64_t AndPopcount(const std::uint64_t* a,
                                    const std::uint64_t* b, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    acc = _mm256_add_epi64(acc, PopcountBytes(_mm256_and_si256(va, vb)));
  }
  std::uint64_t total = HorizontalSum(acc);
  for (; i < n; ++i) total += std::popcount(a[i] & b[i]);
  return total;
}

MTAL_AVX2 void ThresholdBits(const float* values, std::size_t n,
                             float threshold, std::uint64_t* out) {
  const __m256 t = _mm256_set1_ps(threshold);
  const std::size_t full_words = n / 64;
  for (std::size_t w = 0; w < full_words; ++w) {
    std::uint64_t word = 0;
    const float* base = values + w * 64;
    for (int lane = 0; lane < 8; ++lane) {
      const __m256 v = _mm256_loadu_ps(base + lane * 8);
      const auto bits = static_cast<std::uint32_t>(
          _mm256_movemask_ps(_mm256_cmp_ps(v, t, _CMP_GT_OQ)));
      word |= std::uint64_t{bits} << (lane * 8);
    }
    out[w] = word;
  }
  if (full_words * 64 < n) {
    std::uint64_t word = 0;
    for (std::size_t i = full_words * 64; i < n; ++i) {
      if (values[i] > threshold) word |= std::uint64_t{1} << (i % 64);
    }
    out[full_words] = word;
  }
}

MTAL_AVX2 void ArgmaxPlanes(const float* data, std::size_t channels,
                            std::size_t n, std::int32_t* out) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 best = _mm256_loadu_ps(data + i);
    __m256 best_k = _mm256_castsi256_ps(_mm256_setzero_si256());
    for (std::size_t k = 1; k < channels; ++k) {
      const __m256 v = _mm256_loadu_ps(data + k * n + i);
      const __m256 gt = _mm256_cmp_ps(v, best, _CMP_GT_OQ);
      best = _mm256_blendv_ps(best, v, gt);
      const __m256 kv =
          _mm256_castsi256_ps(_mm256_set1_epi32(static_cast<int>(k)));
      best_k = _mm256_blendv_ps(best_k, kv, gt);
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_castps_si256(best_k));
  }
  for (; i < n; ++i) {
    float best = data[i];
    std::int32_t best_k = 0;
    for (std::size_t k = 1; k < channels; ++k) {
      const float v = data[k * n + i];
      if (v > best) {
        best = v;
        best_k = static_cast<std::int32_t>(k);
      }
    }
    out[i] = best_k;
  }
}

MTAL_AVX2 void LabelEqBits(const std::int32_t* labels, std::size_t n,
                           std::int32_t value, std::uint64_t* out) {
  const __m256i target = _mm256_set1_epi32(value);
  const std::size_t full_words = n / 64;
  for (std::size_t w = 0; w < full_words; ++w) {
    std::uint64_t word = 0;
    const std::int32_t* base = labels + w * 64;
    for (int lane = 0; lane < 8; ++lane) {
      const __m256i v =
          _mm256_loadu_si256(reinterpret_cast<const __m256i*>(base + lane * 8));
      const auto bits = static_cast<std::uint32_t>(_mm256_movemask_ps(
          _mm256_castsi256_ps(_mm256_cmpeq_epi32(v, target))));
      word |= std::uint64_t{bits} << (lane * 8);
    }
    out[w] = word;
  }
  if (full_words * 64 < n) {
    std::uint64_t word = 0;
    for (std::size_t i = full_words * 64; i < n; ++i) {
      if (labels[i] == value) word |= std::uint64_t{1} << (i % 64);
    }
    out[full_words] = word;
  }
}

MTAL_AVX2 void LabelInSetBits(const std::int32_t* labels, std::size_t n,
                              const std::int32_t* table, std::uint64_t* out) {
  const __m256i zero = _mm256_setzero_si256();
  const std::size_t full_words = n / 64;
  for (std::size_t w = 0; w < full_words; ++w) {
    std::uint64_t word = 0;
    const std::int32_t* base = labels + w * 64;
    for (int lane = 0; lane < 8; ++lane) {
      const __m256i idx =
          _mm256_loadu_si256(reinterpret_cast<const __m256i*>(base + lane * 8));
      const __m256i member = _mm256_i32gather_epi32(table, idx, 4);
      const auto zero_bits = static_cast<std::uint32_t>(_mm256_movemask_ps(
          _mm256_castsi256_ps(_mm256_cmpeq_epi32(member, zero))));
      word |= std::uint64_t{~zero_bits & 0xffu} << (lane * 8);
    }
    out[w] = word;
  }
  if (full_words * 64 < n) {
    std::uint64_t word = 0;
    for (std::size_t i = full_words * 64; i < n; ++i) {
      if (table[labels[i]] != 0) word |= std::uint64_t{1} << (i % 64);
    }
    out[full_words] = word;
  }
}

constexpr KernelTable kAvx2{
    Isa::kAvx2,    OrWords,      NotWords,    Popcount,       AndPopcount,
    ThresholdBits, ArgmaxPlanes, LabelEqBits, LabelInSetBits,
};

}  // namespace

const KernelTable* Avx2KernelsIfCompiled() { return &kAvx2; }

}  // namespace mtal::kernels

#else

namespace mtal::kernels {
const KernelTable* Avx2KernelsIfCompiled() { return nullptr; }
}  // namespace mtal::kernels

#endif
