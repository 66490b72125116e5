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

#include <bit>
#include <cstring>

#include "mtal/kernels/kernels.hpp"

namespace mtal::kernels {
namespace {

void OrWords(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] | b[i];
}

void NotWords(const std::uint64_t* in, std::uint64_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = ~in[i];
}

std::uint64_t Popcount(const std::uint64_t* w, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += std::popcount(w[i]);
  return total;
}

std::uint64_t AndPopcount(const std::uint64_t* a, const std::uint64_t* b,
                          std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += std::popcount(a[i] & b[i]);
  return total;
}

void ThresholdBits(const float* values, std::size_t n, float threshold,
                   std::uint64_t* out) {
  std::memset(out, 0, WordsFor(n) * sizeof(std::uint64_t));
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] > threshold) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

void ArgmaxPlanes(const float* data, std::size_t channels, std::size_t n,
                  std::int32_t* out) {
  for (std::size_t i = 0; i < n; ++i) {
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

void LabelEqBits(const std::int32_t* labels, std::size_t n, std::int32_t value,
                 std::uint64_t* out) {
  std::memset(out, 0, WordsFor(n) * sizeof(std::uint64_t));
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == value) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

void LabelInSetBits(const std::int32_t* labels, std::size_t n,
                    const std::int32_t* table, std::uint64_t* out) {
  std::memset(out, 0, WordsFor(n) * sizeof(std::uint64_t));
  for (std::size_t i = 0; i < n; ++i) {
    if (table[labels[i]] != 0) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

constexpr KernelTable kScalar{
    Isa::kScalar,  OrWords,      NotWords,    Popcount,       AndPopcount,
    ThresholdBits, ArgmaxPlanes, LabelEqBits, LabelInSetBits,
};

}  // namespace

const KernelTable& ScalarKernels() { return kScalar; }

}  // namespace mtal::kernels
