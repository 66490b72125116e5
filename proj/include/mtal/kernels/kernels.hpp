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

#pragma once

// Pixel-loop kernels behind the mask and scoring code.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 variant. All variants are bit-exact with the scalar
// reference (integer or exact-comparison arithmetic only), so the selected
// ISA never changes a score. Packed bit layout: bit i of the stream lives in
// word i/64 at bit position i%64.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mtal::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view IsaName(Isa isa);

struct KernelTable {
  Isa isa;

  // out[i] = a[i] | b[i]
  void (*or_words)(const std::uint64_t* a, const std::uint64_t* b,
                   std::uint64_t* out, std::size_t n_words);
  // out[i] = ~in[i]  (caller clears tail bits)
  void (*not_words)(const std::uint64_t* in, std::uint64_t* out,
                    std::size_t n_words);
  std::uint64_t (*popcount)(const std::uint64_t* words, std::size_t n_words);
  std::uint64_t (*and_popcount)(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t n_words);
  // Sets bit i where values[i] > threshold. `out` holds ceil(n/64) words and
  // is fully overwritten.
  void (*threshold_bits)(const float* values, std::size_t n, float threshold,
                         std::uint64_t* out);
  // Planar argmax over `channels` planes of n pixels; ties to lowest index.
  void (*argmax_planes)(const float* data, std::size_t channels, std::size_t n,
                        std::int32_t* out);
  // Sets bit i where labels[i] == value.
  void (*label_eq_bits)(const std::int32_t* labels, std::size_t n,
                        std::int32_t value, std::uint64_t* out);
  // Sets bit i where table[labels[i]] != 0. Labels must index into table.
  void (*label_in_set_bits)(const std::int32_t* labels, std::size_t n,
                            const std::int32_t* table, std::uint64_t* out);
};

const KernelTable& ScalarKernels();

/// Table for `isa`, or nullptr when the ISA is not compiled in or the CPU
/// lacks it.
const KernelTable* KernelsFor(Isa isa);

/// Best table for this CPU. Setting MTAL_ISA=scalar in the environment
/// forces the reference kernels.
const KernelTable& Active();

/// ISAs usable on this machine, scalar first.
std::vector<Isa> AvailableIsas();

constexpr std::size_t WordsFor(std::size_t bits) { return (bits + 63) / 64; }

}  // namespace mtal::kernels
