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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mtal {

/// Dense H x W bit grid, row-major, packed 64 pixels per word.
/// Bits past H*W in the last word are always zero.
class BinaryMask {
 public:
  BinaryMask() = default;
  /// Throws Error(kInvalidArgument) on a zero dimension.
  BinaryMask(std::size_t height, std::size_t width, bool fill = false);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }

  bool get(std::size_t row, std::size_t col) const {
    const std::size_t i = row * width_ + col;
    return (words_[i / 64] >> (i % 64)) & 1u;
  }
  void set(std::size_t row, std::size_t col, bool value = true) {
    const std::size_t i = row * width_ + col;
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    if (value) {
      words_[i / 64] |= bit;
    } else {
      words_[i / 64] &= ~bit;
    }
  }
  bool get_flat(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1u;
  }

  std::span<const std::uint64_t> words() const { return words_; }
  /// Raw access for kernels; callers must restore the zero-tail invariant
  /// (see clear_tail).
  std::span<std::uint64_t> mutable_words() { return words_; }
  void clear_tail();

  bool same_shape(const BinaryMask& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Uncompressed run-length encoding, row-major, alternating runs of zeros
/// and ones starting with zeros. Only the first count may be zero.
struct Rle {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint64_t> counts;

  bool operator==(const Rle&) const = default;
};

Rle RleEncode(const BinaryMask& mask);
/// Throws Error(kInvalidArgument) when counts do not sum to H*W or contain
/// an interior zero.
BinaryMask RleDecode(const Rle& rle);

/// Pixelwise maximum (bitwise OR). Throws on shape mismatch.
BinaryMask PixelwiseMax(const BinaryMask& a, const BinaryMask& b);
BinaryMask InvertMask(const BinaryMask& m);
std::uint64_t CountOnes(const BinaryMask& m);
/// |a AND b|. Throws on shape mismatch.
std::uint64_t CountOverlap(const BinaryMask& a, const BinaryMask& b);

struct PixelOffset {
  std::size_t row = 0;
  std::size_t col = 0;
};

/// Places `local` with its top-left corner at `offset` in an otherwise empty
/// frame of `frame_height` x `frame_width`. Throws when it does not fit.
BinaryMask PasteIntoFrame(const BinaryMask& local, PixelOffset offset,
                          std::size_t frame_height, std::size_t frame_width);

}  // namespace mtal
