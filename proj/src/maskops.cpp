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

#include "mtal/maskops.hpp"

#include <string>

#include "mtal/error.hpp"
#include "mtal/kernels/kernels.hpp"

namespace mtal {
namespace {

void RequireSameShape(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::kDimensionMismatch,
                "mask shapes differ: " + std::to_string(a.height()) + "x" +
                    std::to_string(a.width()) + " vs " +
                    std::to_string(b.height()) + "x" +
                    std::to_string(b.width()));
  }
}

}  // namespace

BinaryMask::BinaryMask(std::size_t height, std::size_t width, bool fill)
    : height_(height), width_(width) {
  if (height == 0 || width == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "mask dimensions must be positive");
  }
  words_.assign(kernels::WordsFor(height * width),
                fill ? ~std::uint64_t{0} : std::uint64_t{0});
  clear_tail();
}

void BinaryMask::clear_tail() {
  const std::size_t used = pixels() % 64;
  if (used != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << used) - 1;
  }
}

Rle RleEncode(const BinaryMask& mask) {
  Rle out{mask.height(), mask.width(), {}};
  const std::size_t n = mask.pixels();
  bool current = false;
  std::uint64_t run = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool bit = mask.get_flat(i);
    if (bit != current) {
      out.counts.push_back(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  out.counts.push_back(run);
  return out;
}

BinaryMask RleDecode(const Rle& rle) {
  BinaryMask out(rle.height, rle.width);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    if (i > 0 && rle.counts[i] == 0) {
      throw Error(ErrorKind::kInvalidArgument, "RLE has an interior zero run");
    }
    total += rle.counts[i];
  }
  if (total != out.pixels()) {
    throw Error(ErrorKind::kInvalidArgument,
                "RLE counts sum to " + std::to_string(total) + ", expected " +
                    std::to_string(out.pixels()));
  }
  std::size_t pos = 0;
  bool value = false;
  auto words = out.mutable_words();
  for (std::uint64_t run : rle.counts) {
    if (value) {
      for (std::size_t i = pos; i < pos + run; ++i) {
        words[i / 64] |= std::uint64_t{1} << (i % 64);
      }
    }
    pos += run;
    value = !value;
  }
  return out;
}

BinaryMask PixelwiseMax(const BinaryMask& a, const BinaryMask& b) {
  RequireSameShape(a, b);
  BinaryMask out(a.height(), a.width());
  kernels::Active().or_words(a.words().data(), b.words().data(),
                             out.mutable_words().data(), a.words().size());
  return out;
}

BinaryMask InvertMask(const BinaryMask& m) {
  BinaryMask out(m.height(), m.width());
  kernels::Active().not_words(m.words().data(), out.mutable_words().data(),
                              m.words().size());
  out.clear_tail();
  return out;
}

std::uint64_t CountOnes(const BinaryMask& m) {
  return kernels::Active().popcount(m.words().data(), m.words().size());
}

std::uint64_t CountOverlap(const BinaryMask& a, const BinaryMask& b) {
  RequireSameShape(a, b);
  return kernels::Active().and_popcount(a.words().data(), b.words().data(),
                                        a.words().size());
}

BinaryMask PasteIntoFrame(const BinaryMask& local, PixelOffset offset,
                          std::size_t frame_height, std::size_t frame_width) {
  if (offset.row + local.height() > frame_height ||
      offset.col + local.width() > frame_width) {
    throw Error(ErrorKind::kInvalidArgument,
                "pasted mask does not fit inside the frame");
  }
  BinaryMask out(frame_height, frame_width);
  for (std::size_t r = 0; r < local.height(); ++r) {
    for (std::size_t c = 0; c < local.width(); ++c) {
      if (local.get(r, c)) out.set(offset.row + r, offset.col + c);
    }
  }
  return out;
}

}  // namespace mtal
