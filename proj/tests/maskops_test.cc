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

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mtal {
namespace {

using testing::kPropertyCases;
using testing::RandomMask;

BinaryMask FromBits(std::size_t h, std::size_t w, std::vector<int> bits) {
  BinaryMask m(h, w);
  for (std::size_t i = 0; i < bits.size(); ++i)
    m.set(i / w, i % w, bits[i] != 0);
  return m;
}

TEST(RleTest, WorkedExamples) {
  EXPECT_EQ(RleEncode(FromBits(1, 4, {0, 1, 1, 0})).counts,
            (std::vector<std::uint64_t>{1, 2, 1}));
  EXPECT_EQ(RleEncode(BinaryMask(2, 2)).counts,
            (std::vector<std::uint64_t>{4}));
  EXPECT_EQ(RleEncode(BinaryMask(2, 2, true)).counts,
            (std::vector<std::uint64_t>{0, 4}));
}

TEST(RleTest, DecodeRejectsWrongTotal) {
  EXPECT_ERROR_KIND(RleDecode({3, 3, {0, 4}}), ErrorKind::kInvalidArgument);
}

TEST(RleTest, DecodeRejectsInteriorZero) {
  EXPECT_ERROR_KIND(RleDecode({2, 2, {1, 0, 3}}), ErrorKind::kInvalidArgument);
}

TEST(RleTest, RoundTrip) {
  RandomStream rng(1);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    const std::size_t h = 1 + rng.below(20);
    const std::size_t w = 1 + rng.below(70);
    const BinaryMask m = RandomMask(rng, h, w, rng.uniform());
    const Rle rle = RleEncode(m);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < rle.counts.size(); ++i) {
      if (i > 0) ASSERT_GT(rle.counts[i], 0u);
      total += rle.counts[i];
    }
    ASSERT_EQ(total, h * w);
    ASSERT_EQ(RleDecode(rle), m);
  }
}

TEST(MaskLatticeTest, MaxAndInvertLaws) {
  RandomStream rng(2);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    const std::size_t h = 1 + rng.below(12);
    const std::size_t w = 1 + rng.below(90);
    const BinaryMask a = RandomMask(rng, h, w, rng.uniform());
    const BinaryMask b = RandomMask(rng, h, w, rng.uniform());
    const BinaryMask c = RandomMask(rng, h, w, rng.uniform());
    ASSERT_EQ(PixelwiseMax(a, b), PixelwiseMax(b, a));
    ASSERT_EQ(PixelwiseMax(a, a), a);
    ASSERT_EQ(PixelwiseMax(PixelwiseMax(a, b), c),
              PixelwiseMax(a, PixelwiseMax(b, c)));
    ASSERT_EQ(InvertMask(InvertMask(a)), a);
    const BinaryMask inv = InvertMask(a);
    ASSERT_EQ(CountOverlap(a, inv), 0u);
    ASSERT_EQ(CountOnes(a) + CountOnes(inv), h * w);
    std::uint64_t overlap = 0;
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t col = 0; col < w; ++col)
        overlap += a.get(r, col) && b.get(r, col);
    }
    ASSERT_EQ(CountOverlap(a, b), overlap);
  }
}

TEST(MaskLatticeTest, ShapeMismatchThrows) {
  EXPECT_ERROR_KIND(PixelwiseMax(BinaryMask(2, 3), BinaryMask(3, 2)),
                    ErrorKind::kDimensionMismatch);
  EXPECT_ERROR_KIND(CountOverlap(BinaryMask(2, 3), BinaryMask(2, 4)),
                    ErrorKind::kDimensionMismatch);
}

TEST(BinaryMaskTest, ZeroDimensionThrows) {
  EXPECT_ERROR_KIND(BinaryMask(0, 3), ErrorKind::kInvalidArgument);
}

TEST(BinaryMaskTest, FilledMaskKeepsTailClear) {
  const BinaryMask m(3, 5, true);
  EXPECT_EQ(m.words().size(), 1u);
  EXPECT_EQ(m.words()[0], (std::uint64_t{1} << 15) - 1);
}

TEST(PasteTest, PlacesLocalMask) {
  const BinaryMask local = FromBits(2, 2, {1, 0, 0, 1});
  const BinaryMask frame = PasteIntoFrame(local, {1, 2}, 4, 5);
  EXPECT_EQ(CountOnes(frame), 2u);
  EXPECT_TRUE(frame.get(1, 2));
  EXPECT_TRUE(frame.get(2, 3));
}

TEST(PasteTest, OverflowThrows) {
  EXPECT_ERROR_KIND(PasteIntoFrame(BinaryMask(2, 2, true), {1, 1}, 2, 2),
                    ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace mtal
