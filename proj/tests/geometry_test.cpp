// Copyright 2026 The oodeval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oodeval/geometry.hpp"
#include "oracle/raster.hpp"
#include "support.hpp"

namespace oodeval {
namespace {

using testing_support::RandomBox;
using testing_support::Rng;

TEST(IouTest, IdenticalBoxesGiveOne) {
  BoundingBox b(3.25, 1.5, 17.75, 9.0);
  EXPECT_EQ(Iou(b, b), 1.0);
}

TEST(IouTest, CornerContactGivesZero) {
  EXPECT_EQ(Iou(BoundingBox(0, 0, 10, 10), BoundingBox(10, 10, 20, 20)), 0.0);
  EXPECT_EQ(Iou(BoundingBox(0, 0, 10, 10), BoundingBox(10, 0, 20, 10)), 0.0);
}

TEST(IouTest, HalfShiftedBoxesGiveOneThird) {
  EXPECT_DOUBLE_EQ(Iou(BoundingBox(0, 0, 10, 10), BoundingBox(5, 0, 15, 10)), 50.0 / 150.0);
}

TEST(IntersectionAreaTest, Examples) {
  EXPECT_EQ(IntersectionArea(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)), 0.0);
  EXPECT_EQ(IntersectionArea(BoundingBox(0, 0, 10, 10), BoundingBox(2, 3, 4, 8)), 10.0);
  EXPECT_EQ(IntersectionArea(BoundingBox(0, 0, 10, 10), BoundingBox(5, 5, 15, 15)), 25.0);
}

TEST(IouPropertyTest, SymmetricSelfExactAndBounded) {
  Rng rng(101);
  for (int i = 0; i < 5000; ++i) {
    const bool grid = rng.Chance(0.5);
    const BoundingBox a = RandomBox(rng, 300, 300, grid);
    const BoundingBox b = RandomBox(rng, 300, 300, grid);
    const double ab = Iou(a, b);
    EXPECT_EQ(ab, Iou(b, a));
    EXPECT_EQ(Iou(a, a), 1.0);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_EQ(IntersectionArea(a, b), IntersectionArea(b, a));
  }
}

// Exact on integer boxes shifted by integers, where every coordinate and
// area is exactly representable.
TEST(IouPropertyTest, TranslationInvariantOnIntegerGrid) {
  Rng rng(102);
  for (int i = 0; i < 5000; ++i) {
    const BoundingBox a = RandomBox(rng, 300, 300, true);
    const BoundingBox b = RandomBox(rng, 300, 300, true);
    const double dx = rng.Int(-500, 500), dy = rng.Int(-500, 500);
    auto shift = [&](const BoundingBox& x) {
      return BoundingBox(x.x1() + dx, x.y1() + dy, x.x2() + dx, x.y2() + dy);
    };
    EXPECT_EQ(Iou(a, b), Iou(shift(a), shift(b)));
  }
}

TEST(IouPropertyTest, TranslationInvariantWithinRoundingOnRealBoxes) {
  Rng rng(103);
  for (int i = 0; i < 5000; ++i) {
    const BoundingBox a = RandomBox(rng, 300, 300, false);
    const BoundingBox b = RandomBox(rng, 300, 300, false);
    const double dx = rng.Real(-500, 500), dy = rng.Real(-500, 500);
    auto shift = [&](const BoundingBox& x) {
      return BoundingBox(x.x1() + dx, x.y1() + dy, x.x2() + dx, x.y2() + dy);
    };
    EXPECT_NEAR(Iou(a, b), Iou(shift(a), shift(b)), 1e-9);
  }
}

TEST(IouPropertyTest, AgreesWithPixelCountingOnIntegerBoxes) {
  Rng rng(104);
  for (int i = 0; i < 2000; ++i) {
    const BoundingBox a = RandomBox(rng, 60, 60, true, 1, 30);
    const BoundingBox b = (rng.Chance(0.7) ? testing_support::Jitter(rng, a, 0.5, true)
                                           : RandomBox(rng, 60, 60, true, 1, 30));
    const double tol = 1.0 / std::min(a.area(), b.area());
    EXPECT_NEAR(Iou(a, b),
                oracle::RasterIou(testing_support::ToOracle(a), testing_support::ToOracle(b)),
                tol);
  }
}

TEST(DeaugmentTest, IdentityKeepsBox) {
  const BoundingBox b(10, 20, 30, 40);
  EXPECT_EQ(DeaugmentBox(b, AugmentationSpec(AugmentationKind::kIdentity, 100, 80)), b);
}

TEST(DeaugmentTest, HorizontalFlipExample) {
  const AugmentationSpec flip(AugmentationKind::kHorizontalFlip, 100, 80);
  EXPECT_EQ(DeaugmentBox(BoundingBox(10, 20, 30, 40), flip), BoundingBox(70, 20, 90, 40));
}

TEST(DeaugmentTest, RotationsMapCornersBack) {
  // Original 100 x 60. Turned clockwise, the original box (10, 5, 30, 15)
  // lands at (60 - 15, 10, 60 - 5, 30) = (45, 10, 55, 30) in the 60 x 100 view.
  const AugmentationSpec cw(AugmentationKind::kRotate90Cw, 100, 60);
  EXPECT_EQ(DeaugmentBox(BoundingBox(45, 10, 55, 30), cw), BoundingBox(10, 5, 30, 15));
  // Turned counter-clockwise, (x, y) -> (y, 100 - x): (5, 70, 15, 90).
  const AugmentationSpec ccw(AugmentationKind::kRotate90Ccw, 100, 60);
  EXPECT_EQ(DeaugmentBox(BoundingBox(5, 70, 15, 90), ccw), BoundingBox(10, 5, 30, 15));
}

TEST(DeaugmentTest, ParsesKindNamesAndRejectsUnknown) {
  EXPECT_EQ(ParseAugmentationKind("hflip"), AugmentationKind::kHorizontalFlip);
  EXPECT_EQ(ParseAugmentationKind("horizontal_flip"), AugmentationKind::kHorizontalFlip);
  EXPECT_EQ(ParseAugmentationKind("rotate90_ccw"), AugmentationKind::kRotate90Ccw);
  EXPECT_THROW(ParseAugmentationKind("vflip"), ConfigError);
  EXPECT_THROW(AugmentationSpec(AugmentationKind::kIdentity, 0, 10), ConfigError);
}

// Exact when coordinates and widths sit on a dyadic grid, where W - x has no
// rounding.
TEST(DeaugmentPropertyTest, HorizontalFlipIsAnExactInvolution) {
  Rng rng(105);
  for (int i = 0; i < 5000; ++i) {
    const double w = rng.Int(50, 4000) + rng.Int(0, 3) * 0.25;
    const BoundingBox b = RandomBox(rng, w, 500, true);
    const BoundingBox q(b.x1() + 0.5, b.y1(), b.x2() + 0.25, b.y2());
    const AugmentationSpec flip(AugmentationKind::kHorizontalFlip, w, 500);
    EXPECT_EQ(DeaugmentBox(DeaugmentBox(b, flip), flip), b);
    EXPECT_EQ(DeaugmentBox(DeaugmentBox(q, flip), flip), q);
  }
}

TEST(DeaugmentPropertyTest, HorizontalFlipInvolutionWithinRounding) {
  Rng rng(106);
  for (int i = 0; i < 5000; ++i) {
    const double w = rng.Real(50, 4000);
    const BoundingBox b = RandomBox(rng, w, 500, false);
    const AugmentationSpec flip(AugmentationKind::kHorizontalFlip, w, 500);
    const BoundingBox back = DeaugmentBox(DeaugmentBox(b, flip), flip);
    EXPECT_NEAR(back.x1(), b.x1(), 1e-9 * w);
    EXPECT_NEAR(back.x2(), b.x2(), 1e-9 * w);
    EXPECT_EQ(back.y1(), b.y1());
    EXPECT_EQ(back.y2(), b.y2());
  }
}

// Undoing a clockwise turn maps a box from the rotated view to the original;
// undoing a counter-clockwise turn of the rotated view (whose reference size
// is the rotated one) returns it.
TEST(DeaugmentPropertyTest, ClockwiseThenCounterClockwiseIsIdentity) {
  Rng rng(107);
  for (int i = 0; i < 5000; ++i) {
    const int w = rng.Int(20, 2000), h = rng.Int(20, 2000);
    const BoundingBox in_rotated = RandomBox(rng, h, w, true);
    const BoundingBox original =
        DeaugmentBox(in_rotated, AugmentationSpec(AugmentationKind::kRotate90Cw, w, h));
    EXPECT_GE(original.x1(), 0);
    EXPECT_LE(original.x2(), w);
    EXPECT_LE(original.y2(), h);
    const BoundingBox back =
        DeaugmentBox(original, AugmentationSpec(AugmentationKind::kRotate90Ccw, h, w));
    EXPECT_EQ(back, in_rotated);
  }
}

}  // namespace
}  // namespace oodeval
