/* Copyright 2026 The glas-eval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "glas/baseline.hpp"
#include "glas/crosscheck.hpp"
#include "glas/metrics.hpp"
#include "glas/oracle.hpp"

namespace glas {
namespace {

using Grid = std::vector<std::vector<int>>;

ImageMetrics metrics_of(const LabelMap& gt, const LabelMap& seg, const EvalConfig& config = {}) {
  return image_metrics(analyze_image(gt, seg, config));
}

// Three ground-truth glands; the segmentation merges two of them, matches the
// third and adds a spurious object in the corner.
const LabelMap& frozen_gt() {
  static const LabelMap m(8, 6, {1, 1, 0, 0, 0, 0, 2, 2,  //
                                 1, 1, 0, 0, 0, 0, 2, 2,  //
                                 0, 0, 0, 3, 3, 0, 0, 0,  //
                                 0, 0, 0, 3, 3, 0, 0, 0,  //
                                 0, 0, 0, 0, 0, 0, 0, 0,  //
                                 0, 0, 0, 0, 0, 0, 0, 0});
  return m;
}

const LabelMap& frozen_seg() {
  static const LabelMap m(8, 6, {5, 5, 5, 0, 0, 0, 6, 0,  //
                                 5, 5, 0, 0, 0, 0, 6, 6,  //
                                 0, 0, 0, 6, 6, 6, 6, 0,  //
                                 0, 0, 0, 0, 6, 0, 0, 0,  //
                                 0, 0, 0, 0, 0, 0, 0, 0,  //
                                 0, 0, 0, 0, 0, 0, 9, 9});
  return m;
}

TEST(DetectionTest, FrozenInstance) {
  const auto m = metrics_of(frozen_gt(), frozen_seg());
  EXPECT_EQ(m.counts, (DetectionCounts{2, 1, 1}));
  EXPECT_DOUBLE_EQ(m.f1.f1, 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.f1.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f1.recall, 2.0 / 3.0);
}

TEST(DetectionTest, HalfCoverageIsTruePositive) {
  const auto gt = LabelMap::from_grid(Grid{{1, 1, 1, 1}});
  EXPECT_EQ(metrics_of(gt, LabelMap::from_grid(Grid{{1, 1, 0, 0}})).counts, (DetectionCounts{1, 0, 0}));
  EXPECT_EQ(metrics_of(gt, LabelMap::from_grid(Grid{{1, 0, 0, 0}})).counts, (DetectionCounts{0, 1, 1}));
}

TEST(DetectionTest, GroundTruthObjectIsClaimedOnce) {
  const auto gt = LabelMap::from_grid(Grid{{1, 1, 1, 1}});
  const auto seg = LabelMap::from_grid(Grid{{1, 1, 2, 2}});
  EXPECT_EQ(metrics_of(gt, seg).counts, (DetectionCounts{1, 1, 0}));
}

TEST(DetectionTest, ThresholdIsConfigurable) {
  const auto gt = LabelMap::from_grid(Grid{{1, 1, 1, 1}});
  const auto seg = LabelMap::from_grid(Grid{{1, 1, 1, 0}});
  EvalConfig strict;
  strict.tp_threshold = 0.8;
  EXPECT_EQ(metrics_of(gt, seg).counts.tp, 1u);
  EXPECT_EQ(metrics_of(gt, seg, strict).counts.tp, 0u);
  const auto t = overlap_table(gt, seg);
  EXPECT_THROW(detection_counts(t, maximal_overlap(t), 1.5), ValueError);
  EXPECT_THROW(detection_counts(t, maximal_overlap(t), std::nan("")), ValueError);
}

TEST(F1Test, EmptyCountsScoreOne) {
  EXPECT_DOUBLE_EQ(f1({}).f1, 1.0);
  EXPECT_DOUBLE_EQ(f1({0, 3, 0}).f1, 0.0);
  EXPECT_DOUBLE_EQ(f1({0, 0, 2}).f1, 0.0);
}

TEST(DiceTest, PixelSets) {
  const std::vector<Pixel> a{{0, 0}, {0, 1}, {1, 1}};
  const std::vector<Pixel> b{{1, 1}, {0, 1}, {5, 5}, {6, 6}, {7, 7}};
  EXPECT_DOUBLE_EQ(dice(a, b), 2.0 * 2 / 8);
  EXPECT_DOUBLE_EQ(dice(0, 0, 0), 1.0);
}

TEST(ObjectDiceTest, HalfObject) {
  const auto gt = LabelMap::from_grid(Grid{{1, 1, 1, 1}, {1, 1, 1, 1}});
  const auto seg = LabelMap::from_grid(Grid{{1, 1, 0, 0}, {1, 1, 0, 0}});
  EXPECT_NEAR(object_dice(gt, seg), 2.0 / 3.0, 1e-15);
}

TEST(ObjectHausdorffTest, SinglePairCollapsesToItsDistance) {
  const auto gt = LabelMap::from_grid(Grid{{1, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}});
  const auto seg = LabelMap::from_grid(Grid{{1, 1, 1, 1, 0}, {1, 1, 1, 1, 0}, {1, 1, 1, 1, 0}, {1, 1, 1, 1, 1}});
  EXPECT_DOUBLE_EQ(object_hausdorff(gt, seg, HausdorffMode::kFull), 5.0);
  const std::vector<Pixel> a{{0, 0}};
  const std::vector<Pixel> b{{3, 4}};
  EXPECT_DOUBLE_EQ(hausdorff(a, b), 5.0);
}

TEST(ObjectDiceTest, FrozenInstance) {
  EXPECT_NEAR(object_dice(frozen_gt(), frozen_seg()), 161.0 / 270.0, 1e-15);
}

TEST(ObjectHausdorffTest, FrozenInstance) {
  EXPECT_NEAR(object_hausdorff(frozen_gt(), frozen_seg(), HausdorffMode::kBoundary), 2.5135426419089799, 1e-12);
  EXPECT_NEAR(object_hausdorff(frozen_gt(), frozen_seg(), HausdorffMode::kFull), 2.5135426419089799, 1e-12);
}

TEST(AriTest, FrozenInstance) {
  const auto t = overlap_table(frozen_gt(), frozen_seg());
  EXPECT_NEAR(adjusted_rand(t, AriBackground::kInclude), 0.54396496394457661, 1e-12);
  EXPECT_NEAR(adjusted_rand(t, AriBackground::kExclude), 0.58715596330275233, 1e-12);
}

TEST(AriTest, TwoByTwoMatchesPairCounting) {
  const auto gt = LabelMap::from_grid(Grid{{1, 1}, {0, 0}});
  const auto seg = LabelMap::from_grid(Grid{{1, 0}, {1, 0}});
  // Pairs: 6. Same in gt: 2, same in seg: 2, same in both: 0. Expected 4/6.
  const double expected = 2.0 * 2.0 / 6.0;
  EXPECT_DOUBLE_EQ(adjusted_rand(overlap_table(gt, seg)), (0.0 - expected) / (2.0 - expected));
  EXPECT_DOUBLE_EQ(adjusted_rand(overlap_table(gt, seg)),
                   oracle::ari_pair_counting({1, 1, 0, 0}, {1, 0, 1, 0}, true));
}

TEST(AriTest, IdenticalPartitionsScoreOne) {
  const auto one = LabelMap::from_grid(Grid{{1, 1}, {1, 1}});
  EXPECT_DOUBLE_EQ(adjusted_rand(overlap_table(one, one)), 1.0);
  const auto blank = LabelMap::from_grid(Grid{{0, 0}, {0, 0}});
  EXPECT_DOUBLE_EQ(adjusted_rand(overlap_table(blank, blank)), 1.0);
  EXPECT_DOUBLE_EQ(adjusted_rand(overlap_table(frozen_gt(), frozen_gt())), 1.0);
}

TEST(AriTest, TooFewPixelsIsUndefined) {
  const auto m = LabelMap::from_grid(Grid{{1}});
  EXPECT_THROW(adjusted_rand(overlap_table(m, m)), UndefinedInputError);
  const auto gt = LabelMap::from_grid(Grid{{1, 0}});
  const auto seg = LabelMap::from_grid(Grid{{0, 1}});
  EXPECT_THROW(adjusted_rand(overlap_table(gt, seg), AriBackground::kExclude), UndefinedInputError);
  EXPECT_FALSE(metrics_of(gt, seg, {.ari_background = AriBackground::kExclude}).ari.has_value());
}

TEST(HausdorffTest, BoundaryVersusFull) {
  // Filled 5x5 square against its centre pixel.
  std::vector<Pixel> square;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) square.push_back({r + 10, c + 10});
  }
  const std::vector<Pixel> centre{{12, 12}};
  EXPECT_DOUBLE_EQ(hausdorff(square, centre, HausdorffMode::kFull), std::sqrt(8.0));
  EXPECT_DOUBLE_EQ(hausdorff(square, centre, HausdorffMode::kBoundary), std::sqrt(8.0));
  // Two concentric squares: the full-set distance sees the inner region.
  std::vector<Pixel> ring;
  for (const auto& p : square) {
    if (p.row == 10 || p.row == 14 || p.col == 10 || p.col == 14) ring.push_back(p);
  }
  EXPECT_DOUBLE_EQ(hausdorff(square, ring, HausdorffMode::kBoundary), 0.0);
  EXPECT_DOUBLE_EQ(hausdorff(square, ring, HausdorffMode::kFull), 2.0);
}

TEST(ObjectLevelTest, BothEmptyIsPerfect) {
  const auto blank = LabelMap::from_grid(Grid{{0, 0}, {0, 0}});
  const auto m = metrics_of(blank, blank);
  EXPECT_DOUBLE_EQ(m.dice_obj, 1.0);
  EXPECT_DOUBLE_EQ(m.hausdorff_obj, 0.0);
  EXPECT_DOUBLE_EQ(m.f1.f1, 1.0);
}

TEST(ObjectLevelTest, NothingSegmentedScoresDiagonal) {
  const auto gt = LabelMap::from_grid(Grid{{0, 0, 0, 0}, {0, 1, 1, 0}, {0, 0, 0, 0}});
  const auto blank = LabelMap::from_grid(Grid{{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  const auto m = metrics_of(gt, blank);
  EXPECT_DOUBLE_EQ(m.dice_obj, 0.0);
  // The lone ground-truth term is the 4x3 diagonal; the segmented sum is empty.
  EXPECT_DOUBLE_EQ(m.hausdorff_obj, 0.5 * 5.0);
  EXPECT_EQ(m.counts, (DetectionCounts{0, 0, 1}));
}

TEST(ObjectLevelTest, UnmatchedObjectUsesNearestOpposite) {
  // Segmented object 2 overlaps nothing; its nearest ground-truth object is 3
  // columns away.
  const auto gt = LabelMap::from_grid(Grid{{1, 0, 0, 0, 0}});
  const auto seg = LabelMap::from_grid(Grid{{1, 0, 0, 2, 0}});
  const auto a = analyze_image(gt, seg);
  ASSERT_EQ(a.hausdorff_seg.size(), 2u);
  EXPECT_DOUBLE_EQ(a.hausdorff_seg[0].value, 0.0);
  EXPECT_DOUBLE_EQ(a.hausdorff_seg[1].value, 3.0);
  EXPECT_DOUBLE_EQ(image_metrics(a).hausdorff_obj, 0.5 * (0.0 + 0.5 * 3.0));
  EXPECT_DOUBLE_EQ(image_metrics(a).dice_obj, 0.5 * (1.0 + 0.5));
}

TEST(ObjectLevelTest, SplitComponentsSeparatesDisconnectedLabel) {
  const auto gt = LabelMap::from_grid(Grid{{1, 1, 0, 2, 2}});
  const auto seg = LabelMap::from_grid(Grid{{7, 7, 0, 7, 7}});
  EXPECT_EQ(metrics_of(gt, seg).counts, (DetectionCounts{1, 0, 1}));
  EvalConfig split;
  split.split_components = true;
  EXPECT_EQ(metrics_of(gt, seg, split).counts, (DetectionCounts{2, 0, 0}));
  EXPECT_DOUBLE_EQ(metrics_of(gt, seg, split).dice_obj, 1.0);
}

TEST(ObjectLevelTest, ShapeMismatchNamesImage) {
  std::vector<ImagePair> pairs{{"ok", frozen_gt(), frozen_seg()},
                               {"bad", LabelMap::from_grid(Grid{{1}}), LabelMap::from_grid(Grid{{1, 1}})}};
  try {
    evaluate(pairs);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
  }
  EXPECT_THROW(evaluate(pairs, {.jobs = 0}), ValueError);
}

TEST(PoolingTest, ObjectWeightsAreGlobal) {
  // One image with a large perfect object, one with a small missed object.
  Grid big(6, std::vector<int>(6, 1));
  const auto gt_a = LabelMap::from_grid(big);
  const auto gt_b = LabelMap::from_grid(Grid{{1, 1, 0, 0}});
  const auto seg_b = LabelMap::from_grid(Grid{{0, 0, 0, 0}});
  std::vector<ImagePair> pairs{{"a", gt_a, gt_a}, {"b", gt_b, seg_b}};
  const auto r = evaluate(pairs);
  // Ground-truth side: (36 * 1 + 2 * 0) / 38; segmentation side: 36/36.
  EXPECT_NEAR(r.pooled.dice_obj, 0.5 * (36.0 / 38.0 + 1.0), 1e-15);
  EXPECT_EQ(r.pooled.counts, (DetectionCounts{1, 0, 1}));
  EXPECT_DOUBLE_EQ(r.per_image[0].dice_obj, 1.0);
  EXPECT_DOUBLE_EQ(r.per_image[1].dice_obj, 0.0);
  EXPECT_EQ(r.pooled.id, "pooled");
}

TEST(PoolingTest, JobsDoNotChangeResults) {
  std::mt19937_64 rng(11);
  std::vector<ImagePair> pairs;
  for (int k = 0; k < 12; ++k) {
    const auto im = oracle::random_pair(rng, 8, 40, 5);
    pairs.push_back({std::to_string(k), to_label_map(im.width, im.height, im.gt),
                     to_label_map(im.width, im.height, im.seg)});
  }
  const auto serial = evaluate(pairs, {.jobs = 1});
  const auto parallel = evaluate(pairs, {.jobs = 5});
  ASSERT_EQ(serial.per_image.size(), parallel.per_image.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    EXPECT_EQ(serial.per_image[k].dice_obj, parallel.per_image[k].dice_obj);
    EXPECT_EQ(serial.per_image[k].hausdorff_obj, parallel.per_image[k].hausdorff_obj);
  }
  EXPECT_EQ(serial.pooled.dice_obj, parallel.pooled.dice_obj);
  EXPECT_EQ(serial.pooled.hausdorff_obj, parallel.pooled.hausdorff_obj);
  EXPECT_EQ(serial.pooled.ari, parallel.pooled.ari);
}

TEST(PoolingTest, ImageOrderDoesNotChangePooledValues) {
  std::mt19937_64 rng(5);
  std::vector<ImagePair> pairs;
  for (int k = 0; k < 6; ++k) {
    const auto im = oracle::random_pair(rng, 8, 30, 4);
    pairs.push_back({std::to_string(k), to_label_map(im.width, im.height, im.gt),
                     to_label_map(im.width, im.height, im.seg)});
  }
  const auto forward = evaluate(pairs).pooled;
  std::reverse(pairs.begin(), pairs.end());
  const auto backward = evaluate(pairs).pooled;
  EXPECT_EQ(forward.dice_obj, backward.dice_obj);
  EXPECT_EQ(forward.hausdorff_obj, backward.hausdorff_obj);
  EXPECT_EQ(forward.ari, backward.ari);
  EXPECT_EQ(forward.counts, backward.counts);
}

TEST(PropertyTest, BoundsHoldOnRandomPairs) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 60; ++k) {
    const auto im = oracle::random_pair(rng, 4, 32, 5);
    const auto m = metrics_of(to_label_map(im.width, im.height, im.gt), to_label_map(im.width, im.height, im.seg));
    EXPECT_GE(m.f1.f1, 0.0);
    EXPECT_LE(m.f1.f1, 1.0);
    EXPECT_GE(m.dice_obj, 0.0);
    EXPECT_LE(m.dice_obj, 1.0);
    EXPECT_GE(m.hausdorff_obj, 0.0);
    EXPECT_LE(m.hausdorff_obj, std::hypot(im.width, im.height));
    if (m.ari) EXPECT_LE(*m.ari, 1.0 + 1e-12);
    EXPECT_EQ(m.counts.tp + m.counts.fn, m.n_gt);
    EXPECT_EQ(m.counts.tp + m.counts.fp, m.n_seg);
  }
}

TEST(PropertyTest, LabelPermutationIsExact) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 40; ++k) {
    const auto im = oracle::random_pair(rng, 4, 32, 5);
    const auto gt = to_label_map(im.width, im.height, im.gt);
    const auto seg = to_label_map(im.width, im.height, im.seg);
    auto scramble = [](Label l) { return l == 0 ? 0 : 1000 - 7 * l; };
    const auto a = metrics_of(gt, seg);
    const auto b = metrics_of(remapped(gt, scramble), remapped(seg, scramble));
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.dice_obj, b.dice_obj);
    EXPECT_EQ(a.hausdorff_obj, b.hausdorff_obj);
    EXPECT_EQ(a.ari, b.ari);
  }
}

TEST(PropertyTest, ErosionLowersObjectDice) {
  SynthSpec spec;
  spec.glands = 3;
  spec.seed = 3;
  const auto truth = synth_glands(spec).truth;
  double previous = object_dice(truth, truth);
  EXPECT_DOUBLE_EQ(previous, 1.0);
  for (int r = 1; r <= 4; ++r) {
    const double d = object_dice(truth, erode_labels(truth, r));
    EXPECT_LT(d, previous);
    previous = d;
  }
}

TEST(PropertyTest, ShiftRaisesObjectHausdorff) {
  SynthSpec spec;
  spec.glands = 2;
  spec.seed = 8;
  const auto truth = synth_glands(spec).truth;
  double previous = 0.0;
  for (int s = 1; s <= 5; ++s) {
    const double h = object_hausdorff(truth, shift_map(truth, 0, s));
    EXPECT_GT(h, previous);
    previous = h;
  }
}

TEST(CrossCheckTest, SmallRandomBatchesAgreeWithBruteForce) {
  EXPECT_TRUE(crosscheck_hausdorff(30, 99, 24).ok());
  EXPECT_TRUE(crosscheck_ari(30, 99, 16).ok());
  EXPECT_TRUE(crosscheck_object_level(20, 99, 24).ok());
}

}  // namespace
}  // namespace glas
