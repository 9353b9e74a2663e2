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
#ifndef GLAS_CROSSCHECK_HPP_
#define GLAS_CROSSCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "glas/label_map.hpp"
#include "glas/metrics.hpp"
#include "glas/oracle.hpp"

namespace glas {

// Outcome of running a fast implementation against its brute-force oracle on
// randomly generated instances.
struct CrossCheckResult {
  std::string suite;
  int cases = 0;
  int comparisons = 0;
  int mismatches = 0;
  double max_abs_diff = 0.0;
  double tolerance = 1e-9;
  std::string first_failure;

  bool ok() const { return mismatches == 0 && comparisons > 0; }

  void record_agreement(bool agree, const std::string& what) {
    ++comparisons;
    if (!agree) {
      if (mismatches == 0) first_failure = what;
      ++mismatches;
    }
  }

  void record(double fast, double brute, const std::string& what) {
    ++comparisons;
    const double diff = std::abs(fast - brute);
    max_abs_diff = std::max(max_abs_diff, diff);
    if (!(diff <= tolerance)) {
      if (mismatches == 0) {
        std::ostringstream ss;
        ss.precision(17);
        ss << what << ": fast=" << fast << " brute=" << brute;
        first_failure = ss.str();
      }
      ++mismatches;
    }
  }
};

inline LabelMap to_label_map(int width, int height, const std::vector<std::uint32_t>& v) {
  return LabelMap(width, height, std::vector<Label>(v.begin(), v.end()));
}

// Distance-transform Hausdorff against the all-pairs scan, boundary and full
// modes, on pairs of random blobs in grids up to max_side x max_side.
inline CrossCheckResult crosscheck_hausdorff(int count, std::uint64_t seed, int max_side = 64) {
  CrossCheckResult res;
  res.suite = "hausdorff";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> side(2, max_side);
  for (int k = 0; k < count; ++k) {
    const int w = side(rng);
    const int h = side(rng);
    const auto a = oracle::random_blob(rng, w, h);
    const auto b = oracle::random_blob(rng, w, h);
    std::vector<Pixel> pa, pb;
    for (const auto& [r, c] : a) pa.push_back({r, c});
    for (const auto& [r, c] : b) pb.push_back({r, c});
    const std::string tag = "case " + std::to_string(k) + " (" + std::to_string(w) + "x" + std::to_string(h) + ")";
    res.record(hausdorff(pa, pb, HausdorffMode::kFull, Extent{w, h}), oracle::hausdorff_brute(a, b, false, w, h),
               tag + " full");
    res.record(hausdorff(pa, pb, HausdorffMode::kBoundary, Extent{w, h}),
               oracle::hausdorff_brute(a, b, true, w, h), tag + " boundary");
    ++res.cases;
  }
  return res;
}

// Contingency-based adjusted Rand index against O(n^2) pair counting, under
// both background policies.
inline CrossCheckResult crosscheck_ari(int count, std::uint64_t seed, int max_side = 32) {
  CrossCheckResult res;
  res.suite = "ari";
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    const auto im = oracle::random_pair(rng, 2, max_side, 6);
    const LabelMap gt = to_label_map(im.width, im.height, im.gt);
    const LabelMap seg = to_label_map(im.width, im.height, im.seg);
    const OverlapTable table = overlap_table(gt, seg);
    const std::string tag = "case " + std::to_string(k);
    res.record(adjusted_rand(table, AriBackground::kInclude), oracle::ari_pair_counting(im.gt, im.seg, true),
               tag + " include");
    const double brute = oracle::ari_pair_counting(im.gt, im.seg, false);
    const AriTally excl = ari_tally(table, AriBackground::kExclude);
    if (excl.covered >= 2) {
      res.record(adjusted_rand(excl), brute, tag + " exclude");
    } else {
      // Both sides must agree that the index is undefined.
      bool fast_undefined = false;
      try {
        adjusted_rand(excl);
      } catch (const UndefinedInputError&) {
        fast_undefined = true;
      }
      res.record_agreement(fast_undefined && std::isnan(brute), tag + " exclude (undefined)");
    }
    ++res.cases;
  }
  return res;
}

// Pooled object-level Dice and Hausdorff against a straight-line expansion
// over 1-3 random image pairs per case. Hausdorff mode alternates per case.
inline CrossCheckResult crosscheck_object_level(int count, std::uint64_t seed, int max_side = 40) {
  CrossCheckResult res;
  res.suite = "objdice";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_images(1, 3);
  for (int k = 0; k < count; ++k) {
    std::vector<oracle::RawImage> raw;
    std::vector<ImagePair> pairs;
    const int n = n_images(rng);
    for (int i = 0; i < n; ++i) {
      raw.push_back(oracle::random_pair(rng, 4, max_side, 5));
      const auto& im = raw.back();
      pairs.push_back({"img" + std::to_string(i), to_label_map(im.width, im.height, im.gt),
                       to_label_map(im.width, im.height, im.seg)});
    }
    const bool boundary = k % 2 == 0;
    EvalConfig config;
    config.hausdorff_mode = boundary ? HausdorffMode::kBoundary : HausdorffMode::kFull;
    const ImageMetrics pooled = evaluate(pairs, config).pooled;
    const oracle::ObjectLevel expected = oracle::object_level_expansion(raw, boundary);
    const std::string tag = "case " + std::to_string(k) + (boundary ? " boundary" : " full");
    res.record(pooled.dice_obj, expected.dice_obj, tag + " dice_obj");
    res.record(pooled.hausdorff_obj, expected.hausdorff_obj, tag + " hausdorff_obj");
    ++res.cases;
  }
  return res;
}

}  // namespace glas

#endif  // GLAS_CROSSCHECK_HPP_
