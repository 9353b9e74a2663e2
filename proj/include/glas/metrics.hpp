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
#ifndef GLAS_METRICS_HPP_
#define GLAS_METRICS_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "glas/distance.hpp"
#include "glas/errors.hpp"
#include "glas/label_map.hpp"
#include "glas/matching.hpp"

namespace glas {

// ---------------------------------------------------------------------------
// Detection

struct DetectionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  DetectionCounts& operator+=(const DetectionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const DetectionCounts&, const DetectionCounts&) = default;
};

// A segmented object is a true positive when it covers at least `threshold`
// of the area of its maximal-overlap ground-truth object and that object has
// not already been claimed. Candidates are visited by descending overlap, then
// ascending label, so every ground-truth object yields at most one TP.
inline DetectionCounts detection_counts(const OverlapTable& table, const Correspondence& corr,
                                        double threshold = 0.5) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ValueError("true-positive threshold must lie in [0, 1]");
  }
  const std::size_t n_seg = table.n_seg();
  std::vector<std::size_t> overlap(n_seg, 0);
  for (std::size_t j = 0; j < n_seg; ++j) {
    if (corr.g_star[j]) overlap[j] = table.overlap(*corr.g_star[j], j);
  }
  std::vector<std::size_t> order(n_seg);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return overlap[a] > overlap[b]; });

  DetectionCounts counts;
  std::vector<bool> claimed(table.n_gt(), false);
  for (std::size_t j : order) {
    const auto& g = corr.g_star[j];
    const bool hit = g && !claimed[*g] &&
                     static_cast<double>(overlap[j]) >= threshold * static_cast<double>(table.gt_areas[*g]);
    if (hit) {
      claimed[*g] = true;
      ++counts.tp;
    } else {
      ++counts.fp;
    }
  }
  counts.fn = table.n_gt() - counts.tp;
  return counts;
}

struct F1Score {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// F1 = 2TP / (2TP + FP + FN), the same value as the harmonic mean of precision
// and recall. Nothing to detect and nothing detected scores 1; an undefined
// precision or recall ratio otherwise reads as 0.
inline F1Score f1(const DetectionCounts& c) {
  if (c.tp == 0 && c.fp == 0 && c.fn == 0) return {1.0, 1.0, 1.0};
  F1Score s;
  const auto tp = static_cast<double>(c.tp);
  s.precision = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
  s.recall = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
  s.f1 = 2.0 * tp / static_cast<double>(2 * c.tp + c.fp + c.fn);
  return s;
}

// ---------------------------------------------------------------------------
// Dice

inline double dice(std::size_t intersection, std::size_t size_a, std::size_t size_b) {
  if (size_a + size_b == 0) return 1.0;
  return 2.0 * static_cast<double>(intersection) / static_cast<double>(size_a + size_b);
}

inline double dice(std::span<const Pixel> a, std::span<const Pixel> b) {
  std::vector<Pixel> sa(a.begin(), a.end());
  std::vector<Pixel> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  std::size_t common = 0;
  auto ia = sa.begin();
  auto ib = sb.begin();
  while (ia != sa.end() && ib != sb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return dice(common, sa.size(), sb.size());
}

// ---------------------------------------------------------------------------
// Adjusted Rand index

enum class AriBackground {
  kInclude,  // background is one more cluster in each partition; all pixels count
  kExclude,  // only pixels that are foreground in both maps count
};

inline const char* to_string(AriBackground policy) {
  return policy == AriBackground::kInclude ? "include" : "exclude";
}

inline std::uint64_t pairs_of(std::uint64_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

// Pair-count sufficient statistics of one contingency. Background clusters
// are kept apart so that tallies from disjoint images can be merged with one
// shared background cluster.
struct AriTally {
  std::uint64_t object_cell_pairs = 0;  // sum of C(n_ij, 2) over cells not bg x bg
  std::uint64_t object_row_pairs = 0;   // sum of C(n_i., 2) over ground-truth objects
  std::uint64_t object_col_pairs = 0;   // sum of C(n_.j, 2) over segmented objects
  std::uint64_t bg_both = 0;            // pixels background in both maps
  std::uint64_t bg_gt = 0;              // pixels background in ground truth
  std::uint64_t bg_seg = 0;             // pixels background in segmentation
  std::uint64_t covered = 0;            // n

  AriTally& operator+=(const AriTally& o) {
    object_cell_pairs += o.object_cell_pairs;
    object_row_pairs += o.object_row_pairs;
    object_col_pairs += o.object_col_pairs;
    bg_both += o.bg_both;
    bg_gt += o.bg_gt;
    bg_seg += o.bg_seg;
    covered += o.covered;
    return *this;
  }
};

inline AriTally ari_tally(const OverlapTable& t, AriBackground policy) {
  AriTally tally;
  if (policy == AriBackground::kExclude) {
    std::vector<std::uint64_t> rows(t.n_gt(), 0);
    std::vector<std::uint64_t> cols(t.n_seg(), 0);
    for (const auto& e : t.entries) {
      tally.object_cell_pairs += pairs_of(e.count);
      rows[e.gt] += e.count;
      cols[e.seg] += e.count;
      tally.covered += e.count;
    }
    for (auto r : rows) tally.object_row_pairs += pairs_of(r);
    for (auto c : cols) tally.object_col_pairs += pairs_of(c);
    return tally;
  }
  std::vector<std::uint64_t> gt_matched(t.n_gt(), 0);
  std::vector<std::uint64_t> seg_matched(t.n_seg(), 0);
  std::uint64_t both = 0;
  for (const auto& e : t.entries) {
    tally.object_cell_pairs += pairs_of(e.count);
    gt_matched[e.gt] += e.count;
    seg_matched[e.seg] += e.count;
    both += e.count;
  }
  std::uint64_t gt_fg = 0;
  for (std::size_t i = 0; i < t.n_gt(); ++i) {
    tally.object_cell_pairs += pairs_of(t.gt_areas[i] - gt_matched[i]);  // G_i x background
    tally.object_row_pairs += pairs_of(t.gt_areas[i]);
    gt_fg += t.gt_areas[i];
  }
  std::uint64_t seg_fg = 0;
  for (std::size_t j = 0; j < t.n_seg(); ++j) {
    tally.object_cell_pairs += pairs_of(t.seg_areas[j] - seg_matched[j]);  // background x S_j
    tally.object_col_pairs += pairs_of(t.seg_areas[j]);
    seg_fg += t.seg_areas[j];
  }
  tally.covered = t.total_pixels;
  tally.bg_gt = t.total_pixels - gt_fg;
  tally.bg_seg = t.total_pixels - seg_fg;
  tally.bg_both = t.total_pixels - (gt_fg + seg_fg - both);
  return tally;
}

inline double adjusted_rand(const AriTally& tally) {
  if (tally.covered < 2) {
    throw UndefinedInputError("adjusted Rand index needs at least 2 covered pixels, got " +
                              std::to_string(tally.covered));
  }
  const std::uint64_t index = tally.object_cell_pairs + pairs_of(tally.bg_both);
  const std::uint64_t rows = tally.object_row_pairs + pairs_of(tally.bg_gt);
  const std::uint64_t cols = tally.object_col_pairs + pairs_of(tally.bg_seg);
  const std::uint64_t all = pairs_of(tally.covered);
  // Both partitions all-singletons or both a single cluster: identical.
  if (rows == cols && (rows == 0 || rows == all)) return 1.0;
  const double expected = static_cast<double>(rows) * static_cast<double>(cols) / static_cast<double>(all);
  const double max_index = 0.5 * (static_cast<double>(rows) + static_cast<double>(cols));
  return (static_cast<double>(index) - expected) / (max_index - expected);
}

inline double adjusted_rand(const OverlapTable& table, AriBackground policy = AriBackground::kInclude) {
  return adjusted_rand(ari_tally(table, policy));
}

// ---------------------------------------------------------------------------
// Hausdorff

struct Extent {
  int width = 0;
  int height = 0;
};

namespace detail {

// Inner boundary of an arbitrary pixel set. With an extent, pixels on the
// image edge count as boundary; without one the plane is unbounded.
inline std::vector<Pixel> set_boundary(std::span<const Pixel> pixels, std::optional<Extent> extent) {
  const BoundingBox box = bounds_of(pixels);
  const int w = box.cols() + 2;
  const int h = box.rows() + 2;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
  auto cell = [&](int r, int c) -> std::uint8_t& {
    return mask[static_cast<std::size_t>(r - box.min_row + 1) * w + (c - box.min_col + 1)];
  };
  for (const Pixel& p : pixels) cell(p.row, p.col) = 1;
  std::vector<Pixel> out;
  for (int r = box.min_row; r <= box.max_row; ++r) {
    for (int c = box.min_col; c <= box.max_col; ++c) {
      if (!cell(r, c)) continue;
      bool edge = !cell(r - 1, c) || !cell(r + 1, c) || !cell(r, c - 1) || !cell(r, c + 1);
      if (extent) {
        edge = edge || r == 0 || c == 0 || r == extent->height - 1 || c == extent->width - 1;
      }
      if (edge) out.push_back({r, c});
    }
  }
  return out;
}

}  // namespace detail

// Symmetric Hausdorff distance between two pixel sets, Euclidean over pixel
// centres. Boundary mode reduces each set to its inner boundary first.
inline double hausdorff(std::span<const Pixel> a, std::span<const Pixel> b,
                        HausdorffMode mode = HausdorffMode::kBoundary,
                        std::optional<Extent> extent = std::nullopt) {
  if (a.empty() || b.empty()) {
    throw UndefinedInputError("Hausdorff distance is undefined for an empty pixel set");
  }
  if (mode == HausdorffMode::kFull) return hausdorff_distance(a, b);
  const auto ba = detail::set_boundary(a, extent);
  const auto bb = detail::set_boundary(b, extent);
  return hausdorff_distance(ba, bb);
}

// ---------------------------------------------------------------------------
// Per-image analysis and pooling

struct EvalConfig {
  double tp_threshold = 0.5;
  HausdorffMode hausdorff_mode = HausdorffMode::kBoundary;
  AriBackground ari_background = AriBackground::kInclude;
  bool split_components = false;
  Connectivity connectivity = Connectivity::kEight;
  unsigned jobs = 1;
};

// One area-weighted summand of an object-level index.
struct ObjectTerm {
  std::size_t area = 0;
  double value = 0.0;
};

struct ImageAnalysis {
  int width = 0;
  int height = 0;
  std::size_t n_gt = 0;
  std::size_t n_seg = 0;
  DetectionCounts counts;
  std::size_t gt_foreground = 0;
  std::size_t seg_foreground = 0;
  std::size_t foreground_overlap = 0;
  std::vector<ObjectTerm> dice_gt;
  std::vector<ObjectTerm> dice_seg;
  std::vector<ObjectTerm> hausdorff_gt;
  std::vector<ObjectTerm> hausdorff_seg;
  AriTally ari;
};

namespace detail {

// Order-independent weighted mean: every area * value term is formed on its
// own, the terms are added smallest first and the sum is divided once by the
// total area. The result depends only on the multiset of (area, value) pairs,
// and all-equal values come back exactly.
inline double weighted_sum(std::span<const std::span<const ObjectTerm>> groups) {
  std::uint64_t total_area = 0;
  for (auto g : groups) {
    for (const auto& t : g) total_area += t.area;
  }
  if (total_area == 0) return 0.0;
  std::vector<double> parts;
  for (auto g : groups) {
    for (const auto& t : g) {
      parts.push_back(static_cast<double>(t.area) * t.value);
    }
  }
  std::sort(parts.begin(), parts.end());
  double sum = 0.0;
  for (double p : parts) sum += p;
  return sum / static_cast<double>(total_area);
}

inline double object_level(std::span<const std::span<const ObjectTerm>> gt_groups,
                           std::span<const std::span<const ObjectTerm>> seg_groups, double empty_value) {
  bool any = false;
  for (auto g : gt_groups) any = any || !g.empty();
  for (auto g : seg_groups) any = any || !g.empty();
  if (!any) return empty_value;
  return 0.5 * (weighted_sum(gt_groups) + weighted_sum(seg_groups));
}

inline LabelMap canonical(const LabelMap& map, const EvalConfig& config) {
  return relabel_sequential(config.split_components ? split_components(map, config.connectivity) : map);
}

}  // namespace detail

// Everything the pooled and per-image metrics need from one image pair.
inline ImageAnalysis analyze_image(const LabelMap& gt_in, const LabelMap& seg_in, const EvalConfig& config = {}) {
  if (gt_in.width() != seg_in.width() || gt_in.height() != seg_in.height()) {
    throw ShapeError("dimension mismatch: ground truth is " + std::to_string(gt_in.width()) + "x" +
                     std::to_string(gt_in.height()) + ", segmentation is " +
                     std::to_string(seg_in.width()) + "x" + std::to_string(seg_in.height()));
  }
  const LabelMap gt = detail::canonical(gt_in, config);
  const LabelMap seg = detail::canonical(seg_in, config);
  const OverlapTable table = overlap_table(gt, seg);
  const Correspondence corr = maximal_overlap(table);

  ImageAnalysis out;
  out.width = gt.width();
  out.height = gt.height();
  out.n_gt = table.n_gt();
  out.n_seg = table.n_seg();
  out.counts = detection_counts(table, corr, config.tp_threshold);
  out.gt_foreground = table.gt_foreground();
  out.seg_foreground = table.seg_foreground();
  out.foreground_overlap = table.foreground_overlap();
  out.ari = ari_tally(table, config.ari_background);

  for (std::size_t i = 0; i < table.n_gt(); ++i) {
    const auto& s = corr.s_star[i];
    const double d = s ? dice(table.overlap(i, *s), table.gt_areas[i], table.seg_areas[*s]) : 0.0;
    out.dice_gt.push_back({table.gt_areas[i], d});
  }
  for (std::size_t j = 0; j < table.n_seg(); ++j) {
    const auto& g = corr.g_star[j];
    const double d = g ? dice(table.overlap(*g, j), table.gt_areas[*g], table.seg_areas[j]) : 0.0;
    out.dice_seg.push_back({table.seg_areas[j], d});
  }

  const auto gt_sets = object_point_sets(gt, config.hausdorff_mode);
  const auto seg_sets = object_point_sets(seg, config.hausdorff_mode);
  const double diagonal = std::sqrt(static_cast<double>(gt.width()) * gt.width() +
                                    static_cast<double>(gt.height()) * gt.height());
  std::map<std::pair<std::size_t, std::size_t>, double> cache;
  auto pair_distance = [&](std::size_t i, std::size_t j) {
    auto [it, inserted] = cache.try_emplace({i, j}, 0.0);
    if (inserted) it->second = hausdorff_distance(gt_sets[i], seg_sets[j]);
    return it->second;
  };
  for (std::size_t i = 0; i < table.n_gt(); ++i) {
    double d = diagonal;
    if (const auto& s = corr.s_star[i]) {
      d = pair_distance(i, *s);
    } else if (table.n_seg() > 0) {
      std::optional<std::size_t> best;
      for (std::size_t j = 0; j < table.n_seg(); ++j) {
        const double dj = pair_distance(i, j);
        if (!best || dj < d) {
          best = j;
          d = dj;
        }
      }
    }
    out.hausdorff_gt.push_back({table.gt_areas[i], d});
  }
  for (std::size_t j = 0; j < table.n_seg(); ++j) {
    double d = diagonal;
    if (const auto& g = corr.g_star[j]) {
      d = pair_distance(*g, j);
    } else if (table.n_gt() > 0) {
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < table.n_gt(); ++i) {
        const double di = pair_distance(i, j);
        if (!best || di < d) {
          best = i;
          d = di;
        }
      }
    }
    out.hausdorff_seg.push_back({table.seg_areas[j], d});
  }
  return out;
}

struct ImageMetrics {
  std::string id;
  std::size_t n_gt = 0;
  std::size_t n_seg = 0;
  DetectionCounts counts;
  F1Score f1;
  double dice_pixel = 1.0;
  double dice_obj = 1.0;
  double hausdorff_obj = 0.0;
  std::optional<double> ari;  // nullopt when fewer than 2 pixels are covered
};

// Pools any number of analysed images: counts add up, object-level indices
// weight every object of every image against the global object areas, and
// the ARI treats the images as one mosaic sharing a single background cluster.
inline ImageMetrics pool(std::span<const ImageAnalysis> images) {
  ImageMetrics m;
  std::vector<std::span<const ObjectTerm>> dg, ds, hg, hs;
  AriTally tally;
  std::size_t gt_fg = 0, seg_fg = 0, both_fg = 0;
  for (const auto& a : images) {
    m.n_gt += a.n_gt;
    m.n_seg += a.n_seg;
    m.counts += a.counts;
    gt_fg += a.gt_foreground;
    seg_fg += a.seg_foreground;
    both_fg += a.foreground_overlap;
    dg.emplace_back(a.dice_gt);
    ds.emplace_back(a.dice_seg);
    hg.emplace_back(a.hausdorff_gt);
    hs.emplace_back(a.hausdorff_seg);
    tally += a.ari;
  }
  m.f1 = f1(m.counts);
  m.dice_pixel = dice(both_fg, gt_fg, seg_fg);
  m.dice_obj = detail::object_level(dg, ds, 1.0);
  m.hausdorff_obj = detail::object_level(hg, hs, 0.0);
  if (tally.covered >= 2) m.ari = adjusted_rand(tally);
  return m;
}

inline ImageMetrics image_metrics(const ImageAnalysis& a) { return pool(std::span(&a, 1)); }

struct ImagePair {
  std::string id;
  LabelMap gt;
  LabelMap seg;
};

inline double object_dice(const LabelMap& gt, const LabelMap& seg) {
  return image_metrics(analyze_image(gt, seg)).dice_obj;
}

inline double object_hausdorff(const LabelMap& gt, const LabelMap& seg,
                               HausdorffMode mode = HausdorffMode::kBoundary) {
  EvalConfig config;
  config.hausdorff_mode = mode;
  return image_metrics(analyze_image(gt, seg, config)).hausdorff_obj;
}

struct MetricReport {
  EvalConfig config;
  std::vector<ImageMetrics> per_image;
  ImageMetrics pooled;
};

inline std::vector<ImageAnalysis> analyze_all(std::span<const ImagePair> pairs, const EvalConfig& config) {
  std::vector<ImageAnalysis> results(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  auto work = [&](std::size_t k) {
    try {
      results[k] = analyze_image(pairs[k].gt, pairs[k].seg, config);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, config.jobs), pairs.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < pairs.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < pairs.size(); k = next++) work(k);
      });
    }
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (errors[k]) rethrow_with_context(errors[k], "image '" + pairs[k].id + "': ");
  }
  return results;
}

inline MetricReport evaluate(std::span<const ImagePair> pairs, const EvalConfig& config = {}) {
  if (config.jobs == 0) throw ValueError("jobs must be at least 1");
  MetricReport report;
  report.config = config;
  const auto analyses = analyze_all(pairs, config);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    ImageMetrics m = image_metrics(analyses[k]);
    m.id = pairs[k].id;
    report.per_image.push_back(std::move(m));
  }
  report.pooled = pool(analyses);
  report.pooled.id = "pooled";
  return report;
}

// Dataset-pooled object-level indices over several image pairs.
inline double object_dice(std::span<const ImagePair> pairs, const EvalConfig& config = {}) {
  return pool(analyze_all(pairs, config)).dice_obj;
}

inline double object_hausdorff(std::span<const ImagePair> pairs, const EvalConfig& config = {}) {
  return pool(analyze_all(pairs, config)).hausdorff_obj;
}

}  // namespace glas

#endif  // GLAS_METRICS_HPP_
