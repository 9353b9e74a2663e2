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
#ifndef GLAS_MATCHING_HPP_
#define GLAS_MATCHING_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "glas/distance.hpp"
#include "glas/errors.hpp"
#include "glas/label_map.hpp"

namespace glas {

// One non-zero cell of the contingency between ground-truth object `gt` and
// segmented object `seg`. Both are indices into the respective objects().
struct OverlapEntry {
  std::size_t gt = 0;
  std::size_t seg = 0;
  std::size_t count = 0;
  friend bool operator==(const OverlapEntry&, const OverlapEntry&) = default;
};

// Sparse pixel contingency between the objects of two label maps of the same
// size. Background is not a row or column; its counts follow from the
// marginals and total_pixels.
struct OverlapTable {
  std::vector<Label> gt_labels;
  std::vector<Label> seg_labels;
  std::vector<std::size_t> gt_areas;
  std::vector<std::size_t> seg_areas;
  std::vector<OverlapEntry> entries;  // sorted by (gt, seg), count >= 1
  std::size_t total_pixels = 0;

  std::size_t n_gt() const { return gt_labels.size(); }
  std::size_t n_seg() const { return seg_labels.size(); }

  std::size_t overlap(std::size_t gt, std::size_t seg) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), OverlapEntry{gt, seg, 0},
                               [](const OverlapEntry& a, const OverlapEntry& b) {
                                 return a.gt != b.gt ? a.gt < b.gt : a.seg < b.seg;
                               });
    return (it != entries.end() && it->gt == gt && it->seg == seg) ? it->count : 0;
  }

  std::size_t gt_foreground() const {
    std::size_t s = 0;
    for (auto a : gt_areas) s += a;
    return s;
  }
  std::size_t seg_foreground() const {
    std::size_t s = 0;
    for (auto a : seg_areas) s += a;
    return s;
  }
  std::size_t foreground_overlap() const {
    std::size_t s = 0;
    for (const auto& e : entries) s += e.count;
    return s;
  }
};

namespace detail {

inline std::vector<std::int32_t> dense_object_index(const LabelMap& map) {
  std::unordered_map<Label, std::int32_t> slot;
  for (std::size_t i = 0; i < map.object_count(); ++i) {
    slot.emplace(map.objects()[i].label, static_cast<std::int32_t>(i));
  }
  std::vector<std::int32_t> out(map.pixel_count(), -1);
  const auto labels = map.labels();
  Label cached_label = kBackground;
  std::int32_t cached_slot = -1;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] == kBackground) continue;
    if (labels[p] != cached_label) {
      cached_label = labels[p];
      cached_slot = slot.at(cached_label);
    }
    out[p] = cached_slot;
  }
  return out;
}

}  // namespace detail

inline OverlapTable overlap_table(const LabelMap& gt, const LabelMap& seg) {
  if (gt.width() != seg.width() || gt.height() != seg.height()) {
    throw ShapeError("dimension mismatch: ground truth is " + std::to_string(gt.width()) + "x" +
                     std::to_string(gt.height()) + ", segmentation is " +
                     std::to_string(seg.width()) + "x" + std::to_string(seg.height()));
  }
  OverlapTable table;
  table.total_pixels = gt.pixel_count();
  for (const auto& o : gt.objects()) {
    table.gt_labels.push_back(o.label);
    table.gt_areas.push_back(o.area);
  }
  for (const auto& o : seg.objects()) {
    table.seg_labels.push_back(o.label);
    table.seg_areas.push_back(o.area);
  }
  const auto gi = detail::dense_object_index(gt);
  const auto si = detail::dense_object_index(seg);
  const std::uint64_t stride = seg.object_count();
  std::unordered_map<std::uint64_t, std::size_t> cells;
  for (std::size_t p = 0; p < gi.size(); ++p) {
    if (gi[p] < 0 || si[p] < 0) continue;
    ++cells[static_cast<std::uint64_t>(gi[p]) * stride + static_cast<std::uint64_t>(si[p])];
  }
  table.entries.reserve(cells.size());
  for (const auto& [key, count] : cells) {
    table.entries.push_back({static_cast<std::size_t>(key / stride),
                             static_cast<std::size_t>(key % stride), count});
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const OverlapEntry& a, const OverlapEntry& b) {
              return a.gt != b.gt ? a.gt < b.gt : a.seg < b.seg;
            });
  return table;
}

// Maximal-overlap partner of every object; nullopt stands for the empty
// object. Values are indices into the opposite side of the OverlapTable.
struct Correspondence {
  std::vector<std::optional<std::size_t>> g_star;  // per segmented object
  std::vector<std::optional<std::size_t>> s_star;  // per ground-truth object
};

// Independent argmax per object. Ties go to the partner with the lowest
// label, which is the lowest index because objects() is sorted by label.
inline Correspondence maximal_overlap(const OverlapTable& table) {
  Correspondence corr;
  corr.g_star.assign(table.n_seg(), std::nullopt);
  corr.s_star.assign(table.n_gt(), std::nullopt);
  std::vector<std::size_t> best_for_seg(table.n_seg(), 0);
  std::vector<std::size_t> best_for_gt(table.n_gt(), 0);
  // entries are sorted by (gt, seg), so within a row seg indices ascend and
  // across rows gt indices ascend: strict '>' keeps the lowest index on ties.
  for (const auto& e : table.entries) {
    if (e.count > best_for_seg[e.seg]) {
      best_for_seg[e.seg] = e.count;
      corr.g_star[e.seg] = e.gt;
    }
    if (e.count > best_for_gt[e.gt]) {
      best_for_gt[e.gt] = e.count;
      corr.s_star[e.gt] = e.seg;
    }
  }
  return corr;
}

struct FallbackMatch {
  std::size_t index = 0;  // into the candidate list
  double distance = 0.0;
};

// Candidate nearest to `object` in Hausdorff distance, lowest index on ties.
// nullopt when the image has no candidates at all.
inline std::optional<FallbackMatch> hausdorff_fallback(
    std::span<const Pixel> object, std::span<const std::vector<Pixel>> candidates) {
  std::optional<FallbackMatch> best;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k].empty()) continue;
    const double d = hausdorff_distance(object, candidates[k]);
    if (!best || d < best->distance) best = FallbackMatch{k, d};
  }
  return best;
}

// Label-map level convenience: nearest object of `candidates` to object
// `label` of `own`, returned as a candidate label.
struct FallbackLabel {
  Label label = 0;
  double distance = 0.0;
};

inline std::optional<FallbackLabel> hausdorff_fallback(const LabelMap& own, Label label,
                                                       const LabelMap& candidates,
                                                       HausdorffMode mode = HausdorffMode::kBoundary) {
  if (own.width() != candidates.width() || own.height() != candidates.height()) {
    throw ShapeError("dimension mismatch between object map and candidate map");
  }
  const std::size_t idx = *own.index_of(own.object(label).label);
  const auto own_sets = object_point_sets(own, mode);
  const auto cand_sets = object_point_sets(candidates, mode);
  auto match = hausdorff_fallback(own_sets[idx], cand_sets);
  if (!match) return std::nullopt;
  return FallbackLabel{candidates.objects()[match->index].label, match->distance};
}

}  // namespace glas

#endif  // GLAS_MATCHING_HPP_
