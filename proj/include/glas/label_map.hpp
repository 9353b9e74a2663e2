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
#ifndef GLAS_LABEL_MAP_HPP_
#define GLAS_LABEL_MAP_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "glas/errors.hpp"

namespace glas {

// Object id stored in a label image. 0 is background.
using Label = std::uint32_t;

inline constexpr Label kBackground = 0;

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// Inclusive bounds.
struct BoundingBox {
  int min_row = 0;
  int min_col = 0;
  int max_row = -1;
  int max_col = -1;

  int rows() const { return max_row - min_row + 1; }
  int cols() const { return max_col - min_col + 1; }

  void include(int row, int col) {
    if (max_row < min_row) {
      min_row = max_row = row;
      min_col = max_col = col;
      return;
    }
    min_row = std::min(min_row, row);
    max_row = std::max(max_row, row);
    min_col = std::min(min_col, col);
    max_col = std::max(max_col, col);
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline BoundingBox united(const BoundingBox& a, const BoundingBox& b) {
  BoundingBox out = a;
  out.include(b.min_row, b.min_col);
  out.include(b.max_row, b.max_col);
  return out;
}

struct ObjectRecord {
  Label label = 0;
  std::size_t area = 0;
  BoundingBox bbox;
};

enum class Connectivity { kFour = 4, kEight = 8 };

inline Connectivity connectivity_from_int(int value) {
  if (value == 4) return Connectivity::kFour;
  if (value == 8) return Connectivity::kEight;
  throw ValueError("connectivity must be 4 or 8, got " + std::to_string(value));
}

// Immutable 2D grid of object labels with its object inventory.
//
// The inventory lists every positive label present in the grid exactly once,
// sorted by label. A label may cover pixels that are not connected to each
// other; call split_components() to force one object per connected region.
class LabelMap {
 public:
  LabelMap() = default;

  LabelMap(int width, int height, std::vector<Label> labels)
      : width_(width), height_(height), labels_(std::move(labels)) {
    if (width < 0 || height < 0) {
      throw ShapeError("label map dimensions must be non-negative");
    }
    if (labels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw ShapeError("label buffer has " + std::to_string(labels_.size()) +
                       " entries, expected " + std::to_string(width) + "x" +
                       std::to_string(height));
    }
    build_inventory();
  }

  // Row-major nested grid. Rows must all have the same length and values must
  // fit a Label.
  template <typename T>
  static LabelMap from_grid(const std::vector<std::vector<T>>& grid) {
    const int height = static_cast<int>(grid.size());
    const int width = height == 0 ? 0 : static_cast<int>(grid.front().size());
    std::vector<Label> labels;
    labels.reserve(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r) {
      if (static_cast<int>(grid[r].size()) != width) {
        throw ShapeError("ragged grid: row " + std::to_string(r) + " has " +
                         std::to_string(grid[r].size()) + " values, expected " +
                         std::to_string(width));
      }
      for (const T& v : grid[r]) {
        if constexpr (std::numeric_limits<T>::is_signed) {
          if (v < 0) {
            throw ValueError("negative label value at row " + std::to_string(r));
          }
        }
        if (static_cast<std::uintmax_t>(v) > std::numeric_limits<Label>::max()) {
          throw ValueError("label value overflows 32 bits at row " + std::to_string(r));
        }
        labels.push_back(static_cast<Label>(v));
      }
    }
    return LabelMap(width, height, std::move(labels));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return labels_.size(); }

  Label at(int row, int col) const {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  bool in_bounds(int row, int col) const {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }
  std::span<const Label> labels() const { return labels_; }

  const std::vector<ObjectRecord>& objects() const { return objects_; }
  std::size_t object_count() const { return objects_.size(); }

  // Position of `label` in objects(), if present.
  std::optional<std::size_t> index_of(Label label) const {
    auto it = std::lower_bound(objects_.begin(), objects_.end(), label,
                               [](const ObjectRecord& o, Label l) { return o.label < l; });
    if (it == objects_.end() || it->label != label) return std::nullopt;
    return static_cast<std::size_t>(it - objects_.begin());
  }

  bool contains(Label label) const { return label != kBackground && index_of(label).has_value(); }

  const ObjectRecord& object(Label label) const {
    auto idx = index_of(label);
    if (!idx || label == kBackground) {
      throw NotFoundError("label " + std::to_string(label) + " not present in label map");
    }
    return objects_[*idx];
  }

  std::size_t background_count() const {
    std::size_t fg = 0;
    for (const auto& o : objects_) fg += o.area;
    return labels_.size() - fg;
  }

  Label max_label() const { return objects_.empty() ? 0 : objects_.back().label; }

  // Pixels of one object in raster order.
  std::vector<Pixel> pixels_of(Label label) const {
    const ObjectRecord& rec = object(label);
    std::vector<Pixel> out;
    out.reserve(rec.area);
    for (int r = rec.bbox.min_row; r <= rec.bbox.max_row; ++r) {
      for (int c = rec.bbox.min_col; c <= rec.bbox.max_col; ++c) {
        if (at(r, c) == label) out.push_back({r, c});
      }
    }
    return out;
  }

  friend bool operator==(const LabelMap& a, const LabelMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.labels_ == b.labels_;
  }

 private:
  void build_inventory() {
    std::unordered_map<Label, std::size_t> slot;
    for (int r = 0; r < height_; ++r) {
      for (int c = 0; c < width_; ++c) {
        const Label l = at(r, c);
        if (l == kBackground) continue;
        auto [it, inserted] = slot.try_emplace(l, objects_.size());
        if (inserted) objects_.push_back({l, 0, {}});
        ObjectRecord& rec = objects_[it->second];
        ++rec.area;
        rec.bbox.include(r, c);
      }
    }
    std::sort(objects_.begin(), objects_.end(),
              [](const ObjectRecord& a, const ObjectRecord& b) { return a.label < b.label; });
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Label> labels_;
  std::vector<ObjectRecord> objects_;
};

namespace detail {

// Union-find over provisional labels, smallest root wins so that final ids
// follow first-occurrence raster order after compaction.
class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
};

// Two-pass labelling where pixels p and q are joined when both are
// foreground, adjacent under `conn`, and same(p, q) holds.
template <typename SamePred>
LabelMap label_components(const LabelMap& map, Connectivity conn, SamePred same) {
  const int w = map.width();
  const int h = map.height();
  std::vector<std::uint32_t> provisional(map.pixel_count(), 0);
  DisjointSet sets;
  sets.make();  // slot 0 is background

  // Already-visited neighbours in raster order: W, NW, N, NE.
  static constexpr int kDr[] = {0, -1, -1, -1};
  static constexpr int kDc[] = {-1, -1, 0, 1};
  const bool eight = conn == Connectivity::kEight;

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Label here = map.at(r, c);
      if (here == kBackground) continue;
      std::uint32_t assigned = 0;
      for (int k = 0; k < 4; ++k) {
        if (!eight && (k == 1 || k == 3)) continue;
        const int nr = r + kDr[k];
        const int nc = c + kDc[k];
        if (!map.in_bounds(nr, nc)) continue;
        const Label there = map.at(nr, nc);
        if (there == kBackground || !same(here, there)) continue;
        const std::uint32_t other = provisional[static_cast<std::size_t>(nr) * w + nc];
        if (assigned == 0) {
          assigned = other;
        } else {
          sets.unite(assigned, other);
        }
      }
      if (assigned == 0) assigned = sets.make();
      provisional[static_cast<std::size_t>(r) * w + c] = assigned;
    }
  }

  std::vector<Label> final_id(sets.size(), 0);
  Label next = 0;
  std::vector<Label> out(map.pixel_count(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (provisional[i] == 0) continue;
    const std::uint32_t root = sets.find(provisional[i]);
    if (final_id[root] == 0) final_id[root] = ++next;
    out[i] = final_id[root];
  }
  return LabelMap(w, h, std::move(out));
}

}  // namespace detail

// Labels each maximal connected foreground region (value > 0) of `mask` with
// a distinct id 1..n in order of each region's first pixel in raster order.
inline LabelMap connected_components(const LabelMap& mask, Connectivity conn = Connectivity::kEight) {
  return detail::label_components(mask, conn, [](Label, Label) { return true; });
}

// Like connected_components, but pixels only join when they carry the same
// label: a label covering two disconnected regions becomes two objects.
inline LabelMap split_components(const LabelMap& map, Connectivity conn = Connectivity::kEight) {
  return detail::label_components(map, conn, [](Label a, Label b) { return a == b; });
}

// Compacts positive labels to 1..n, numbering objects by first occurrence in
// raster order. The pixel partition is unchanged.
inline LabelMap relabel_sequential(const LabelMap& map) {
  std::unordered_map<Label, Label> remap;
  remap.reserve(map.object_count());
  std::vector<Label> out(map.pixel_count(), 0);
  const auto src = map.labels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == kBackground) continue;
    auto [it, inserted] = remap.try_emplace(src[i], static_cast<Label>(remap.size() + 1));
    out[i] = it->second;
  }
  return LabelMap(map.width(), map.height(), std::move(out));
}

// True when pixel (row, col) of an object sits on its inner boundary: it lies
// on the image edge or has a 4-neighbour for which `inside` is false.
template <typename InsidePred>
bool is_inner_boundary(int row, int col, int width, int height, InsidePred inside) {
  if (row == 0 || col == 0 || row == height - 1 || col == width - 1) return true;
  return !inside(row - 1, col) || !inside(row + 1, col) || !inside(row, col - 1) ||
         !inside(row, col + 1);
}

// Inner boundary of one object, raster order.
inline std::vector<Pixel> boundary_pixels(const LabelMap& map, Label label) {
  const ObjectRecord& rec = map.object(label);
  auto inside = [&](int r, int c) { return map.at(r, c) == label; };
  std::vector<Pixel> out;
  for (int r = rec.bbox.min_row; r <= rec.bbox.max_row; ++r) {
    for (int c = rec.bbox.min_col; c <= rec.bbox.max_col; ++c) {
      if (map.at(r, c) == label && is_inner_boundary(r, c, map.width(), map.height(), inside)) {
        out.push_back({r, c});
      }
    }
  }
  return out;
}

enum class FlipAxis { kHorizontal, kVertical };

inline LabelMap flipped(const LabelMap& map, FlipAxis axis) {
  const int w = map.width();
  const int h = map.height();
  std::vector<Label> out(map.pixel_count());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int sr = axis == FlipAxis::kVertical ? h - 1 - r : r;
      const int sc = axis == FlipAxis::kHorizontal ? w - 1 - c : c;
      out[static_cast<std::size_t>(r) * w + c] = map.at(sr, sc);
    }
  }
  return LabelMap(w, h, std::move(out));
}

// Applies `mapping` to every positive label. Background stays 0.
template <typename Fn>
LabelMap remapped(const LabelMap& map, Fn mapping) {
  std::vector<Label> out(map.labels().begin(), map.labels().end());
  for (Label& l : out) {
    if (l != kBackground) l = mapping(l);
  }
  return LabelMap(map.width(), map.height(), std::move(out));
}

}  // namespace glas

#endif  // GLAS_LABEL_MAP_HPP_
