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
#ifndef GLAS_DISTANCE_HPP_
#define GLAS_DISTANCE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "glas/errors.hpp"
#include "glas/label_map.hpp"

namespace glas {

inline constexpr std::int64_t kNoFeature = std::numeric_limits<std::int64_t>::max();

namespace detail {

inline constexpr std::int64_t kMinusInfinity = std::numeric_limits<std::int64_t>::min() / 4;

// Intersection abscissa of two sampled parabolas, kept as an exact fraction
// num/den with den > 0.
struct Fraction {
  std::int64_t num;
  std::int64_t den;
};

inline bool less_equal(const Fraction& a, const Fraction& b) {
  return static_cast<__int128>(a.num) * b.den <= static_cast<__int128>(b.num) * a.den;
}

inline bool less_than(const Fraction& a, std::int64_t x) {
  return static_cast<__int128>(a.num) < static_cast<__int128>(x) * a.den;
}

// Exact 1D squared-distance lower envelope over f (kNoFeature marks sites
// with no finite value). Writes into out; scratch buffers are reused.
inline void lower_envelope_1d(std::span<const std::int64_t> f, std::span<std::int64_t> out,
                              std::vector<std::int64_t>& sites, std::vector<Fraction>& bounds) {
  const auto n = static_cast<std::int64_t>(f.size());
  sites.clear();
  bounds.clear();
  auto crossing = [&](std::int64_t p, std::int64_t q) {
    return Fraction{(f[q] + q * q) - (f[p] + p * p), 2 * (q - p)};
  };
  for (std::int64_t q = 0; q < n; ++q) {
    if (f[q] == kNoFeature) continue;
    if (sites.empty()) {
      sites.push_back(q);
      bounds.push_back({kMinusInfinity, 1});
      continue;
    }
    Fraction s = crossing(sites.back(), q);
    while (less_equal(s, bounds.back())) {
      sites.pop_back();
      bounds.pop_back();
      if (sites.empty()) break;
      s = crossing(sites.back(), q);
    }
    if (sites.empty()) {
      sites.push_back(q);
      bounds.push_back({kMinusInfinity, 1});
    } else {
      sites.push_back(q);
      bounds.push_back(s);
    }
  }
  if (sites.empty()) {
    std::fill(out.begin(), out.end(), kNoFeature);
    return;
  }
  std::size_t k = 0;
  for (std::int64_t q = 0; q < n; ++q) {
    while (k + 1 < sites.size() && less_than(bounds[k + 1], q)) ++k;
    const std::int64_t d = q - sites[k];
    out[q] = d * d + f[sites[k]];
  }
}

}  // namespace detail

// Exact squared Euclidean distance from every cell to the nearest feature
// cell (feature[i] != 0), row-major, width x height. Cells are pixel centres
// on the integer lattice. Returns kNoFeature everywhere when there are no
// features.
inline std::vector<std::int64_t> squared_distance_transform(std::span<const std::uint8_t> feature,
                                                            int width, int height) {
  if (feature.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ShapeError("feature mask size does not match dimensions");
  }
  std::vector<std::int64_t> grid(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) grid[i] = feature[i] ? 0 : kNoFeature;

  std::vector<std::int64_t> sites;
  std::vector<detail::Fraction> bounds;
  std::vector<std::int64_t> line_in(static_cast<std::size_t>(std::max(width, height)));
  std::vector<std::int64_t> line_out(line_in.size());

  for (int c = 0; c < width; ++c) {
    for (int r = 0; r < height; ++r) line_in[r] = grid[static_cast<std::size_t>(r) * width + c];
    detail::lower_envelope_1d(std::span(line_in.data(), height), std::span(line_out.data(), height),
                              sites, bounds);
    for (int r = 0; r < height; ++r) grid[static_cast<std::size_t>(r) * width + c] = line_out[r];
  }
  for (int r = 0; r < height; ++r) {
    std::span<std::int64_t> row(grid.data() + static_cast<std::size_t>(r) * width, width);
    std::copy(row.begin(), row.end(), line_in.begin());
    detail::lower_envelope_1d(std::span(line_in.data(), width), row, sites, bounds);
  }
  return grid;
}

inline BoundingBox bounds_of(std::span<const Pixel> pixels) {
  BoundingBox box;
  for (const Pixel& p : pixels) box.include(p.row, p.col);
  return box;
}

// Largest squared distance from a pixel of `from` to its nearest pixel of
// `to`. The transform is evaluated on `window`, which must contain both sets.
inline std::int64_t directed_squared_hausdorff(std::span<const Pixel> from, std::span<const Pixel> to,
                                               const BoundingBox& window) {
  const int w = window.cols();
  const int h = window.rows();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
  for (const Pixel& p : to) {
    mask[static_cast<std::size_t>(p.row - window.min_row) * w + (p.col - window.min_col)] = 1;
  }
  const auto dist = squared_distance_transform(mask, w, h);
  std::int64_t worst = 0;
  for (const Pixel& p : from) {
    worst = std::max(worst, dist[static_cast<std::size_t>(p.row - window.min_row) * w +
                                 (p.col - window.min_col)]);
  }
  return worst;
}

// Symmetric Hausdorff distance between two non-empty pixel sets.
inline double hausdorff_distance(std::span<const Pixel> a, std::span<const Pixel> b) {
  if (a.empty() || b.empty()) {
    throw UndefinedInputError("Hausdorff distance is undefined for an empty pixel set");
  }
  const BoundingBox window = united(bounds_of(a), bounds_of(b));
  const std::int64_t d2 =
      std::max(directed_squared_hausdorff(a, b, window), directed_squared_hausdorff(b, a, window));
  return std::sqrt(static_cast<double>(d2));
}

enum class HausdorffMode {
  kBoundary,  // inner-boundary pixels of each object
  kFull,      // every object pixel
};

inline const char* to_string(HausdorffMode mode) {
  return mode == HausdorffMode::kBoundary ? "boundary" : "full";
}

// Pixel set per object of `map` (indexed like map.objects()), raster order.
// In boundary mode only inner-boundary pixels are kept, using 4-neighbour
// tests with the image edge counting as outside.
inline std::vector<std::vector<Pixel>> object_point_sets(const LabelMap& map, HausdorffMode mode) {
  std::vector<std::vector<Pixel>> sets(map.object_count());
  if (map.object_count() == 0) return sets;
  std::unordered_map<Label, std::size_t> slot;
  for (std::size_t i = 0; i < map.object_count(); ++i) {
    slot.emplace(map.objects()[i].label, i);
    sets[i].reserve(map.objects()[i].area);
  }
  std::size_t cached_slot = 0;
  Label cached_label = kBackground;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const Label l = map.at(r, c);
      if (l == kBackground) continue;
      if (mode == HausdorffMode::kBoundary &&
          !is_inner_boundary(r, c, map.width(), map.height(),
                             [&](int rr, int cc) { return map.at(rr, cc) == l; })) {
        continue;
      }
      if (l != cached_label) {
        cached_label = l;
        cached_slot = slot.at(l);
      }
      sets[cached_slot].push_back({r, c});
    }
  }
  for (auto& s : sets) s.shrink_to_fit();
  return sets;
}

}  // namespace glas

#endif  // GLAS_DISTANCE_HPP_
