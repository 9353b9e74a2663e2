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
#ifndef GLAS_BASELINE_HPP_
#define GLAS_BASELINE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glas/distance.hpp"
#include "glas/errors.hpp"
#include "glas/label_map.hpp"

namespace glas {

// Single-channel 8-bit intensity image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// ---------------------------------------------------------------------------
// Thresholds

using Histogram = std::array<std::uint64_t, 256>;

inline Histogram histogram_of(std::span<const std::uint8_t> pixels) {
  Histogram h{};
  for (auto v : pixels) ++h[v];
  return h;
}

// Otsu split restricted to intensities [lo, hi]: returns t such that {<= t}
// and {> t} maximise the between-class variance. nullopt when the range holds
// fewer than two distinct intensities.
inline std::optional<int> otsu_threshold(const Histogram& h, int lo = 0, int hi = 255) {
  double total = 0, weighted = 0;
  int distinct = 0;
  for (int v = lo; v <= hi; ++v) {
    total += static_cast<double>(h[v]);
    weighted += static_cast<double>(v) * static_cast<double>(h[v]);
    distinct += h[v] > 0;
  }
  if (distinct < 2) return std::nullopt;
  double w0 = 0, sum0 = 0, best = -1;
  int best_t = lo;
  for (int t = lo; t < hi; ++t) {
    w0 += static_cast<double>(h[t]);
    sum0 += static_cast<double>(t) * static_cast<double>(h[t]);
    const double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (weighted - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

// Three-class Otsu: (t1, t2) with classes {<= t1}, (t1, t2], {> t2}.
inline std::optional<std::pair<int, int>> otsu_two_thresholds(const Histogram& h) {
  std::array<double, 257> w{}, s{};
  int distinct = 0;
  for (int v = 0; v < 256; ++v) {
    w[v + 1] = w[v] + static_cast<double>(h[v]);
    s[v + 1] = s[v] + static_cast<double>(v) * static_cast<double>(h[v]);
    distinct += h[v] > 0;
  }
  if (distinct < 3) return std::nullopt;
  auto term = [&](int a, int b) {  // class over [a, b]
    const double weight = w[b + 1] - w[a];
    if (weight == 0) return -1.0;
    const double sum = s[b + 1] - s[a];
    return sum * sum / weight;
  };
  double best = -1;
  std::pair<int, int> best_t{0, 1};
  for (int t1 = 0; t1 < 254; ++t1) {
    const double c0 = term(0, t1);
    if (c0 < 0) continue;
    for (int t2 = t1 + 1; t2 < 255; ++t2) {
      const double c1 = term(t1 + 1, t2);
      const double c2 = term(t2 + 1, 255);
      if (c1 < 0 || c2 < 0) continue;
      const double score = c0 + c1 + c2;
      if (score > best) {
        best = score;
        best_t = {t1, t2};
      }
    }
  }
  if (best < 0) return std::nullopt;
  return best_t;
}

// ---------------------------------------------------------------------------
// Morphology on binary masks and label maps (Euclidean discs)

inline std::vector<std::uint8_t> dilate_mask(std::span<const std::uint8_t> mask, int width, int height,
                                             int radius) {
  std::vector<std::uint8_t> out(mask.begin(), mask.end());
  if (radius <= 0) return out;
  const auto d2 = squared_distance_transform(mask, width, height);
  const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d2[i] <= r2 ? 1 : 0;
  return out;
}

// Keeps a pixel only when every pixel within `radius` inside the image
// carries the same label.
inline LabelMap erode_labels(const LabelMap& map, int radius) {
  if (radius <= 0) return map;
  const int w = map.width();
  const int h = map.height();
  std::vector<Label> out(map.labels().begin(), map.labels().end());
  const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
  for (const auto& obj : map.objects()) {
    BoundingBox win = obj.bbox;
    win.min_row = std::max(0, win.min_row - radius - 1);
    win.min_col = std::max(0, win.min_col - radius - 1);
    win.max_row = std::min(h - 1, win.max_row + radius + 1);
    win.max_col = std::min(w - 1, win.max_col + radius + 1);
    const int ww = win.cols();
    const int wh = win.rows();
    std::vector<std::uint8_t> other(static_cast<std::size_t>(ww) * wh);
    for (int r = 0; r < wh; ++r) {
      for (int c = 0; c < ww; ++c) {
        other[static_cast<std::size_t>(r) * ww + c] = map.at(win.min_row + r, win.min_col + c) != obj.label;
      }
    }
    const auto d2 = squared_distance_transform(other, ww, wh);
    for (int r = 0; r < wh; ++r) {
      for (int c = 0; c < ww; ++c) {
        const int gr = win.min_row + r;
        const int gc = win.min_col + c;
        if (map.at(gr, gc) == obj.label && d2[static_cast<std::size_t>(r) * ww + c] <= r2) {
          out[static_cast<std::size_t>(gr) * w + gc] = kBackground;
        }
      }
    }
  }
  return LabelMap(w, h, std::move(out));
}

// Grows every object into background pixels within `radius`; a pixel reached
// by several objects goes to the nearest one, lowest label on equal distance.
inline LabelMap dilate_labels(const LabelMap& map, int radius) {
  if (radius <= 0) return map;
  const int w = map.width();
  const int h = map.height();
  std::vector<Label> out(map.labels().begin(), map.labels().end());
  std::vector<std::int64_t> best(map.pixel_count(), kNoFeature);
  const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
  for (const auto& obj : map.objects()) {  // ascending label
    BoundingBox win = obj.bbox;
    win.min_row = std::max(0, win.min_row - radius);
    win.min_col = std::max(0, win.min_col - radius);
    win.max_row = std::min(h - 1, win.max_row + radius);
    win.max_col = std::min(w - 1, win.max_col + radius);
    const int ww = win.cols();
    const int wh = win.rows();
    std::vector<std::uint8_t> own(static_cast<std::size_t>(ww) * wh);
    for (int r = 0; r < wh; ++r) {
      for (int c = 0; c < ww; ++c) {
        own[static_cast<std::size_t>(r) * ww + c] = map.at(win.min_row + r, win.min_col + c) == obj.label;
      }
    }
    const auto d2 = squared_distance_transform(own, ww, wh);
    for (int r = 0; r < wh; ++r) {
      for (int c = 0; c < ww; ++c) {
        const std::size_t g = static_cast<std::size_t>(win.min_row + r) * w + (win.min_col + c);
        const std::int64_t d = d2[static_cast<std::size_t>(r) * ww + c];
        if (map.labels()[g] != kBackground || d > r2) continue;
        if (d < best[g]) {
          best[g] = d;
          out[g] = obj.label;
        }
      }
    }
  }
  return LabelMap(w, h, std::move(out));
}

// ---------------------------------------------------------------------------
// Post-processing

struct PostprocessConfig {
  std::size_t min_object_area = 1000;
  bool fill_holes = true;
};

// Drops objects smaller than min_object_area, then fills every hole: a
// 4-connected background region that does not touch the image border and is
// bordered by a single object takes that object's label. Idempotent.
inline LabelMap postprocess(const LabelMap& map, const PostprocessConfig& config = {}) {
  const int w = map.width();
  const int h = map.height();
  std::vector<Label> out(map.labels().begin(), map.labels().end());
  std::set<Label> small;
  for (const auto& o : map.objects()) {
    if (o.area < config.min_object_area) small.insert(o.label);
  }
  if (!small.empty()) {
    for (Label& l : out) {
      if (l != kBackground && small.count(l)) l = kBackground;
    }
  }
  if (!config.fill_holes) return LabelMap(w, h, std::move(out));

  std::vector<std::uint8_t> seen(out.size(), 0);
  std::vector<std::size_t> region;
  std::deque<std::size_t> queue;
  static constexpr int kDr[] = {-1, 1, 0, 0};
  static constexpr int kDc[] = {0, 0, -1, 1};
  for (std::size_t start = 0; start < out.size(); ++start) {
    if (out[start] != kBackground || seen[start]) continue;
    region.clear();
    queue.assign(1, start);
    seen[start] = 1;
    bool touches_border = false;
    Label enclosing = kBackground;
    bool single = true;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      region.push_back(p);
      const int r = static_cast<int>(p / w);
      const int c = static_cast<int>(p % w);
      if (r == 0 || c == 0 || r == h - 1 || c == w - 1) touches_border = true;
      for (int k = 0; k < 4; ++k) {
        const int nr = r + kDr[k];
        const int nc = c + kDc[k];
        if (nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
        const std::size_t q = static_cast<std::size_t>(nr) * w + nc;
        if (out[q] == kBackground) {
          if (!seen[q]) {
            seen[q] = 1;
            queue.push_back(q);
          }
        } else if (enclosing == kBackground) {
          enclosing = out[q];
        } else if (enclosing != out[q]) {
          single = false;
        }
      }
    }
    if (!touches_border && single && enclosing != kBackground) {
      for (std::size_t p : region) out[p] = enclosing;
    }
  }
  return LabelMap(w, h, std::move(out));
}

// ---------------------------------------------------------------------------
// Lumen-seeded region growing

struct SegmenterConfig {
  std::optional<int> nuclei_threshold;  // intensity <= threshold is nuclei; nullopt = Otsu
  std::optional<int> lumen_threshold;   // intensity > threshold is lumen; nullopt = Otsu
  std::size_t min_seed_area = 100;
  int barrier_dilation_radius = 2;
  std::size_t min_object_area = 1000;
  bool fill_holes = true;
  Connectivity connectivity = Connectivity::kEight;
  // A seed whose grown region exceeds this multiple of the seed area leaked
  // through a broken nuclei chain and is discarded.
  double max_growth_ratio = 4.0;

  void validate() const {
    auto in_range = [](const std::optional<int>& t) { return !t || (*t >= 0 && *t <= 255); };
    if (!in_range(nuclei_threshold) || !in_range(lumen_threshold)) {
      throw ValueError("thresholds must lie within the 8-bit intensity range [0, 255]");
    }
    if (barrier_dilation_radius < 0) throw ValueError("barrier_dilation_radius must be >= 0");
    if (!(max_growth_ratio >= 1.0)) throw ValueError("max_growth_ratio must be >= 1");
  }
};

struct Thresholds {
  int nuclei = 0;
  int lumen = 255;
};

// nullopt when the image has too little contrast to separate classes.
inline std::optional<Thresholds> resolve_thresholds(const GrayImage& image, const SegmenterConfig& config) {
  const Histogram hist = histogram_of(image.pixels);
  Thresholds t;
  if (config.nuclei_threshold && config.lumen_threshold) {
    t = {*config.nuclei_threshold, *config.lumen_threshold};
  } else if (config.nuclei_threshold) {
    auto lumen = otsu_threshold(hist, std::min(*config.nuclei_threshold + 1, 255), 255);
    if (!lumen) return std::nullopt;
    t = {*config.nuclei_threshold, *lumen};
  } else if (config.lumen_threshold) {
    auto nuclei = otsu_threshold(hist, 0, *config.lumen_threshold);
    if (!nuclei) return std::nullopt;
    t = {*nuclei, *config.lumen_threshold};
  } else {
    auto both = otsu_two_thresholds(hist);
    if (!both) return std::nullopt;
    t = {both->first, both->second};
  }
  return t;
}

namespace detail {

// Multi-source breadth-first growth of `labels` into pixels where
// `passable` is set. Sources expand in label order at equal depth.
inline void grow_regions(std::vector<Label>& labels, std::span<const std::uint8_t> passable, int width,
                         int height, Connectivity conn) {
  std::deque<std::size_t> queue;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] != kBackground) queue.push_back(p);
  }
  std::stable_sort(queue.begin(), queue.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  static constexpr int kDr[] = {-1, 1, 0, 0, -1, -1, 1, 1};
  static constexpr int kDc[] = {0, 0, -1, 1, -1, 1, -1, 1};
  const int n_dirs = conn == Connectivity::kEight ? 8 : 4;
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    const int r = static_cast<int>(p / width);
    const int c = static_cast<int>(p % width);
    for (int k = 0; k < n_dirs; ++k) {
      const int nr = r + kDr[k];
      const int nc = c + kDc[k];
      if (nr < 0 || nc < 0 || nr >= height || nc >= width) continue;
      const std::size_t q = static_cast<std::size_t>(nr) * width + nc;
      if (labels[q] != kBackground || !passable[q]) continue;
      labels[q] = labels[p];
      queue.push_back(q);
    }
  }
}

}  // namespace detail

// Lumen-seeded region growing:
//   1. nuclei = intensity <= nuclei threshold; barrier = nuclei dilated by
//      barrier_dilation_radius;
//   2. seeds = connected bright (> lumen threshold) non-barrier regions of at
//      least min_seed_area pixels;
//   3. seeds grow over non-barrier pixels and stop at the barrier; regions
//      that grew past max_growth_ratio x seed area are dropped;
//   4. surviving regions absorb the adjacent barrier band (the epithelial
//      chain) and are eroded by the barrier radius to undo its dilation;
//   5. components are split, post-processed and relabelled sequentially.
inline LabelMap segment_region_growing(const GrayImage& image, const SegmenterConfig& config = {}) {
  config.validate();
  const int w = image.width;
  const int h = image.height;
  if (image.pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw FormatError("intensity buffer does not match image dimensions");
  }
  const auto thresholds = resolve_thresholds(image, config);
  if (!thresholds) return LabelMap(w, h, std::vector<Label>(image.pixels.size(), 0));

  std::vector<std::uint8_t> nuclei(image.pixels.size());
  for (std::size_t i = 0; i < nuclei.size(); ++i) nuclei[i] = image.pixels[i] <= thresholds->nuclei;
  const auto barrier = dilate_mask(nuclei, w, h, config.barrier_dilation_radius);

  std::vector<Label> bright(image.pixels.size(), 0);
  for (std::size_t i = 0; i < bright.size(); ++i) {
    bright[i] = !barrier[i] && image.pixels[i] > thresholds->lumen;
  }
  const LabelMap candidates = connected_components(LabelMap(w, h, std::move(bright)), config.connectivity);
  std::vector<Label> seeds(image.pixels.size(), 0);
  std::vector<std::size_t> seed_area(candidates.max_label() + 1, 0);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Label l = candidates.labels()[i];
    if (l != kBackground && candidates.object(l).area >= config.min_seed_area) {
      seeds[i] = l;
      seed_area[l] = candidates.object(l).area;
    }
  }

  std::vector<std::uint8_t> open(barrier.size());
  for (std::size_t i = 0; i < open.size(); ++i) open[i] = !barrier[i];
  detail::grow_regions(seeds, open, w, h, config.connectivity);

  std::vector<std::size_t> grown_area(seed_area.size(), 0);
  for (Label l : seeds) {
    if (l != kBackground) ++grown_area[l];
  }
  for (Label& l : seeds) {
    if (l != kBackground &&
        static_cast<double>(grown_area[l]) > config.max_growth_ratio * static_cast<double>(seed_area[l])) {
      l = kBackground;
    }
  }

  detail::grow_regions(seeds, barrier, w, h, config.connectivity);
  LabelMap regions = erode_labels(LabelMap(w, h, std::move(seeds)), config.barrier_dilation_radius);
  regions = split_components(regions, config.connectivity);
  regions = postprocess(regions, {config.min_object_area, config.fill_holes});
  return relabel_sequential(regions);
}

// ---------------------------------------------------------------------------
// Synthetic gland corpus

struct SynthSpec {
  int width = 256;
  int height = 256;
  int glands = 5;
  int radius_min = 20;  // outer gland radius, pixels
  int radius_max = 32;
  int ring_min = 4;  // epithelial ring thickness, pixels
  int ring_max = 7;
  int min_gap = 12;  // clearance between neighbouring glands
  double noise = 0.0;  // Gaussian intensity noise, standard deviation
  std::uint64_t seed = 42;
  int max_attempts = 20000;
  std::uint8_t stroma_intensity = 150;
  std::uint8_t nuclei_intensity = 40;
  std::uint8_t lumen_intensity = 230;

  void validate() const {
    if (width <= 0 || height <= 0) throw ValueError("synthetic image size must be positive");
    if (glands < 0) throw ValueError("gland count must be >= 0");
    if (radius_min <= 0 || radius_max < radius_min) throw ValueError("invalid radius range");
    if (ring_min <= 0 || ring_max < ring_min) throw ValueError("invalid ring thickness range");
    if (ring_max >= radius_min) throw ValueError("ring thickness must be smaller than the gland radius");
    if (min_gap < 0) throw ValueError("min_gap must be >= 0");
    if (!(noise >= 0.0)) throw ValueError("noise must be >= 0");
    if (max_attempts <= 0) throw ValueError("max_attempts must be positive");
  }
};

struct GlandShape {
  double center_row = 0;
  double center_col = 0;
  int radius = 0;
  int ring = 0;
};

struct SynthSample {
  GrayImage image;
  LabelMap truth;
  std::vector<GlandShape> glands;
};

// Renders `glands` ring-shaped glands on stroma: a dark epithelial ring of
// nuclei around a bright lumen. Gland k (placement order) gets label k + 1.
inline SynthSample synth_glands(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  SynthSample out;
  for (int k = 0; k < spec.glands; ++k) {
    std::uniform_int_distribution<int> radius_dist(spec.radius_min, spec.radius_max);
    std::uniform_int_distribution<int> ring_dist(spec.ring_min, spec.ring_max);
    const int radius = radius_dist(rng);
    const int ring = ring_dist(rng);
    if (2 * radius + 1 > spec.width || 2 * radius + 1 > spec.height) {
      throw PlacementError("gland of radius " + std::to_string(radius) + " does not fit the image");
    }
    std::uniform_int_distribution<int> row_dist(radius, spec.height - 1 - radius);
    std::uniform_int_distribution<int> col_dist(radius, spec.width - 1 - radius);
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_attempts && !placed; ++attempt) {
      const GlandShape g{static_cast<double>(row_dist(rng)), static_cast<double>(col_dist(rng)), radius, ring};
      placed = std::all_of(out.glands.begin(), out.glands.end(), [&](const GlandShape& o) {
        const double dr = g.center_row - o.center_row;
        const double dc = g.center_col - o.center_col;
        const double need = g.radius + o.radius + spec.min_gap;
        return dr * dr + dc * dc >= need * need;
      });
      if (placed) out.glands.push_back(g);
    }
    if (!placed) {
      throw PlacementError("could not place gland " + std::to_string(k + 1) + " of " +
                           std::to_string(spec.glands) + " after " + std::to_string(spec.max_attempts) +
                           " attempts");
    }
  }

  out.image = GrayImage(spec.width, spec.height, spec.stroma_intensity);
  std::vector<Label> truth(static_cast<std::size_t>(spec.width) * spec.height, 0);
  for (std::size_t k = 0; k < out.glands.size(); ++k) {
    const GlandShape& g = out.glands[k];
    const double outer2 = static_cast<double>(g.radius) * g.radius;
    const double inner2 = static_cast<double>(g.radius - g.ring) * (g.radius - g.ring);
    for (int r = static_cast<int>(g.center_row) - g.radius; r <= static_cast<int>(g.center_row) + g.radius; ++r) {
      for (int c = static_cast<int>(g.center_col) - g.radius; c <= static_cast<int>(g.center_col) + g.radius; ++c) {
        const double dr = r - g.center_row;
        const double dc = c - g.center_col;
        const double d2 = dr * dr + dc * dc;
        if (d2 > outer2) continue;
        truth[static_cast<std::size_t>(r) * spec.width + c] = static_cast<Label>(k + 1);
        out.image.at(r, c) = d2 <= inner2 ? spec.lumen_intensity : spec.nuclei_intensity;
      }
    }
  }
  if (spec.noise > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise);
    for (auto& v : out.image.pixels) {
      v = static_cast<std::uint8_t>(std::clamp(std::lround(v + noise(rng)), 0L, 255L));
    }
  }
  out.truth = LabelMap(spec.width, spec.height, std::move(truth));
  return out;
}

// ---------------------------------------------------------------------------
// Perturbations for metamorphic tests

enum class PerturbKind { kDilate, kErode, kShift, kMergePair, kSplit, kDropObject };

inline PerturbKind perturb_kind_from_string(const std::string& s) {
  if (s == "dilate") return PerturbKind::kDilate;
  if (s == "erode") return PerturbKind::kErode;
  if (s == "shift") return PerturbKind::kShift;
  if (s == "merge-pair") return PerturbKind::kMergePair;
  if (s == "split") return PerturbKind::kSplit;
  if (s == "drop-object") return PerturbKind::kDropObject;
  throw ValueError("unknown perturbation '" + s + "'");
}

struct PerturbResult {
  LabelMap map;
  std::vector<Label> affected;  // labels of the input that were changed
  std::vector<Label> extinct;   // labels of the input that vanished entirely
};

// Translates every pixel by (drow, dcol); pixels leaving the image are lost
// and uncovered pixels become background.
inline LabelMap shift_map(const LabelMap& map, int drow, int dcol) {
  const int w = map.width();
  const int h = map.height();
  std::vector<Label> out(map.pixel_count(), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int sr = r - drow;
      const int sc = c - dcol;
      if (map.in_bounds(sr, sc)) out[static_cast<std::size_t>(r) * w + c] = map.at(sr, sc);
    }
  }
  return LabelMap(w, h, std::move(out));
}

// Deterministic perturbation of `map` given (kind, magnitude, seed):
//   dilate       grow every object by `magnitude` pixels into background
//   erode        shrink every object by `magnitude` pixels (objects may vanish)
//   shift        translate by `magnitude` pixels in one of 8 compass
//                directions chosen by the seed
//   merge-pair   `magnitude` times: a seed-chosen object absorbs the object
//                whose centroid is nearest to its own
//   split        `magnitude` seed-chosen objects are cut through the centroid
//                by a seed-chosen horizontal or vertical line; the far half
//                takes a fresh label
//   drop-object  `magnitude` seed-chosen objects are erased
inline PerturbResult perturb(const LabelMap& map, PerturbKind kind, int magnitude, std::uint64_t seed = 0) {
  if (magnitude < 0) throw ValueError("perturbation magnitude must be >= 0");
  std::mt19937_64 rng(seed);
  PerturbResult res;
  auto pick_objects = [&](int count) {
    std::vector<Label> labels;
    for (const auto& o : map.objects()) labels.push_back(o.label);
    std::shuffle(labels.begin(), labels.end(), rng);
    labels.resize(std::min<std::size_t>(labels.size(), static_cast<std::size_t>(count)));
    std::sort(labels.begin(), labels.end());
    return labels;
  };
  auto finish = [&](LabelMap out) {
    for (const auto& o : map.objects()) {
      if (!out.contains(o.label)) {
        res.extinct.push_back(o.label);
      } else if (out.object(o.label).area != o.area || out.object(o.label).bbox != o.bbox) {
        res.affected.push_back(o.label);
      }
    }
    for (Label l : res.extinct) res.affected.push_back(l);
    std::sort(res.affected.begin(), res.affected.end());
    res.affected.erase(std::unique(res.affected.begin(), res.affected.end()), res.affected.end());
    res.map = std::move(out);
    return res;
  };

  switch (kind) {
    case PerturbKind::kDilate:
      return finish(dilate_labels(map, magnitude));
    case PerturbKind::kErode:
      return finish(erode_labels(map, magnitude));
    case PerturbKind::kShift: {
      static constexpr int kDr[] = {-1, -1, -1, 0, 0, 1, 1, 1};
      static constexpr int kDc[] = {-1, 0, 1, -1, 1, -1, 0, 1};
      const int dir = std::uniform_int_distribution<int>(0, 7)(rng);
      return finish(shift_map(map, kDr[dir] * magnitude, kDc[dir] * magnitude));
    }
    case PerturbKind::kDropObject: {
      const auto drop = pick_objects(magnitude);
      const std::set<Label> gone(drop.begin(), drop.end());
      return finish(remapped(map, [&](Label l) { return gone.count(l) ? kBackground : l; }));
    }
    case PerturbKind::kMergePair: {
      LabelMap current = map;
      for (int m = 0; m < magnitude && current.object_count() >= 2; ++m) {
        std::vector<std::pair<double, double>> centroid(current.object_count(), {0.0, 0.0});
        for (int r = 0; r < current.height(); ++r) {
          for (int c = 0; c < current.width(); ++c) {
            if (const Label l = current.at(r, c); l != kBackground) {
              auto& ct = centroid[*current.index_of(l)];
              ct.first += r;
              ct.second += c;
            }
          }
        }
        for (std::size_t i = 0; i < centroid.size(); ++i) {
          centroid[i].first /= static_cast<double>(current.objects()[i].area);
          centroid[i].second /= static_cast<double>(current.objects()[i].area);
        }
        const std::size_t a =
            std::uniform_int_distribution<std::size_t>(0, current.object_count() - 1)(rng);
        std::size_t b = a;
        double best = 0;
        for (std::size_t i = 0; i < centroid.size(); ++i) {
          if (i == a) continue;
          const double dr = centroid[i].first - centroid[a].first;
          const double dc = centroid[i].second - centroid[a].second;
          const double d = dr * dr + dc * dc;
          if (b == a || d < best) {
            b = i;
            best = d;
          }
        }
        const Label keep = current.objects()[a].label;
        const Label absorb = current.objects()[b].label;
        current = remapped(current, [&](Label l) { return l == absorb ? keep : l; });
      }
      return finish(current);
    }
    case PerturbKind::kSplit: {
      const auto targets = pick_objects(magnitude);
      std::vector<Label> out(map.labels().begin(), map.labels().end());
      Label next = map.max_label();
      for (Label target : targets) {
        const auto pixels = map.pixels_of(target);
        double mr = 0, mc = 0;
        for (const auto& p : pixels) {
          mr += p.row;
          mc += p.col;
        }
        mr /= static_cast<double>(pixels.size());
        mc /= static_cast<double>(pixels.size());
        const bool horizontal = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
        const Label fresh = ++next;
        for (const auto& p : pixels) {
          const bool far = horizontal ? p.row > mr : p.col > mc;
          if (far) out[static_cast<std::size_t>(p.row) * map.width() + p.col] = fresh;
        }
      }
      return finish(LabelMap(map.width(), map.height(), std::move(out)));
    }
  }
  throw ValueError("unhandled perturbation kind");
}

}  // namespace glas

#endif  // GLAS_BASELINE_HPP_
