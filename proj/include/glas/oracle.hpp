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
#ifndef GLAS_ORACLE_HPP_
#define GLAS_ORACLE_HPP_

// Brute-force reference implementations and random instance generators used
// to cross-check the fast paths. Nothing here calls into the metric code: the
// oracles work on raw row-major label vectors with plain loops and std::map,
// so a shared bug cannot hide on both sides of a comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace glas::oracle {

struct RawImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> gt;
  std::vector<std::uint32_t> seg;
};

using Point = std::pair<int, int>;  // (row, col)

// All-pairs Hausdorff: max over both directions of the largest
// nearest-neighbour Euclidean distance.
inline double hausdorff_all_pairs(const std::vector<Point>& a, const std::vector<Point>& b) {
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& q : to) {
        const double dr = p.first - q.first;
        const double dc = p.second - q.second;
        nearest = std::min(nearest, std::sqrt(dr * dr + dc * dc));
      }
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

// Points of `set` with a 4-neighbour outside the set or on the image edge.
inline std::vector<Point> boundary_points(const std::vector<Point>& set, int width, int height) {
  const std::set<Point> members(set.begin(), set.end());
  std::vector<Point> out;
  for (const auto& p : set) {
    const auto [r, c] = p;
    const bool edge = r == 0 || c == 0 || r == height - 1 || c == width - 1 || !members.count({r - 1, c}) ||
                      !members.count({r + 1, c}) || !members.count({r, c - 1}) || !members.count({r, c + 1});
    if (edge) out.push_back(p);
  }
  return out;
}

inline double hausdorff_brute(const std::vector<Point>& a, const std::vector<Point>& b, bool boundary, int width,
                              int height) {
  if (!boundary) return hausdorff_all_pairs(a, b);
  return hausdorff_all_pairs(boundary_points(a, width, height), boundary_points(b, width, height));
}

// Adjusted Rand index by enumerating every unordered pixel pair. With
// include_background, background is one more cluster in each partition;
// otherwise only pixels that are foreground in both maps take part. NaN when
// fewer than 2 pixels take part.
inline double ari_pair_counting(const std::vector<std::uint32_t>& gt, const std::vector<std::uint32_t>& seg,
                                bool include_background) {
  std::vector<std::size_t> idx;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    if (include_background || (gt[p] != 0 && seg[p] != 0)) idx.push_back(p);
  }
  double same_both = 0, same_gt = 0, same_seg = 0, all = 0;
  for (std::size_t x = 0; x < idx.size(); ++x) {
    for (std::size_t y = x + 1; y < idx.size(); ++y) {
      const bool sg = gt[idx[x]] == gt[idx[y]];
      const bool ss = seg[idx[x]] == seg[idx[y]];
      same_both += sg && ss;
      same_gt += sg;
      same_seg += ss;
      all += 1;
    }
  }
  if (all == 0) return std::numeric_limits<double>::quiet_NaN();  // fewer than 2 pixels
  if (same_gt == same_seg && (same_gt == 0 || same_gt == all)) return 1.0;
  const double expected = same_gt * same_seg / all;
  return (same_both - expected) / (0.5 * (same_gt + same_seg) - expected);
}

// Probability that a random pixel pair is treated alike by both partitions.
inline double agreement_probability(const std::vector<std::uint32_t>& gt, const std::vector<std::uint32_t>& seg) {
  double agree = 0, all = 0;
  for (std::size_t x = 0; x < gt.size(); ++x) {
    for (std::size_t y = x + 1; y < gt.size(); ++y) {
      agree += (gt[x] == gt[y]) == (seg[x] == seg[y]);
      all += 1;
    }
  }
  return agree / all;
}

struct ObjectLevel {
  double dice_obj = 0.0;
  double hausdorff_obj = 0.0;
};

// Straight-line expansion of the area-weighted object-level Dice and
// Hausdorff indices over a set of images, with weights normalised over every
// object of every image.
inline ObjectLevel object_level_expansion(const std::vector<RawImage>& images, bool boundary) {
  struct Term {
    double area;
    double dice;
    double hausdorff;
  };
  std::vector<Term> gt_terms, seg_terms;

  for (const auto& im : images) {
    // Relabel by first raster occurrence so "lowest label" tie-breaks mean
    // the same thing here as in the evaluator.
    auto canon = [](const std::vector<std::uint32_t>& v) {
      std::map<std::uint32_t, std::uint32_t> m;
      std::vector<std::uint32_t> out(v.size(), 0);
      for (std::size_t p = 0; p < v.size(); ++p) {
        if (v[p] == 0) continue;
        if (!m.count(v[p])) {
          const auto next = static_cast<std::uint32_t>(m.size() + 1);
          m[v[p]] = next;
        }
        out[p] = m[v[p]];
      }
      return out;
    };
    const auto gt = canon(im.gt);
    const auto seg = canon(im.seg);

    std::map<std::uint32_t, std::vector<Point>> g_pts, s_pts;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> overlap;
    for (int r = 0; r < im.height; ++r) {
      for (int c = 0; c < im.width; ++c) {
        const std::size_t p = static_cast<std::size_t>(r) * im.width + c;
        if (gt[p]) g_pts[gt[p]].push_back({r, c});
        if (seg[p]) s_pts[seg[p]].push_back({r, c});
        if (gt[p] && seg[p]) overlap[{gt[p], seg[p]}] += 1;
      }
    }
    auto shape = [&](const std::vector<Point>& pts) {
      return boundary ? boundary_points(pts, im.width, im.height) : pts;
    };
    const double diagonal = std::sqrt(double(im.width) * im.width + double(im.height) * im.height);

    for (const auto& [g, gp] : g_pts) {
      std::uint32_t best = 0;
      double best_n = 0;
      for (const auto& [s, sp] : s_pts) {
        const double n = overlap.count({g, s}) ? overlap[{g, s}] : 0;
        if (n > best_n) {
          best_n = n;
          best = s;
        }
      }
      Term t{double(gp.size()), 0.0, diagonal};
      if (best) {
        t.dice = 2 * best_n / (double(gp.size()) + double(s_pts[best].size()));
        t.hausdorff = hausdorff_all_pairs(shape(gp), shape(s_pts[best]));
      } else if (!s_pts.empty()) {
        t.hausdorff = std::numeric_limits<double>::infinity();
        for (const auto& [s, sp] : s_pts) t.hausdorff = std::min(t.hausdorff, hausdorff_all_pairs(shape(gp), shape(sp)));
      }
      gt_terms.push_back(t);
    }
    for (const auto& [s, sp] : s_pts) {
      std::uint32_t best = 0;
      double best_n = 0;
      for (const auto& [g, gp] : g_pts) {
        const double n = overlap.count({g, s}) ? overlap[{g, s}] : 0;
        if (n > best_n) {
          best_n = n;
          best = g;
        }
      }
      Term t{double(sp.size()), 0.0, diagonal};
      if (best) {
        t.dice = 2 * best_n / (double(sp.size()) + double(g_pts[best].size()));
        t.hausdorff = hausdorff_all_pairs(shape(g_pts[best]), shape(sp));
      } else if (!g_pts.empty()) {
        t.hausdorff = std::numeric_limits<double>::infinity();
        for (const auto& [g, gp] : g_pts) t.hausdorff = std::min(t.hausdorff, hausdorff_all_pairs(shape(gp), shape(sp)));
      }
      seg_terms.push_back(t);
    }
  }

  if (gt_terms.empty() && seg_terms.empty()) return {1.0, 0.0};
  double g_total = 0, s_total = 0;
  for (const auto& t : gt_terms) g_total += t.area;
  for (const auto& t : seg_terms) s_total += t.area;
  double dg = 0, ds = 0, hg = 0, hs = 0;
  for (const auto& t : gt_terms) {
    dg += t.area / g_total * t.dice;
    hg += t.area / g_total * t.hausdorff;
  }
  for (const auto& t : seg_terms) {
    ds += t.area / s_total * t.dice;
    hs += t.area / s_total * t.hausdorff;
  }
  return {0.5 * (dg + ds), 0.5 * (hg + hs)};
}

// ---------------------------------------------------------------------------
// Random instances

// A blob: union of 1-3 random discs/ellipses inside width x height, never
// empty.
inline std::vector<Point> random_blob(std::mt19937_64& rng, int width, int height) {
  std::uniform_int_distribution<int> parts(1, 3);
  std::set<Point> pts;
  const int n = parts(rng);
  const int max_r = std::max(1, std::min(width, height) / 4);
  std::uniform_int_distribution<int> cr(0, height - 1), cc(0, width - 1), rad(0, max_r);
  for (int k = 0; k < n; ++k) {
    const int r0 = cr(rng), c0 = cc(rng), ry = rad(rng), rx = rad(rng);
    for (int r = std::max(0, r0 - ry); r <= std::min(height - 1, r0 + ry); ++r) {
      for (int c = std::max(0, c0 - rx); c <= std::min(width - 1, c0 + rx); ++c) {
        const double y = ry ? double(r - r0) / ry : 0.0;
        const double x = rx ? double(c - c0) / rx : 0.0;
        if (x * x + y * y <= 1.0) pts.insert({r, c});
      }
    }
  }
  if (pts.empty()) pts.insert({cr(rng), cc(rng)});
  return {pts.begin(), pts.end()};
}

// Label vector with up to `max_objects` blobs painted in order (later blobs
// overwrite earlier ones).
inline std::vector<std::uint32_t> random_label_vector(std::mt19937_64& rng, int width, int height,
                                                      int max_objects) {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(width) * height, 0);
  const int n = std::uniform_int_distribution<int>(0, max_objects)(rng);
  for (int k = 1; k <= n; ++k) {
    for (const auto& [r, c] : random_blob(rng, width, height)) {
      out[static_cast<std::size_t>(r) * width + c] = static_cast<std::uint32_t>(k);
    }
  }
  return out;
}

// Segmentation loosely derived from `gt`: each object is kept, shifted,
// dropped or merged into a neighbour's id, and a few spurious blobs are added.
inline std::vector<std::uint32_t> random_prediction(std::mt19937_64& rng, const std::vector<std::uint32_t>& gt,
                                                    int width, int height) {
  std::vector<std::uint32_t> out(gt.size(), 0);
  std::uniform_int_distribution<int> action(0, 5), off(-3, 3);
  std::map<std::uint32_t, std::pair<int, int>> shift;
  std::map<std::uint32_t, std::uint32_t> rename;
  std::set<std::uint32_t> drop;
  std::uint32_t max_label = 0;
  for (auto v : gt) max_label = std::max(max_label, v);
  for (std::uint32_t l = 1; l <= max_label; ++l) {
    const int a = action(rng);
    rename[l] = l + 100;
    if (a == 0) drop.insert(l);
    if (a == 1 || a == 2) shift[l] = {off(rng), off(rng)};
    if (a == 3 && l > 1) rename[l] = l + 99;  // merge with previous id
  }
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto l = gt[static_cast<std::size_t>(r) * width + c];
      if (l == 0 || drop.count(l)) continue;
      auto [dr, dc] = shift.count(l) ? shift[l] : std::pair<int, int>{0, 0};
      const int nr = r + dr, nc = c + dc;
      if (nr < 0 || nc < 0 || nr >= height || nc >= width) continue;
      out[static_cast<std::size_t>(nr) * width + nc] = rename[l];
    }
  }
  const int spurious = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int k = 0; k < spurious; ++k) {
    for (const auto& [r, c] : random_blob(rng, width, height)) {
      auto& v = out[static_cast<std::size_t>(r) * width + c];
      if (v == 0) v = static_cast<std::uint32_t>(500 + k);
    }
  }
  return out;
}

inline RawImage random_pair(std::mt19937_64& rng, int min_side, int max_side, int max_objects) {
  std::uniform_int_distribution<int> side(min_side, max_side);
  RawImage im;
  im.width = side(rng);
  im.height = side(rng);
  im.gt = random_label_vector(rng, im.width, im.height, max_objects);
  im.seg = random_prediction(rng, im.gt, im.width, im.height);
  return im;
}

}  // namespace glas::oracle

#endif  // GLAS_ORACLE_HPP_
