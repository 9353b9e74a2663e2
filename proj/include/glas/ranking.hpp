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
#ifndef GLAS_RANKING_HPP_
#define GLAS_RANKING_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "glas/errors.hpp"

namespace glas {

enum class Direction { kHigherBetter, kLowerBetter };

inline const char* to_string(Direction d) {
  return d == Direction::kHigherBetter ? "higher" : "lower";
}

struct ScoreColumn {
  std::string metric;  // e.g. "F1", "Dice_obj", "H_obj"
  std::string part;    // e.g. "A"
  Direction direction = Direction::kHigherBetter;

  std::string name() const { return part.empty() ? metric : metric + ":" + part; }
};

// Entries x columns of scores, every cell present.
struct ScoreTable {
  std::vector<std::string> entries;
  std::vector<ScoreColumn> columns;
  std::vector<std::vector<double>> values;  // values[entry][column]
};

struct Leaderboard {
  std::vector<std::string> entries;          // input order
  std::vector<ScoreColumn> columns;
  std::vector<std::vector<int>> ranks;       // ranks[entry][column]
  std::vector<int> rank_sums;                // per entry, input order
  std::vector<std::size_t> final_order;      // entry indices, best first
  std::vector<bool> tied_sum;                // per entry: shares its rank sum with another entry
};

// Standard competition ranking: 1 + the number of strictly better scores, so
// a k-way tie at position p takes p and the next distinct score takes p + k.
inline std::vector<int> rank_column(std::span<const double> scores, Direction direction) {
  if (scores.empty()) throw ValidationError("cannot rank an empty score column");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) {
      throw InvalidScoreError("score " + std::to_string(i) + " is NaN");
    }
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  if (direction == Direction::kHigherBetter) {
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
  } else {
    std::sort(sorted.begin(), sorted.end());
  }
  std::vector<int> ranks;
  ranks.reserve(scores.size());
  for (double s : scores) {
    const auto better = direction == Direction::kHigherBetter
                            ? std::lower_bound(sorted.begin(), sorted.end(), s, std::greater<>())
                            : std::lower_bound(sorted.begin(), sorted.end(), s);
    ranks.push_back(static_cast<int>(better - sorted.begin()) + 1);
  }
  return ranks;
}

inline bool is_hausdorff_metric(const std::string& metric) {
  std::string m;
  for (char c : metric) m.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return m.rfind("h_obj", 0) == 0 || m.find("hausdorff") != std::string::npos;
}

inline void validate(const ScoreTable& table) {
  if (table.entries.empty()) throw ValidationError("score table has no entries");
  if (table.columns.empty()) throw ValidationError("score table has no columns");
  std::set<std::string> seen;
  for (const auto& e : table.entries) {
    if (!seen.insert(e).second) throw ValidationError("duplicate entry name '" + e + "'");
  }
  std::set<std::string> column_names;
  for (const auto& c : table.columns) {
    if (!column_names.insert(c.name()).second) {
      throw ValidationError("duplicate column '" + c.name() + "'");
    }
    const bool lower = c.direction == Direction::kLowerBetter;
    if (lower != is_hausdorff_metric(c.metric)) {
      throw ValidationError("column '" + c.name() + "' must be " +
                            (is_hausdorff_metric(c.metric) ? "lower" : "higher") + "-better");
    }
  }
  if (table.values.size() != table.entries.size()) {
    throw ValidationError("score table has " + std::to_string(table.values.size()) + " rows for " +
                          std::to_string(table.entries.size()) + " entries");
  }
  for (std::size_t e = 0; e < table.entries.size(); ++e) {
    if (table.values[e].size() != table.columns.size()) {
      throw ValidationError("entry '" + table.entries[e] + "' has " +
                            std::to_string(table.values[e].size()) + " scores, expected " +
                            std::to_string(table.columns.size()));
    }
  }
}

// Ranks every column, sums ranks per entry and orders entries by ascending
// rank sum. Equal sums are ordered by entry name and flagged in tied_sum.
inline Leaderboard rank_sum(const ScoreTable& table) {
  validate(table);
  const std::size_t n = table.entries.size();
  Leaderboard board;
  board.entries = table.entries;
  board.columns = table.columns;
  board.ranks.assign(n, std::vector<int>(table.columns.size(), 0));
  board.rank_sums.assign(n, 0);
  std::vector<double> column(n);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    for (std::size_t e = 0; e < n; ++e) column[e] = table.values[e][c];
    std::vector<int> r;
    try {
      r = rank_column(column, table.columns[c].direction);
    } catch (const InvalidScoreError& err) {
      throw InvalidScoreError("column '" + table.columns[c].name() + "': " + err.what());
    }
    for (std::size_t e = 0; e < n; ++e) {
      board.ranks[e][c] = r[e];
      board.rank_sums[e] += r[e];
    }
  }
  board.final_order.resize(n);
  std::iota(board.final_order.begin(), board.final_order.end(), std::size_t{0});
  std::sort(board.final_order.begin(), board.final_order.end(), [&](std::size_t a, std::size_t b) {
    if (board.rank_sums[a] != board.rank_sums[b]) return board.rank_sums[a] < board.rank_sums[b];
    return board.entries[a] < board.entries[b];
  });
  board.tied_sum.assign(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && board.rank_sums[a] == board.rank_sums[b]) board.tied_sum[a] = true;
    }
  }
  return board;
}

// Restriction of a table to the named columns, in the given order.
inline ScoreTable select_columns(const ScoreTable& table, std::span<const std::string> names) {
  ScoreTable out;
  out.entries = table.entries;
  out.values.assign(table.entries.size(), {});
  for (const auto& name : names) {
    auto it = std::find_if(table.columns.begin(), table.columns.end(),
                           [&](const ScoreColumn& c) { return c.name() == name; });
    if (it == table.columns.end()) throw NotFoundError("no column named '" + name + "'");
    const auto c = static_cast<std::size_t>(it - table.columns.begin());
    out.columns.push_back(*it);
    for (std::size_t e = 0; e < table.entries.size(); ++e) out.values[e].push_back(table.values[e][c]);
  }
  return out;
}

}  // namespace glas

#endif  // GLAS_RANKING_HPP_
