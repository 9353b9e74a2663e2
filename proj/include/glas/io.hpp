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
#ifndef GLAS_IO_HPP_
#define GLAS_IO_HPP_

#include <png.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "glas/baseline.hpp"
#include "glas/errors.hpp"
#include "glas/label_map.hpp"
#include "glas/metrics.hpp"
#include "glas/ranking.hpp"
#include <nlohmann/json.hpp>

namespace glas {

inline constexpr const char* kToolName = "glas-eval";
inline constexpr const char* kToolVersion = "1.0.0";

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Raw files

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// PNG

// Decoded PNG samples, one per pixel. Multi-channel images are rejected at
// decode time.
struct PngRaster {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  bool palette = false;
  std::vector<std::uint32_t> samples;
};

namespace detail {

struct PngFile {
  std::FILE* fp = nullptr;
  explicit PngFile(std::FILE* f) : fp(f) {}
  ~PngFile() {
    if (fp) std::fclose(fp);
  }
  PngFile(const PngFile&) = delete;
  PngFile& operator=(const PngFile&) = delete;
};

inline void png_error_handler(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  if (message) *message = msg;
  png_longjmp(png, 1);
}

inline void png_warning_handler(png_structp, png_const_charp) {}

inline bool has_png_signature(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::array<unsigned char, 8> sig{};
  in.read(reinterpret_cast<char*>(sig.data()), sig.size());
  return in.gcount() == 8 && png_sig_cmp(sig.data(), 0, 8) == 0;
}

// libpng reports errors through longjmp, so the decode body avoids owning
// non-trivial objects across the setjmp boundary.
inline bool decode_png(std::FILE* fp, PngRaster& out, std::string& error) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  if (!png) {
    error = "out of memory";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    error = "out of memory";
    return false;
  }
  std::vector<png_bytep>* rows = new std::vector<png_bytep>();
  std::vector<unsigned char>* buffer = new std::vector<unsigned char>();
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    delete rows;
    delete buffer;
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_PALETTE) {
    error = "multi-channel PNG (colour type " + std::to_string(color) +
            ") is not a label image; convert it to 8/16-bit single-channel or palette PNG";
    png_destroy_read_struct(&png, &info, nullptr);
    delete rows;
    delete buffer;
    return false;
  }
  if (depth < 8) png_set_packing(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer->resize(rowbytes * height);
  rows->resize(height);
  for (png_uint_32 r = 0; r < height; ++r) (*rows)[r] = buffer->data() + r * rowbytes;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);

  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  out.bit_depth = depth;
  out.palette = color == PNG_COLOR_TYPE_PALETTE;
  out.samples.resize(static_cast<std::size_t>(width) * height);
  for (png_uint_32 r = 0; r < height; ++r) {
    const unsigned char* row = (*rows)[r];
    for (png_uint_32 c = 0; c < width; ++c) {
      out.samples[static_cast<std::size_t>(r) * width + c] =
          depth == 16 ? (static_cast<std::uint32_t>(row[2 * c]) << 8) | row[2 * c + 1] : row[c];
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  delete rows;
  delete buffer;
  return true;
}

inline bool encode_png(std::FILE* fp, int width, int height, int depth, const std::vector<unsigned char>& data,
                       std::string& error) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  if (!png) {
    error = "out of memory";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    error = "out of memory";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t rowbytes = static_cast<std::size_t>(width) * (depth / 8);
  for (int r = 0; r < height; ++r) {
    png_write_row(png, const_cast<png_bytep>(data.data() + static_cast<std::size_t>(r) * rowbytes));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace detail

inline PngRaster read_png(const fs::path& path) {
  detail::PngFile file(std::fopen(path.string().c_str(), "rb"));
  if (!file.fp) throw IoError("cannot open '" + path.string() + "' for reading");
  PngRaster raster;
  std::string error;
  if (!detail::decode_png(file.fp, raster, error)) {
    throw FormatError("'" + path.string() + "': " + error);
  }
  return raster;
}

// Writes a single-channel PNG of the given bit depth (8 or 16) from samples.
inline void write_gray_png(const fs::path& path, int width, int height, std::span<const std::uint32_t> samples,
                           int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ValueError("PNG bit depth must be 8 or 16");
  const std::uint32_t limit = bit_depth == 8 ? 0xFFu : 0xFFFFu;
  std::vector<unsigned char> data;
  data.reserve(samples.size() * (bit_depth / 8));
  for (auto v : samples) {
    if (v > limit) {
      throw ValueError("value " + std::to_string(v) + " does not fit a " + std::to_string(bit_depth) +
                       "-bit PNG");
    }
    if (bit_depth == 16) data.push_back(static_cast<unsigned char>(v >> 8));
    data.push_back(static_cast<unsigned char>(v & 0xFF));
  }
  detail::PngFile file(std::fopen(path.string().c_str(), "wb"));
  if (!file.fp) throw IoError("cannot open '" + path.string() + "' for writing");
  std::string error;
  if (!detail::encode_png(file.fp, width, height, bit_depth, data, error)) {
    throw IoError("'" + path.string() + "': " + error);
  }
}

// ---------------------------------------------------------------------------
// Plain-text grids

inline std::vector<std::vector<std::uint64_t>> parse_text_grid(const std::string& text, const std::string& origin) {
  std::vector<std::vector<std::uint64_t>> grid;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    std::vector<std::uint64_t> row;
    while (tokens >> tok) {
      if (tok[0] == '-') {
        throw ValueError(origin + ":" + std::to_string(line_no) + ": negative label '" + tok + "'");
      }
      errno = 0;
      char* end = nullptr;
      const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0') {
        throw FormatError(origin + ":" + std::to_string(line_no) + ": '" + tok + "' is not an integer");
      }
      if (errno == ERANGE || v > std::numeric_limits<Label>::max()) {
        throw ValueError(origin + ":" + std::to_string(line_no) + ": label '" + tok + "' overflows 32 bits");
      }
      row.push_back(v);
    }
    if (!row.empty()) grid.push_back(std::move(row));
  }
  return grid;
}

inline std::string format_text_grid(const LabelMap& map) {
  std::string out;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (c) out.push_back(' ');
      out += std::to_string(map.at(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Label and intensity images

// PNG (8/16-bit gray: value = label; palette: index = label) or a
// whitespace-separated text grid, detected by the PNG signature.
inline LabelMap load_label_image(const fs::path& path) {
  if (detail::has_png_signature(path)) {
    PngRaster raster = read_png(path);
    std::vector<Label> labels(raster.samples.begin(), raster.samples.end());
    return LabelMap(raster.width, raster.height, std::move(labels));
  }
  try {
    return LabelMap::from_grid(parse_text_grid(read_text_file(path), path.string()));
  } catch (const ShapeError& e) {
    throw ShapeError("'" + path.string() + "': " + e.what());
  }
}

// Writes labels as a grayscale PNG. bit_depth 0 picks 8 when every label fits
// a byte and 16 otherwise.
inline void write_label_png(const LabelMap& map, const fs::path& path, int bit_depth = 0) {
  if (bit_depth == 0) bit_depth = map.max_label() <= 0xFF ? 8 : 16;
  std::vector<std::uint32_t> samples(map.labels().begin(), map.labels().end());
  write_gray_png(path, map.width(), map.height(), samples, bit_depth);
}

inline void write_label_text(const LabelMap& map, const fs::path& path) {
  write_text_file(path, format_text_grid(map));
}

// 8-bit gray PNG, 16-bit gray PNG (scaled to 8 bits) or a text grid of
// 0..255 intensities.
inline GrayImage load_gray_image(const fs::path& path) {
  GrayImage img;
  if (detail::has_png_signature(path)) {
    const PngRaster raster = read_png(path);
    if (raster.palette) {
      throw FormatError("'" + path.string() + "': palette PNG is not a grayscale intensity image");
    }
    img = GrayImage(raster.width, raster.height);
    for (std::size_t i = 0; i < raster.samples.size(); ++i) {
      std::uint32_t v = raster.samples[i];
      if (raster.bit_depth == 16) {
        v >>= 8;
      } else if (raster.bit_depth < 8) {
        v = v * 255 / ((1u << raster.bit_depth) - 1);
      }
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
    return img;
  }
  const auto grid = parse_text_grid(read_text_file(path), path.string());
  const LabelMap values = LabelMap::from_grid(grid);
  img = GrayImage(values.width(), values.height());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (values.labels()[i] > 255) {
      throw ValueError("'" + path.string() + "': intensity exceeds 255");
    }
    img.pixels[i] = static_cast<std::uint8_t>(values.labels()[i]);
  }
  return img;
}

inline void write_gray_png(const GrayImage& image, const fs::path& path) {
  std::vector<std::uint32_t> samples(image.pixels.begin(), image.pixels.end());
  write_gray_png(path, image.width, image.height, samples, 8);
}

// ---------------------------------------------------------------------------
// Manifests

struct ManifestRecord {
  std::string id;
  fs::path ground_truth;
  fs::path prediction;
};

struct EvalManifest {
  std::vector<ManifestRecord> records;
  std::optional<std::string> name;
  std::optional<std::string> test_part;
  std::optional<double> pixel_size_um;
};

// {"dataset": {"name", "test_part", "pixel_size_um"},
//  "images": [{"id", "ground_truth", "prediction"}, ...]}
// Relative paths resolve against the manifest's directory.
inline EvalManifest parse_manifest(const std::string& text, const fs::path& base_dir, bool check_files = true) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array()) {
    throw ValidationError("manifest must be an object with an 'images' array");
  }
  EvalManifest m;
  if (doc.contains("dataset")) {
    const Json& ds = doc["dataset"];
    if (!ds.is_object()) throw ValidationError("manifest 'dataset' must be an object");
    for (const char* field : {"name", "test_part"}) {
      if (ds.contains(field) && !ds[field].is_string()) {
        throw ValidationError(std::string("manifest dataset '") + field + "' must be a string");
      }
    }
    if (ds.contains("name")) m.name = ds["name"].get<std::string>();
    if (ds.contains("test_part")) m.test_part = ds["test_part"].get<std::string>();
    if (ds.contains("pixel_size_um")) {
      if (!ds["pixel_size_um"].is_number() || !(ds["pixel_size_um"].get<double>() > 0)) {
        throw ValidationError("manifest 'pixel_size_um' must be a positive number");
      }
      m.pixel_size_um = ds["pixel_size_um"].get<double>();
    }
  }
  std::set<std::string> ids;
  std::size_t k = 0;
  for (const Json& rec : doc["images"]) {
    for (const char* field : {"id", "ground_truth", "prediction"}) {
      if (!rec.is_object() || !rec.contains(field) || !rec[field].is_string()) {
        throw ValidationError("manifest image " + std::to_string(k) + ": missing string field '" + field + "'");
      }
    }
    ManifestRecord r{rec["id"].get<std::string>(), rec["ground_truth"].get<std::string>(),
                     rec["prediction"].get<std::string>()};
    if (!ids.insert(r.id).second) throw ValidationError("duplicate image id '" + r.id + "' in manifest");
    if (r.ground_truth.is_relative()) r.ground_truth = base_dir / r.ground_truth;
    if (r.prediction.is_relative()) r.prediction = base_dir / r.prediction;
    if (check_files) {
      for (const fs::path& p : {r.ground_truth, r.prediction}) {
        if (!fs::is_regular_file(p)) {
          throw ValidationError("image '" + r.id + "': file '" + p.string() + "' does not exist");
        }
      }
    }
    m.records.push_back(std::move(r));
    ++k;
  }
  return m;
}

inline EvalManifest load_manifest(const fs::path& path) {
  return parse_manifest(read_text_file(path), path.parent_path());
}

inline std::vector<ImagePair> load_pairs(const EvalManifest& manifest) {
  std::vector<ImagePair> pairs;
  for (const auto& r : manifest.records) {
    try {
      pairs.push_back({r.id, load_label_image(r.ground_truth), load_label_image(r.prediction)});
    } catch (...) {
      rethrow_with_context(std::current_exception(), "image '" + r.id + "': ");
    }
  }
  return pairs;
}

inline Json manifest_to_json(const EvalManifest& m) {
  Json doc;
  Json ds = Json::object();
  if (m.name) ds["name"] = *m.name;
  if (m.test_part) ds["test_part"] = *m.test_part;
  if (m.pixel_size_um) ds["pixel_size_um"] = *m.pixel_size_um;
  doc["dataset"] = ds;
  doc["images"] = Json::array();
  for (const auto& r : m.records) {
    doc["images"].push_back({{"id", r.id}, {"ground_truth", r.ground_truth.generic_string()},
                             {"prediction", r.prediction.generic_string()}});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Score tables (CSV)

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// RFC 4180 subset: commas, double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

// Header row: `entry,<metric>:<part>,...`; second row: `direction,higher|lower,...`;
// then one row per entry. Lines starting with '#' and blank lines are ignored.
inline ScoreTable parse_scores(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(detail::split_csv_line(t));
  }
  if (rows.size() < 2) throw ValidationError("score table needs a header row and a direction row");
  const auto& header = rows[0];
  const auto& dir = rows[1];
  if (header.size() < 2) throw ValidationError("score table header names no score columns");
  if (dir.empty() || dir[0] != "direction") {
    throw ValidationError("second row of the score table must start with 'direction'");
  }
  if (dir.size() != header.size()) throw ValidationError("direction row length differs from header");
  ScoreTable table;
  for (std::size_t c = 1; c < header.size(); ++c) {
    ScoreColumn col;
    const auto colon = header[c].find(':');
    col.metric = header[c].substr(0, colon);
    col.part = colon == std::string::npos ? "" : header[c].substr(colon + 1);
    if (col.metric.empty()) throw ValidationError("score column " + std::to_string(c) + " has no metric name");
    if (dir[c] == "higher") {
      col.direction = Direction::kHigherBetter;
    } else if (dir[c] == "lower") {
      col.direction = Direction::kLowerBetter;
    } else {
      throw ValidationError("column '" + header[c] + "': direction must be 'higher' or 'lower', got '" + dir[c] +
                            "'");
    }
    table.columns.push_back(col);
  }
  for (std::size_t r = 2; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string name = row[0];
    if (name.empty()) throw ValidationError("score row " + std::to_string(r + 1) + " has no entry name");
    std::vector<double> values;
    for (std::size_t c = 1; c < header.size(); ++c) {
      if (c >= row.size() || row[c].empty()) {
        throw ValidationError("entry '" + name + "', column '" + header[c] + "': missing score");
      }
      char* end = nullptr;
      const double v = std::strtod(row[c].c_str(), &end);
      if (end == row[c].c_str() || *end != '\0') {
        throw ValidationError("entry '" + name + "', column '" + header[c] + "': '" + row[c] +
                              "' is not a number");
      }
      values.push_back(v);
    }
    if (row.size() > header.size()) {
      throw ValidationError("entry '" + name + "' has more cells than the header");
    }
    table.entries.push_back(name);
    table.values.push_back(std::move(values));
  }
  validate(table);
  return table;
}

inline ScoreTable load_scores(const fs::path& path) { return parse_scores(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Reports

inline std::string display3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ReportDocument {
  MetricReport metrics;
  EvalManifest dataset;  // metadata only; records are not echoed
  std::optional<Leaderboard> leaderboard;
  std::string generated_at;
};

inline Json config_to_json(const EvalConfig& c, const std::optional<double>& pixel_size) {
  Json j;
  j["connectivity"] = static_cast<int>(c.connectivity);
  j["split_components"] = c.split_components;
  j["hausdorff_mode"] = to_string(c.hausdorff_mode);
  j["ari_background"] = to_string(c.ari_background);
  j["tp_threshold"] = c.tp_threshold;
  j["pixel_size_um"] = pixel_size ? Json(*pixel_size) : Json(nullptr);
  return j;
}

inline Json metrics_to_json(const ImageMetrics& m, const std::optional<double>& pixel_size) {
  Json j;
  j["id"] = m.id;
  j["n_gt"] = m.n_gt;
  j["n_seg"] = m.n_seg;
  j["tp"] = m.counts.tp;
  j["fp"] = m.counts.fp;
  j["fn"] = m.counts.fn;
  j["precision"] = m.f1.precision;
  j["recall"] = m.f1.recall;
  j["f1"] = m.f1.f1;
  j["dice_pixel"] = m.dice_pixel;
  j["dice_obj"] = m.dice_obj;
  j["hausdorff_obj"] = m.hausdorff_obj;
  if (pixel_size) j["hausdorff_obj_um"] = m.hausdorff_obj * *pixel_size;
  j["ari"] = m.ari ? Json(*m.ari) : Json(nullptr);
  j["display"] = {{"f1", display3(m.f1.f1)},
                  {"dice_obj", display3(m.dice_obj)},
                  {"hausdorff_obj", display3(m.hausdorff_obj)},
                  {"ari", m.ari ? display3(*m.ari) : "n/a"}};
  return j;
}

inline Json leaderboard_to_json(const Leaderboard& board) {
  Json j;
  j["columns"] = Json::array();
  for (const auto& c : board.columns) {
    j["columns"].push_back({{"metric", c.metric}, {"part", c.part}, {"direction", to_string(c.direction)}});
  }
  j["final_order"] = Json::array();
  int position = 0;
  for (std::size_t e : board.final_order) {
    ++position;
    j["final_order"].push_back(
        {{"position", position}, {"entry", board.entries[e]}, {"ranks", board.ranks[e]},
         {"rank_sum", board.rank_sums[e]}, {"tied_sum", static_cast<bool>(board.tied_sum[e])}});
  }
  return j;
}

inline Json report_to_json(const ReportDocument& doc) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["generated_at"] = doc.generated_at;
  j["config"] = config_to_json(doc.metrics.config, doc.dataset.pixel_size_um);
  Json ds = Json::object();
  if (doc.dataset.name) ds["name"] = *doc.dataset.name;
  if (doc.dataset.test_part) ds["test_part"] = *doc.dataset.test_part;
  ds["images"] = doc.metrics.per_image.size();
  j["dataset"] = ds;
  j["pooled"] = metrics_to_json(doc.metrics.pooled, doc.dataset.pixel_size_um);
  j["per_image"] = Json::array();
  for (const auto& m : doc.metrics.per_image) {
    j["per_image"].push_back(metrics_to_json(m, doc.dataset.pixel_size_um));
  }
  if (doc.leaderboard) j["leaderboard"] = leaderboard_to_json(*doc.leaderboard);
  return j;
}

inline std::string report_to_csv(const ReportDocument& doc) {
  std::string out =
      "id,n_gt,n_seg,tp,fp,fn,precision,recall,f1,dice_pixel,dice_obj,hausdorff_obj,ari,"
      "f1_3dp,dice_obj_3dp,hausdorff_obj_3dp,ari_3dp\n";
  auto row = [&](const ImageMetrics& m) {
    out += detail::csv_escape(m.id) + "," + std::to_string(m.n_gt) + "," + std::to_string(m.n_seg) + "," +
           std::to_string(m.counts.tp) + "," + std::to_string(m.counts.fp) + "," + std::to_string(m.counts.fn) +
           "," + full_precision(m.f1.precision) + "," + full_precision(m.f1.recall) + "," +
           full_precision(m.f1.f1) + "," + full_precision(m.dice_pixel) + "," + full_precision(m.dice_obj) + "," +
           full_precision(m.hausdorff_obj) + "," + (m.ari ? full_precision(*m.ari) : "") + "," +
           display3(m.f1.f1) + "," + display3(m.dice_obj) + "," + display3(m.hausdorff_obj) + "," +
           (m.ari ? display3(*m.ari) : "") + "\n";
  };
  for (const auto& m : doc.metrics.per_image) row(m);
  row(doc.metrics.pooled);
  return out;
}

enum class ReportFormat { kJson, kCsv };

inline ReportFormat report_format_for(const fs::path& path) {
  return path.extension() == ".csv" ? ReportFormat::kCsv : ReportFormat::kJson;
}

inline void write_report(const ReportDocument& doc, ReportFormat format, const fs::path& path) {
  write_text_file(path, format == ReportFormat::kJson ? report_to_json(doc).dump(2) + "\n" : report_to_csv(doc));
}

inline std::string leaderboard_to_csv(const Leaderboard& board, const ScoreTable& scores) {
  std::string out = "position,entry";
  for (const auto& c : board.columns) out += "," + detail::csv_escape(c.name()) + "," + detail::csv_escape(c.name() + " rank");
  out += ",rank_sum,tied_sum\n";
  int position = 0;
  for (std::size_t e : board.final_order) {
    out += std::to_string(++position) + "," + detail::csv_escape(board.entries[e]);
    for (std::size_t c = 0; c < board.columns.size(); ++c) {
      out += "," + full_precision(scores.values[e][c]) + "," + std::to_string(board.ranks[e][c]);
    }
    out += "," + std::to_string(board.rank_sums[e]) + "," + (board.tied_sum[e] ? "true" : "false") + "\n";
  }
  return out;
}

inline void write_leaderboard(const Leaderboard& board, const ScoreTable& scores, const fs::path& path) {
  if (report_format_for(path) == ReportFormat::kCsv) {
    write_text_file(path, leaderboard_to_csv(board, scores));
  } else {
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["leaderboard"] = leaderboard_to_json(board);
    write_text_file(path, j.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// Configuration files

namespace detail {

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

inline std::optional<int> read_threshold(const Json& j, const char* key, std::optional<int> fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "otsu") return std::nullopt;
  if (v.is_number_integer()) return v.get<int>();
  throw ValidationError(std::string("field '") + key + "' must be an integer intensity or \"otsu\"");
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(what + " is not valid JSON: " + e.what());
  }
}

}  // namespace detail

inline SegmenterConfig parse_segmenter_config(const std::string& text) {
  const Json j = detail::parse_json(text, "segmenter config");
  if (!j.is_object()) throw ValidationError("segmenter config must be a JSON object");
  SegmenterConfig c;
  c.nuclei_threshold = detail::read_threshold(j, "nuclei_threshold", c.nuclei_threshold);
  c.lumen_threshold = detail::read_threshold(j, "lumen_threshold", c.lumen_threshold);
  detail::read_field(j, "min_seed_area", c.min_seed_area);
  detail::read_field(j, "barrier_dilation_radius", c.barrier_dilation_radius);
  detail::read_field(j, "min_object_area", c.min_object_area);
  detail::read_field(j, "fill_holes", c.fill_holes);
  detail::read_field(j, "max_growth_ratio", c.max_growth_ratio);
  int conn = static_cast<int>(c.connectivity);
  detail::read_field(j, "connectivity", conn);
  c.connectivity = connectivity_from_int(conn);
  c.validate();
  return c;
}

struct SynthCorpusSpec {
  SynthSpec image;
  int images = 1;  // seeds image.seed, image.seed + 1, ...
  // Gland count cycles through [glands_min, glands_max] when both are set,
  // otherwise every image has image.glands.
  std::optional<int> glands_min;
  std::optional<int> glands_max;
};

// Spec of image k of a corpus.
inline SynthSpec corpus_image_spec(const SynthCorpusSpec& corpus, int k) {
  SynthSpec s = corpus.image;
  s.seed = corpus.image.seed + static_cast<std::uint64_t>(k);
  if (corpus.glands_min && corpus.glands_max) {
    s.glands = *corpus.glands_min + k % (*corpus.glands_max - *corpus.glands_min + 1);
  }
  return s;
}

inline SynthCorpusSpec parse_synth_spec(const std::string& text) {
  const Json j = detail::parse_json(text, "synthesis spec");
  if (!j.is_object()) throw ValidationError("synthesis spec must be a JSON object");
  SynthCorpusSpec s;
  auto& im = s.image;
  detail::read_field(j, "width", im.width);
  detail::read_field(j, "height", im.height);
  detail::read_field(j, "glands", im.glands);
  detail::read_field(j, "radius_min", im.radius_min);
  detail::read_field(j, "radius_max", im.radius_max);
  detail::read_field(j, "ring_min", im.ring_min);
  detail::read_field(j, "ring_max", im.ring_max);
  detail::read_field(j, "min_gap", im.min_gap);
  detail::read_field(j, "noise", im.noise);
  detail::read_field(j, "seed", im.seed);
  detail::read_field(j, "max_attempts", im.max_attempts);
  detail::read_field(j, "images", s.images);
  if (s.images < 0) throw ValueError("images must be >= 0");
  if (j.contains("glands_min") != j.contains("glands_max")) {
    throw ValidationError("glands_min and glands_max must be given together");
  }
  if (j.contains("glands_min")) {
    int lo = 0, hi = 0;
    detail::read_field(j, "glands_min", lo);
    detail::read_field(j, "glands_max", hi);
    if (lo < 0 || hi < lo) throw ValueError("need 0 <= glands_min <= glands_max");
    s.glands_min = lo;
    s.glands_max = hi;
  }
  im.validate();
  return s;
}

}  // namespace glas

#endif  // GLAS_IO_HPP_
