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
#include <png.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "glas/io.hpp"

namespace glas {
namespace {

using Grid = std::vector<std::vector<int>>;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("glas_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

// Writes an 8-bit PNG of the given colour type with libpng directly.
void write_raw_png(const fs::path& path, int width, int height, int color_type, const std::vector<unsigned char>& data,
                   int channels, const std::vector<png_color>& palette = {}) {
  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  ASSERT_NE(fp, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (!palette.empty()) png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  png_write_info(png, info);
  for (int r = 0; r < height; ++r) {
    png_write_row(png, const_cast<unsigned char*>(data.data() + static_cast<std::size_t>(r) * width * channels));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

TEST_F(IoTest, SixteenBitRoundTripIsExact) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<Label> label(0, 65535);
  std::vector<Label> v(37 * 23);
  for (auto& l : v) l = label(rng);
  const LabelMap m(37, 23, v);
  write_label_png(m, path("labels.png"), 16);
  EXPECT_EQ(read_png(path("labels.png")).bit_depth, 16);
  EXPECT_EQ(load_label_image(path("labels.png")), m);
}

TEST_F(IoTest, AutoDepthPicksEightBitsWhenLabelsFit) {
  const auto m = LabelMap::from_grid(Grid{{0, 1, 255}, {3, 3, 0}});
  write_label_png(m, path("small.png"));
  EXPECT_EQ(read_png(path("small.png")).bit_depth, 8);
  EXPECT_EQ(load_label_image(path("small.png")), m);
  const auto big = LabelMap::from_grid(Grid{{0, 256}});
  write_label_png(big, path("big.png"));
  EXPECT_EQ(read_png(path("big.png")).bit_depth, 16);
  EXPECT_THROW(write_label_png(LabelMap::from_grid(Grid{{70000}}), path("x.png"), 16), ValueError);
}

TEST_F(IoTest, RgbPngIsRejected) {
  write_raw_png(path("rgb.png"), 2, 2, PNG_COLOR_TYPE_RGB, std::vector<unsigned char>(12, 9), 3);
  EXPECT_THROW(load_label_image(path("rgb.png")), FormatError);
  EXPECT_THROW(load_gray_image(path("rgb.png")), FormatError);
}

TEST_F(IoTest, PaletteIndexIsTheLabel) {
  const std::vector<png_color> palette{{0, 0, 0}, {255, 0, 0}, {0, 255, 0}};
  write_raw_png(path("pal.png"), 3, 1, PNG_COLOR_TYPE_PALETTE, {2, 0, 1}, 1, palette);
  const auto m = load_label_image(path("pal.png"));
  EXPECT_EQ(m.at(0, 0), 2u);
  EXPECT_EQ(m.at(0, 1), 0u);
  EXPECT_EQ(m.at(0, 2), 1u);
  EXPECT_THROW(load_gray_image(path("pal.png")), FormatError);
}

TEST_F(IoTest, CorruptPngIsFormatError) {
  write_text_file(path("bad.png"), std::string("\x89PNG\r\n\x1a\n garbage", 17));
  EXPECT_THROW(load_label_image(path("bad.png")), FormatError);
  EXPECT_THROW(load_label_image(path("missing.png")), IoError);
}

TEST_F(IoTest, TextGridRoundTrip) {
  const auto m = LabelMap::from_grid(Grid{{0, 12, 12}, {4000000, 0, 1}});
  write_label_text(m, path("grid.txt"));
  EXPECT_EQ(load_label_image(path("grid.txt")), m);
}

TEST_F(IoTest, TextGridErrors) {
  EXPECT_THROW(parse_text_grid("1 -2\n", "t"), ValueError);
  EXPECT_THROW(parse_text_grid("1 x\n", "t"), FormatError);
  EXPECT_THROW(parse_text_grid("99999999999\n", "t"), ValueError);
  write_text_file(path("ragged.txt"), "1 2\n3\n");
  EXPECT_THROW(load_label_image(path("ragged.txt")), ShapeError);
}

TEST_F(IoTest, GrayImageFromSixteenBitPngKeepsHighByte) {
  const std::vector<std::uint32_t> samples{0, 0x1234, 0xFFFF};
  write_gray_png(path("g16.png"), 3, 1, samples, 16);
  const auto img = load_gray_image(path("g16.png"));
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{0, 0x12, 0xFF}));
}

TEST(ScoresTest, BundledFixtureLoads) {
  const auto t = load_scores(fs::path(GLAS_TEST_DATA_DIR) / "table2.csv");
  EXPECT_EQ(t.entries.size(), 10u);
  EXPECT_EQ(t.columns.size(), 6u);
  EXPECT_EQ(t.columns[4].name(), "H_obj:A");
  EXPECT_EQ(t.columns[4].direction, Direction::kLowerBetter);
  EXPECT_DOUBLE_EQ(t.values[0][0], 0.912);
}

TEST(ScoresTest, SingleRowTable) {
  const auto t = parse_scores("entry,F1:A\ndirection,higher\nsolo,0.5\n");
  EXPECT_EQ(t.entries, std::vector<std::string>{"solo"});
  EXPECT_EQ(rank_sum(t).rank_sums, std::vector<int>{1});
}

TEST(ScoresTest, BlankCellNamesEntryAndColumn) {
  try {
    parse_scores("entry,F1:A,H_obj:A\ndirection,higher,lower\nteam,0.5,\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("team"), std::string::npos);
    EXPECT_NE(msg.find("H_obj:A"), std::string::npos);
  }
}

TEST(ScoresTest, MalformedTables) {
  EXPECT_THROW(parse_scores("entry,F1:A\n"), ValidationError);
  EXPECT_THROW(parse_scores("entry,F1:A\nsense,higher\nx,1\n"), ValidationError);
  EXPECT_THROW(parse_scores("entry,F1:A\ndirection,up\nx,1\n"), ValidationError);
  EXPECT_THROW(parse_scores("entry,F1:A\ndirection,higher\nx,abc\n"), ValidationError);
  EXPECT_THROW(parse_scores("entry,F1:A\ndirection,higher\nx,1\nx,2\n"), ValidationError);
  EXPECT_THROW(parse_scores("entry,H_obj:A\ndirection,higher\nx,1\n"), ValidationError);
}

TEST(ScoresTest, QuotedNamesAndComments) {
  const auto t = parse_scores("# comment\nentry,F1:A\ndirection,higher\n\"Team, Inc\",0.7\n");
  EXPECT_EQ(t.entries[0], "Team, Inc");
}

TEST_F(IoTest, ManifestResolvesRelativePaths) {
  const auto m = LabelMap::from_grid(Grid{{1, 0}, {0, 2}});
  write_label_png(m, path("gt.png"));
  write_label_text(m, path("pred.txt"));
  write_text_file(path("manifest.json"), R"({"dataset": {"name": "toy", "test_part": "A", "pixel_size_um": 0.62},
      "images": [{"id": "one", "ground_truth": "gt.png", "prediction": "pred.txt"}]})");
  const auto manifest = load_manifest(path("manifest.json"));
  EXPECT_EQ(manifest.name, "toy");
  EXPECT_EQ(manifest.test_part, "A");
  EXPECT_DOUBLE_EQ(*manifest.pixel_size_um, 0.62);
  const auto pairs = load_pairs(manifest);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].gt, pairs[0].seg);
}

TEST_F(IoTest, ManifestErrors) {
  EXPECT_THROW(parse_manifest("{", dir_), FormatError);
  EXPECT_THROW(parse_manifest(R"({"images": {}})", dir_), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"images": [{"id": "a"}]})", dir_), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"images": [{"id": "a", "ground_truth": "nope.png", "prediction": "nope.png"}]})",
                              dir_),
               ValidationError);
  EXPECT_THROW(parse_manifest(R"({"images": [{"id": "a", "ground_truth": "g", "prediction": "p"},
                                             {"id": "a", "ground_truth": "g", "prediction": "p"}]})",
                              dir_, false),
               ValidationError);
  EXPECT_THROW(parse_manifest(R"({"dataset": {"pixel_size_um": -1}, "images": []})", dir_), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"dataset": {"name": 3}, "images": []})", dir_), ValidationError);
}

TEST_F(IoTest, ShapeMismatchInManifestNamesImage) {
  write_label_text(LabelMap::from_grid(Grid{{1, 1}}), path("a.txt"));
  write_label_text(LabelMap::from_grid(Grid{{1}, {1}}), path("b.txt"));
  write_text_file(path("m.json"), R"({"images": [{"id": "odd", "ground_truth": "a.txt", "prediction": "b.txt"}]})");
  try {
    evaluate(load_pairs(load_manifest(path("m.json"))));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("odd"), std::string::npos);
  }
}

ReportDocument identity_report() {
  const auto m = LabelMap::from_grid(Grid{{1, 1, 0}, {0, 2, 2}});
  std::vector<ImagePair> pairs{{"x", m, m}, {"y", m, m}};
  ReportDocument doc;
  doc.metrics = evaluate(pairs);
  doc.dataset.name = "identity";
  doc.generated_at = "2026-01-01T00:00:00Z";
  return doc;
}

TEST_F(IoTest, IdentityReportHasPerfectPooledRow) {
  const Json j = report_to_json(identity_report());
  const Json& pooled = j["pooled"];
  EXPECT_EQ(pooled["f1"].get<double>(), 1.0);
  EXPECT_EQ(pooled["dice_obj"].get<double>(), 1.0);
  EXPECT_EQ(pooled["hausdorff_obj"].get<double>(), 0.0);
  EXPECT_EQ(pooled["ari"].get<double>(), 1.0);
  EXPECT_EQ(pooled["display"]["dice_obj"], "1.000");
  EXPECT_EQ(j["per_image"].size(), 2u);
  EXPECT_EQ(j["dataset"]["name"], "identity");
}

TEST_F(IoTest, ReportsAreByteStableApartFromTimestamp) {
  auto a = identity_report();
  auto b = identity_report();
  b.generated_at = "2030-12-31T23:59:59Z";
  write_report(a, ReportFormat::kJson, path("a.json"));
  write_report(b, ReportFormat::kJson, path("b.json"));
  auto strip = [](std::string s) {
    const auto k = s.find("\"generated_at\"");
    const auto e = s.find('\n', k);
    return s.erase(k, e - k);
  };
  EXPECT_EQ(strip(read_text_file(path("a.json"))), strip(read_text_file(path("b.json"))));
  write_report(a, ReportFormat::kCsv, path("a.csv"));
  write_report(b, ReportFormat::kCsv, path("b.csv"));
  EXPECT_EQ(read_text_file(path("a.csv")), read_text_file(path("b.csv")));
}

TEST_F(IoTest, CsvReportPrintsFullAndDisplayPrecision) {
  auto doc = identity_report();
  doc.metrics.per_image[0].dice_obj = 2.0 / 3.0;
  const std::string csv = report_to_csv(doc);
  EXPECT_NE(csv.find("0.66666666666666663"), std::string::npos);
  EXPECT_NE(csv.find(",0.667,"), std::string::npos);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "id,n_gt,n_seg,tp,fp,fn,precision,recall,f1,dice_pixel,dice_obj,hausdorff_obj,ari,"
            "f1_3dp,dice_obj_3dp,hausdorff_obj_3dp,ari_3dp");
}

TEST_F(IoTest, PixelSizeAddsMicronColumn) {
  auto doc = identity_report();
  doc.dataset.pixel_size_um = 0.5;
  const Json j = report_to_json(doc);
  EXPECT_TRUE(j["pooled"].contains("hausdorff_obj_um"));
  EXPECT_EQ(j["config"]["pixel_size_um"].get<double>(), 0.5);
}

TEST_F(IoTest, UnwritablePathIsIoError) {
  EXPECT_THROW(write_report(identity_report(), ReportFormat::kJson, dir_ / "no" / "such" / "dir.json"), IoError);
}

TEST(ConfigTest, SegmenterConfigParsing) {
  const auto c = parse_segmenter_config(R"({"nuclei_threshold": 60, "lumen_threshold": "otsu", "min_object_area": 50})");
  EXPECT_EQ(c.nuclei_threshold, 60);
  EXPECT_FALSE(c.lumen_threshold.has_value());
  EXPECT_EQ(c.min_object_area, 50u);
  EXPECT_THROW(parse_segmenter_config(R"({"nuclei_threshold": "high"})"), ValidationError);
  EXPECT_THROW(parse_segmenter_config("[1]"), ValidationError);
}

TEST(ConfigTest, SynthSpecGlandRange) {
  const auto s = parse_synth_spec(R"({"images": 4, "glands_min": 3, "glands_max": 4, "seed": 10})");
  EXPECT_EQ(corpus_image_spec(s, 0).glands, 3);
  EXPECT_EQ(corpus_image_spec(s, 1).glands, 4);
  EXPECT_EQ(corpus_image_spec(s, 2).glands, 3);
  EXPECT_EQ(corpus_image_spec(s, 3).seed, 13u);
  EXPECT_THROW(parse_synth_spec(R"({"glands_min": 3})"), ValidationError);
  EXPECT_THROW(parse_synth_spec(R"({"glands_min": 5, "glands_max": 3})"), ValueError);
}

}  // namespace
}  // namespace glas
