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
// glas: evaluate gland segmentations, rank leaderboards, run the baseline
// segmenter, generate synthetic corpora and run brute-force cross-checks.
//
// Exit codes: 0 success, 2 validation error, 3 computation error. Errors are
// also written to stderr as one JSON object.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glas/crosscheck.hpp"
#include "glas/glas.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;

int report_error(const char* category, const char* kind, const std::string& message) {
  glas::Json j;
  j["error"] = category;
  j["kind"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << std::endl;
  return std::string(category) == "validation" ? kExitValidation : kExitComputation;
}

struct EvaluateArgs {
  std::string manifest;
  std::string out;
  std::string hausdorff = "boundary";
  std::string ari = "include";
  double tp_threshold = 0.5;
  bool split = false;
  int connectivity = 8;
  unsigned jobs = 1;
  std::string scores;
};

int run_evaluate(const EvaluateArgs& a) {
  glas::EvalConfig config;
  config.hausdorff_mode = a.hausdorff == "full" ? glas::HausdorffMode::kFull : glas::HausdorffMode::kBoundary;
  config.ari_background = a.ari == "exclude" ? glas::AriBackground::kExclude : glas::AriBackground::kInclude;
  config.tp_threshold = a.tp_threshold;
  config.split_components = a.split;
  config.connectivity = glas::connectivity_from_int(a.connectivity);
  config.jobs = a.jobs;

  glas::ReportDocument doc;
  doc.dataset = glas::load_manifest(a.manifest);
  const auto pairs = glas::load_pairs(doc.dataset);
  doc.metrics = glas::evaluate(pairs, config);
  if (!a.scores.empty()) doc.leaderboard = glas::rank_sum(glas::load_scores(a.scores));
  doc.generated_at = glas::utc_timestamp();
  glas::write_report(doc, glas::report_format_for(a.out), a.out);

  const auto& p = doc.metrics.pooled;
  std::printf("images=%zu F1=%s Dice_obj=%s H_obj=%s ARI=%s\n", doc.metrics.per_image.size(),
              glas::display3(p.f1.f1).c_str(), glas::display3(p.dice_obj).c_str(),
              glas::display3(p.hausdorff_obj).c_str(), p.ari ? glas::display3(*p.ari).c_str() : "n/a");
  return 0;
}

int run_rank(const std::string& scores_path, const std::string& out, const std::vector<std::string>& columns) {
  glas::ScoreTable scores = glas::load_scores(scores_path);
  if (!columns.empty()) scores = glas::select_columns(scores, columns);
  const glas::Leaderboard board = glas::rank_sum(scores);
  glas::write_leaderboard(board, scores, out);
  int position = 0;
  for (std::size_t e : board.final_order) {
    std::printf("%2d  %-20s %4d%s\n", ++position, board.entries[e].c_str(), board.rank_sums[e],
                board.tied_sum[e] ? "  (tied)" : "");
  }
  return 0;
}

int run_segment(const std::string& image_path, const std::string& config_path, const std::string& out) {
  const glas::SegmenterConfig config = config_path.empty()
                                           ? glas::SegmenterConfig{}
                                           : glas::parse_segmenter_config(glas::read_text_file(config_path));
  const glas::GrayImage image = glas::load_gray_image(image_path);
  const glas::LabelMap labels = glas::segment_region_growing(image, config);
  if (glas::fs::path(out).extension() == ".txt") {
    glas::write_label_text(labels, out);
  } else {
    glas::write_label_png(labels, out, 16);
  }
  std::printf("objects=%zu\n", labels.object_count());
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
  const glas::SynthCorpusSpec spec = glas::parse_synth_spec(glas::read_text_file(spec_path));
  glas::fs::create_directories(out_dir);
  glas::Json corpus;
  corpus["images"] = glas::Json::array();
  for (int k = 0; k < spec.images; ++k) {
    const glas::SynthSpec s = glas::corpus_image_spec(spec, k);
    const glas::SynthSample sample = glas::synth_glands(s);
    char stem[32];
    std::snprintf(stem, sizeof stem, "%04d", k);
    const std::string image_name = std::string("image_") + stem + ".png";
    const std::string truth_name = std::string("truth_") + stem + ".png";
    glas::write_gray_png(sample.image, glas::fs::path(out_dir) / image_name);
    glas::write_label_png(sample.truth, glas::fs::path(out_dir) / truth_name, 16);
    corpus["images"].push_back(
        {{"id", stem}, {"image", image_name}, {"truth", truth_name}, {"seed", s.seed}, {"glands", s.glands}});
  }
  glas::write_text_file(glas::fs::path(out_dir) / "corpus.json", corpus.dump(2) + "\n");
  std::printf("wrote %d images to %s\n", spec.images, out_dir.c_str());
  return 0;
}

int run_oracle(const std::string& suite, int count, std::uint64_t seed) {
  glas::CrossCheckResult res;
  if (suite == "hausdorff") {
    res = glas::crosscheck_hausdorff(count, seed);
  } else if (suite == "ari") {
    res = glas::crosscheck_ari(count, seed);
  } else {
    res = glas::crosscheck_object_level(count, seed);
  }
  glas::Json j;
  j["suite"] = res.suite;
  j["cases"] = res.cases;
  j["comparisons"] = res.comparisons;
  j["mismatches"] = res.mismatches;
  j["max_abs_diff"] = res.max_abs_diff;
  j["tolerance"] = res.tolerance;
  j["passed"] = res.ok();
  if (!res.first_failure.empty()) j["first_failure"] = res.first_failure;
  std::cout << j.dump(2) << std::endl;
  return res.ok() ? 0 : kExitComputation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object-level gland segmentation evaluation"};
  app.set_version_flag("--version", std::string(glas::kToolVersion));
  app.require_subcommand(1);

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate predictions listed in a manifest");
  evaluate->add_option("--manifest", eval.manifest, "JSON manifest of (id, ground_truth, prediction)")->required();
  evaluate->add_option("--out", eval.out, "Report path (.json or .csv)")->required();
  evaluate->add_option("--hausdorff", eval.hausdorff, "Hausdorff pixel set")
      ->check(CLI::IsMember({"boundary", "full"}));
  evaluate->add_option("--ari", eval.ari, "Background handling for ARI")->check(CLI::IsMember({"include", "exclude"}));
  evaluate->add_option("--tp-threshold", eval.tp_threshold, "Fraction of the ground-truth object a TP must cover")
      ->check(CLI::Range(0.0, 1.0));
  evaluate->add_flag("--split-components", eval.split, "Treat each connected region of a label as its own object");
  evaluate->add_option("--connectivity", eval.connectivity, "Connectivity for --split-components")
      ->check(CLI::IsMember({4, 8}));
  evaluate->add_option("--jobs", eval.jobs, "Parallel image workers")->check(CLI::Range(1u, 1024u));
  evaluate->add_option("--scores", eval.scores, "Optional score table to attach a leaderboard");

  std::string scores_path, rank_out;
  std::vector<std::string> columns;
  auto* rank = app.add_subcommand("rank", "Rank-sum leaderboard from a CSV score table");
  rank->add_option("--scores", scores_path, "CSV score table")->required();
  rank->add_option("--out", rank_out, "Leaderboard path (.json or .csv)")->required();
  rank->add_option("--columns", columns, "Rank only these columns (metric:part)");

  std::string image_path, config_path, segment_out;
  auto* segment = app.add_subcommand("segment", "Run the region-growing baseline segmenter");
  segment->add_option("--image", image_path, "Single-channel intensity image")->required();
  segment->add_option("--config", config_path, "Segmenter JSON config");
  segment->add_option("--out", segment_out, "Output label image (.png, or .txt grid)")->required();

  std::string spec_path, out_dir;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic gland corpus");
  synth->add_option("--spec", spec_path, "Synthesis JSON spec")->required();
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  std::string suite = "hausdorff";
  int count = 100;
  std::uint64_t seed = 1;
  auto* oracle = app.add_subcommand("oracle", "Cross-check fast metrics against brute-force oracles");
  oracle->add_option("--suite", suite, "Which cross-check to run")
      ->required()
      ->check(CLI::IsMember({"hausdorff", "ari", "objdice"}));
  oracle->add_option("--count", count, "Random instances")->check(CLI::Range(1, 1000000));
  oracle->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("validation", "usage", e.what());
  }

  try {
    if (*evaluate) return run_evaluate(eval);
    if (*rank) return run_rank(scores_path, rank_out, columns);
    if (*segment) return run_segment(image_path, config_path, segment_out);
    if (*synth) return run_synth(spec_path, out_dir);
    if (*oracle) return run_oracle(suite, count, seed);
  } catch (const glas::ValidationError& e) {
    return report_error("validation", e.kind(), e.what());
  } catch (const glas::ComputationError& e) {
    return report_error("computation", e.kind(), e.what());
  } catch (const glas::fs::filesystem_error& e) {
    return report_error("validation", "io", e.what());
  } catch (const std::exception& e) {
    return report_error("computation", "internal", e.what());
  }
  return 0;
}
