#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "atlas/error.hpp"
#include "atlas/pipeline.hpp"

using namespace atlas;

namespace {

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.synth.n_series = 60;
  cfg.synth.n_stamps = 600;
  cfg.synth.segment_length = 60;
  cfg.synth.noise_sd = 0.0;
  cfg.rho = 60;
  cfg.horizon = 2;
  cfg.embedding.epochs = 20;
  cfg.apply_seed(7);
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("truth label is the majority inside the stamp") {
  GroundTruth t;
  t.n_series = 1;
  t.n_stamps = 6;
  t.labels = {3, 3, 1, 2, 2, 2};
  CHECK(truth_label(t, 0, 0, 3) == 3);
  CHECK(truth_label(t, 0, 1, 3) == 2);
}

TEST_CASE("small synthetic run recovers the planted regimes and forecasts the holdout") {
  const auto dir = std::filesystem::temp_directory_path() / "atlas_pipeline_test";
  std::filesystem::remove_all(dir);
  PipelineConfig cfg = small_config();
  cfg.out_dir = dir;
  const PipelineResult r = run_pipeline(cfg);
  CHECK(r.rho == 60);
  CHECK(r.catalog.K == 5);
  CHECK(r.b_train == 8);
  CHECK(r.grid.b() == 8);
  CHECK(r.forecasts.size() == 2 * 60);
  CHECK(r.report["ari"]["min"].get<double>() >= 0.95);
  for (const char* f : {"panel.csv", "density_curve.csv", "regimes.json", "grid.json",
                        "grid_heatmap.csv", "survival.json", "survival_curves.csv",
                        "cox_coeffs.csv", "transitions.json", "theta_edges.csv",
                        "forecasts.csv", "report.json"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
  }
  const auto report = read_json(dir / "report.json");
  CHECK(report["K"] == 5);
  CHECK(report["horizons"].size() == 2);

  const auto dir2 = dir.string() + "_again";
  cfg.out_dir = dir2;
  run_pipeline(cfg);
  CHECK(slurp(dir / "report.json") == slurp(std::filesystem::path(dir2) / "report.json"));
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("errors keep their category") {
  PipelineConfig cfg = small_config();
  cfg.csv = "/nonexistent/panel.csv";
  CHECK_THROWS_AS(run_pipeline(cfg), DataError);
  PipelineConfig bad = small_config();
  bad.rho = 1;
  CHECK_THROWS_AS(run_pipeline(bad), ConfigError);
  PipelineConfig law = small_config();
  law.synth.switch_law = {RegimeLaw{0.5, 0.6, 0, 0, 0}};
  CHECK_THROWS_AS(run_pipeline(law), ConfigError);
}
