#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "atlas/embedding.hpp"
#include "atlas/forecaster.hpp"
#include "atlas/grid.hpp"
#include "atlas/panel.hpp"
#include "atlas/survival.hpp"
#include "atlas/synth.hpp"
#include "atlas/window_select.hpp"

namespace atlas {

struct PeriodicGaps {
  double fraction = 0.0;  // share of series that receive gaps; 0 disables
  std::size_t period = 0;
  std::size_t length = 0;
};

struct PipelineConfig {
  /// Data source: a CSV file, or the synthetic generator when unset.
  std::optional<std::filesystem::path> csv;
  CsvLayout layout = CsvLayout::rows_are_time;
  SynthConfig synth;
  PeriodicGaps gaps;
  bool random_deletion = false;

  std::vector<std::size_t> candidates;  // empty: default_candidates(m)
  double epsilon = 0.01;
  std::optional<std::size_t> rho;       // skip the sweep when set
  ScanOptions scan;
  EmbeddingOptions embedding;
  ForecastOptions forecast;

  std::size_t horizon = 4;
  /// Hold out the last `horizon` stamps and score the forecasts on them.
  bool holdout = true;
  bool denormalize = false;
  std::uint64_t seed = 7;

  std::filesystem::path out_dir;
  bool verbose = false;

  /// Propagates `seed` to the generator, communities, and embeddings.
  void apply_seed(std::uint64_t s);
};

struct PipelineResult {
  SeriesPanel panel;
  DensityCurve curve;
  std::size_t rho = 0;
  RegimeCatalog catalog;
  MappingGrid grid;  // training stamps only
  SurvivalModel survival;
  std::vector<Forecast> forecasts;
  std::size_t b_train = 0;
  nlohmann::json report;
};

/// ingest, sweep, select, canonicalize, grid, embed, survival, transitions,
/// forecast, score. Every artifact is written to cfg.out_dir when it is set.
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// Per-stamp ARI between grid cells and generator labels, over series
/// observed at that stamp.
std::vector<double> grid_ari(const MappingGrid& grid, const GroundTruth& truth, const GapMask& gaps);

/// Majority generator label of series i inside stamp j.
int truth_label(const GroundTruth& truth, std::size_t series, std::size_t stamp, std::size_t rho);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace atlas
