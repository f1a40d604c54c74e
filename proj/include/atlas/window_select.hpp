#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/community.hpp"
#include "atlas/panel.hpp"
#include "atlas/scanner.hpp"

namespace atlas {

/// How the two-segment code length treats each side of a split.
enum class MdlForm {
  /// log2(mean) + sum log2|x - mean| per side (the classic MDL pruning rule).
  deviation_from_mean,
  /// log2(mean) + sum log2|x - log2(mean)| per side, as literally printed.
  literal,
  /// Squared deviation of log2 scores from their side mean. Insensitive to
  /// single near-exact coincidences, which dominate the two forms above.
  log_least_squares,
};

MdlForm parse_mdl_form(const std::string& text);

/// What counts as the number of regimes in the density score.
enum class DensityMode {
  /// max_j K_j: the largest number of groups found at any single stamp.
  stamp_max,
  /// Distinct regimes left after matching groups across all stamps.
  distinct_regimes,
};

DensityMode parse_density_mode(const std::string& text);

struct ScanOptions {
  int symbols = kDefaultSymbols;
  CommunityOptions community;
  /// Normalized RMS distance under which two profile patterns are one regime.
  double theta_match = 0.15;
  MdlForm mdl = MdlForm::log_least_squares;
  DensityMode density = DensityMode::distinct_regimes;
};

/// Networks and partitions of every stamp for one window size.
struct ScanResult {
  std::size_t rho = 0;
  std::vector<StampNetwork> networks;
  std::vector<Partition> partitions;

  std::size_t max_groups() const;
};

ScanResult scan(const SeriesPanel& panel, std::size_t rho, const ScanOptions& options = {});
ScanResult scan_symbols(const std::vector<std::uint8_t>& symbols, std::size_t n_series,
                        std::size_t n_stamps, std::size_t rho, const ScanOptions& options);

/// Regime density: number of regimes per time-step of window.
double density_score(const SeriesPanel& panel, const ScanResult& result,
                     const ScanOptions& options = {});
double density_score(const SeriesPanel& panel, std::size_t rho, const ScanOptions& options = {});

struct DensityCurve {
  struct Entry {
    std::size_t rho;
    double score;
  };
  std::vector<Entry> entries;
  double epsilon = 0.0;
};

/// Candidate sizes a, a+step, ..., <= b.
std::vector<std::size_t> rho_range(std::size_t first, std::size_t last, std::size_t step);

/// Default candidates 2..min(m/4, 200), thinned to at most 60 values.
std::vector<std::size_t> default_candidates(std::size_t n_stamps);

/// Evaluates candidates in ascending order and stops once two successive
/// scores differ by less than epsilon.
DensityCurve sweep(const SeriesPanel& panel, const std::vector<std::size_t>& candidates,
                   double epsilon, const ScanOptions& options = {});

/// Code length of splitting the curve after entry `split` (0-based).
double split_code_length(const DensityCurve& curve, std::size_t split, MdlForm form);

/// Window size at the border between large and small scores: the first
/// (smallest) size of the low-score side of the minimum-code-length split.
/// Ties go to the earliest split.
std::size_t select_window(const DensityCurve& curve, MdlForm form = MdlForm::log_least_squares);

/// Global regimes recovered from the local groups of every stamp.
struct RegimeCatalog {
  std::size_t rho = 0;
  std::size_t K = 0;
  std::vector<ProfilePattern> profiles;  // index r-1 for regime r
  /// assignment[j][g] = regime label (1..K) of local group g at stamp j.
  std::vector<std::vector<int>> assignment;
};

/// Profile pattern values of every local group (stamp-major).
std::vector<std::vector<std::vector<double>>> group_centroids(const SeriesPanel& panel,
                                                              const ScanResult& scan);

/// Centroid-linkage agglomeration of local group centroids; two clusters
/// merge while their profiles are within theta_match (RMS distance).
RegimeCatalog canonicalize_regimes(const SeriesPanel& panel, const ScanResult& scan,
                                   double theta_match);

RegimeCatalog canonicalize_centroids(
    const std::vector<std::vector<std::vector<double>>>& centroids,
    const std::vector<std::vector<std::size_t>>& group_sizes, std::size_t rho,
    double theta_match);

nlohmann::json catalog_to_json(const RegimeCatalog& catalog);
RegimeCatalog catalog_from_json(const nlohmann::json& j);

void write_density_csv(const DensityCurve& curve, const std::filesystem::path& path);

}  // namespace atlas
