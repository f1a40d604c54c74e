#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "atlas/community.hpp"
#include "atlas/window_select.hpp"

namespace atlas {

/// (K+1) x b grid of series-id cells. Label 0 is the none-regime R^0 (the
/// missing row); labels 1..K are the global regimes.
class MappingGrid {
 public:
  MappingGrid() = default;
  MappingGrid(std::size_t K, std::size_t b, std::size_t n_series, std::size_t rho);

  std::size_t K() const { return K_; }
  std::size_t b() const { return b_; }
  std::size_t n_series() const { return n_series_; }
  std::size_t rho() const { return rho_; }

  /// Sorted members of cell (label, stamp).
  const std::vector<std::size_t>& cell(int label, std::size_t stamp) const;
  void add(int label, std::size_t stamp, std::size_t series);

  /// Label holding series i at stamp j.
  int label_of(std::size_t series, std::size_t stamp) const;

  /// Embedding of series i at stamp j (empty when the series is in R^0 or
  /// no embedding was attached).
  const std::vector<double>& feature(std::size_t series, std::size_t stamp) const;
  void set_feature(std::size_t series, std::size_t stamp, std::vector<double> f);

  /// Appends one column; labels[i] is series i's cell.
  void append_column(const std::vector<int>& labels);

  /// Throws StageError unless every column partitions the id set.
  void check() const;

  bool operator==(const MappingGrid& other) const;

 private:
  std::size_t K_ = 0;
  std::size_t b_ = 0;
  std::size_t n_series_ = 0;
  std::size_t rho_ = 0;
  std::vector<std::vector<std::vector<std::size_t>>> cells_;  // [stamp][label]
  std::vector<std::vector<std::vector<double>>> features_;    // [stamp][series]
};

/// Places each local group in the cell of its global regime; series with no
/// group at a stamp go to R^0.
MappingGrid build_grid(const RegimeCatalog& catalog, const std::vector<Partition>& partitions,
                       std::size_t n_series);

/// Regime labels of series i at stamps 0..up_to-1.
std::vector<int> trajectory(const MappingGrid& grid, std::size_t series, std::size_t up_to);

struct Lifespan {
  int regime = 0;
  std::vector<std::vector<std::size_t>> members;  // per stamp
  std::vector<std::size_t> counts;
};

Lifespan lifespan(const MappingGrid& grid, int regime);

nlohmann::json grid_to_json(const MappingGrid& grid);
MappingGrid grid_from_json(const nlohmann::json& j);

/// Rows are regimes 1..K then R^0; cell value |C^r_j| / N.
void write_heatmap_csv(const MappingGrid& grid, const std::filesystem::path& path);

}  // namespace atlas
