#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "atlas/panel.hpp"

namespace atlas {

inline constexpr int kDefaultSymbols = 10;

/// Values of one series inside one window-stamp.
struct Subseries {
  std::size_t series = 0;
  std::size_t stamp = 0;  // 0-based window instance
  std::vector<std::optional<double>> values;
  bool observed = false;  // false as soon as one value is missing

  /// Present values; only meaningful when observed.
  std::vector<double> dense() const;
};

struct StampSubseries {
  std::size_t stamp = 0;
  std::vector<Subseries> members;  // one per series, in series order
};

/// Number of complete window instances of size rho over m stamps.
std::size_t stamp_count(std::size_t n_stamps, std::size_t rho);

/// Splits every series into floor(m / rho) contiguous subseries; the
/// trailing remainder is dropped.
std::vector<StampSubseries> window_split(const SeriesPanel& panel, const GapMask& gaps,
                                         std::size_t rho);

/// Symbol index g_a (1-based) of a normalized value: a = floor(symbols * v) + 1,
/// with v = 1.0 clamped into the top symbol.
int sax_symbol(double v, int symbols = kDefaultSymbols);

std::vector<int> sax_encode(std::span<const double> values, int symbols = kDefaultSymbols);

/// Binary subseries x (time-step, symbol) matrix of one stamp. Column
/// symbols*l + (a-1) is set when time-step l carries symbol g_a.
struct MembershipMatrix {
  std::size_t stamp = 0;
  std::size_t rho = 0;
  int symbols = kDefaultSymbols;
  std::vector<std::size_t> rows;  // series index per row
  Eigen::SparseMatrix<int, Eigen::RowMajor> delta;

  /// delta * delta^T: shared (time-step, symbol) counts for all row pairs.
  Eigen::SparseMatrix<int, Eigen::RowMajor> gram() const;
};

MembershipMatrix membership_matrix(const StampSubseries& slice, int symbols = kDefaultSymbols);

/// Weighted network of the observed subseries at one stamp.
class StampNetwork {
 public:
  struct Edge {
    std::size_t a;  // node positions, a < b
    std::size_t b;
    int weight;
  };

  StampNetwork() = default;
  StampNetwork(std::size_t stamp, std::size_t rho, std::vector<std::size_t> nodes);

  std::size_t stamp() const { return stamp_; }
  std::size_t rho() const { return rho_; }
  /// Series index of each node position, ascending.
  const std::vector<std::size_t>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  int weight(std::size_t a, std::size_t b) const;
  void set_weight(std::size_t a, std::size_t b, int w);

  /// Positive-weight edges, a < b, in row-major order.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  /// Induced subnetwork on the given node positions (kept in the given order).
  StampNetwork subnetwork(std::span<const std::size_t> positions) const;

 private:
  std::size_t index(std::size_t a, std::size_t b) const;

  std::size_t stamp_ = 0;
  std::size_t rho_ = 0;
  std::vector<std::size_t> nodes_;
  std::vector<std::uint16_t> upper_;  // strict upper triangle, row-major
};

/// Network from already-discretized subseries: symbols is row-major
/// nodes.size() x rho.
StampNetwork network_from_symbols(std::size_t stamp, std::size_t rho,
                                  std::vector<std::size_t> nodes,
                                  std::span<const std::uint8_t> symbols);

StampNetwork build_network(const StampSubseries& slice, int symbols = kDefaultSymbols);

/// Per-time-step symbols of a whole panel (0 marks a gap), row-major N x m.
/// Symbols do not depend on the window size, so sweeps compute this once.
std::vector<std::uint8_t> symbolize_panel(const SeriesPanel& panel, int symbols = kDefaultSymbols);

/// Networks of every stamp for window size rho from a symbolized panel.
std::vector<StampNetwork> build_networks(const std::vector<std::uint8_t>& symbols,
                                         std::size_t n_series, std::size_t n_stamps,
                                         std::size_t rho);

/// Writes `i k weight` lines (1-based series positions).
void write_edge_list(const StampNetwork& net, const std::filesystem::path& path);

}  // namespace atlas
