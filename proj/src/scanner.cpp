#include "atlas/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "atlas/error.hpp"

namespace atlas {

std::vector<double> Subseries::dense() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (v) out.push_back(*v);
  }
  return out;
}

std::size_t stamp_count(std::size_t n_stamps, std::size_t rho) {
  return rho == 0 ? 0 : n_stamps / rho;
}

std::vector<StampSubseries> window_split(const SeriesPanel& panel, const GapMask& gaps,
                                         std::size_t rho) {
  const std::size_t m = panel.n_stamps();
  if (rho < 2 || rho > m) {
    throw ConfigError("window size must satisfy 2 <= rho <= m (rho = " + std::to_string(rho) +
                      ", m = " + std::to_string(m) + ")");
  }
  const std::size_t b = stamp_count(m, rho);
  std::vector<StampSubseries> out(b);
  for (std::size_t j = 0; j < b; ++j) {
    out[j].stamp = j;
    out[j].members.resize(panel.n_series());
    for (std::size_t i = 0; i < panel.n_series(); ++i) {
      Subseries& s = out[j].members[i];
      s.series = i;
      s.stamp = j;
      s.values.resize(rho);
      s.observed = true;
      for (std::size_t k = 0; k < rho; ++k) {
        const std::size_t l = j * rho + k;
        if (gaps.missing(i, l) || !panel.at(i, l)) {
          s.observed = false;
        } else {
          s.values[k] = panel.at(i, l);
        }
      }
    }
  }
  return out;
}

int sax_symbol(double v, int symbols) {
  if (v < -1e-9 || v > 1.0 + 1e-9) {
    throw DataError("value " + std::to_string(v) + " lies outside [0, 1]");
  }
  const int a = static_cast<int>(std::floor(symbols * v)) + 1;
  return std::clamp(a, 1, symbols);
}

std::vector<int> sax_encode(std::span<const double> values, int symbols) {
  std::vector<int> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [symbols](double v) { return sax_symbol(v, symbols); });
  return out;
}

Eigen::SparseMatrix<int, Eigen::RowMajor> MembershipMatrix::gram() const {
  Eigen::SparseMatrix<int, Eigen::RowMajor> t = delta.transpose();
  return delta * t;
}

MembershipMatrix membership_matrix(const StampSubseries& slice, int symbols) {
  MembershipMatrix mm;
  mm.stamp = slice.stamp;
  mm.symbols = symbols;
  std::vector<Eigen::Triplet<int>> triplets;
  for (const auto& s : slice.members) {
    if (!s.observed) continue;
    mm.rho = s.values.size();
    const auto row = static_cast<int>(mm.rows.size());
    mm.rows.push_back(s.series);
    for (std::size_t l = 0; l < s.values.size(); ++l) {
      const int a = sax_symbol(*s.values[l], symbols);
      triplets.emplace_back(row, static_cast<int>(l) * symbols + (a - 1), 1);
    }
  }
  mm.delta.resize(static_cast<Eigen::Index>(mm.rows.size()),
                  static_cast<Eigen::Index>(mm.rho) * symbols);
  mm.delta.setFromTriplets(triplets.begin(), triplets.end());
  return mm;
}

StampNetwork::StampNetwork(std::size_t stamp, std::size_t rho, std::vector<std::size_t> nodes)
    : stamp_(stamp),
      rho_(rho),
      nodes_(std::move(nodes)),
      upper_(nodes_.size() < 2 ? 0 : nodes_.size() * (nodes_.size() - 1) / 2, 0) {}

std::size_t StampNetwork::index(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  // Row a holds n-1-a entries; offset of row a is a*n - a*(a+1)/2.
  const std::size_t n = nodes_.size();
  return a * n - a * (a + 1) / 2 + (b - a - 1);
}

int StampNetwork::weight(std::size_t a, std::size_t b) const {
  if (a == b) return 0;
  return upper_[index(a, b)];
}

void StampNetwork::set_weight(std::size_t a, std::size_t b, int w) {
  if (a == b) return;
  upper_[index(a, b)] = static_cast<std::uint16_t>(w);
}

std::vector<StampNetwork::Edge> StampNetwork::edges() const {
  std::vector<Edge> out;
  const std::size_t n = nodes_.size();
  std::size_t k = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b, ++k) {
      if (upper_[k] > 0) out.push_back({a, b, upper_[k]});
    }
  }
  return out;
}

std::size_t StampNetwork::edge_count() const {
  return static_cast<std::size_t>(
      std::count_if(upper_.begin(), upper_.end(), [](std::uint16_t w) { return w > 0; }));
}

StampNetwork StampNetwork::subnetwork(std::span<const std::size_t> positions) const {
  std::vector<std::size_t> ids;
  ids.reserve(positions.size());
  for (std::size_t p : positions) ids.push_back(nodes_[p]);
  StampNetwork sub(stamp_, rho_, std::move(ids));
  for (std::size_t x = 0; x < positions.size(); ++x) {
    for (std::size_t y = x + 1; y < positions.size(); ++y) {
      sub.set_weight(x, y, weight(positions[x], positions[y]));
    }
  }
  return sub;
}

StampNetwork network_from_symbols(std::size_t stamp, std::size_t rho,
                                  std::vector<std::size_t> nodes,
                                  std::span<const std::uint8_t> symbols) {
  StampNetwork net(stamp, rho, std::move(nodes));
  const std::size_t n = net.size();
  for (std::size_t a = 0; a < n; ++a) {
    const std::uint8_t* row_a = symbols.data() + a * rho;
    for (std::size_t b = a + 1; b < n; ++b) {
      const std::uint8_t* row_b = symbols.data() + b * rho;
      int shared = 0;
      for (std::size_t l = 0; l < rho; ++l) shared += (row_a[l] == row_b[l]);
      net.set_weight(a, b, shared);
    }
  }
  return net;
}

StampNetwork build_network(const StampSubseries& slice, int symbols) {
  std::vector<std::size_t> nodes;
  std::vector<std::uint8_t> codes;
  std::size_t rho = 0;
  for (const auto& s : slice.members) {
    rho = s.values.size();
    if (!s.observed) continue;
    nodes.push_back(s.series);
    for (const auto& v : s.values) codes.push_back(static_cast<std::uint8_t>(sax_symbol(*v, symbols)));
  }
  return network_from_symbols(slice.stamp, rho, std::move(nodes), codes);
}

std::vector<std::uint8_t> symbolize_panel(const SeriesPanel& panel, int symbols) {
  std::vector<std::uint8_t> out(panel.n_series() * panel.n_stamps(), 0);
  for (std::size_t i = 0; i < panel.n_series(); ++i) {
    for (std::size_t l = 0; l < panel.n_stamps(); ++l) {
      if (const auto& v = panel.at(i, l)) {
        out[i * panel.n_stamps() + l] = static_cast<std::uint8_t>(sax_symbol(*v, symbols));
      }
    }
  }
  return out;
}

std::vector<StampNetwork> build_networks(const std::vector<std::uint8_t>& symbols,
                                         std::size_t n_series, std::size_t n_stamps,
                                         std::size_t rho) {
  if (rho < 2 || rho > n_stamps) {
    throw ConfigError("window size must satisfy 2 <= rho <= m (rho = " + std::to_string(rho) +
                      ", m = " + std::to_string(n_stamps) + ")");
  }
  const std::size_t b = stamp_count(n_stamps, rho);
  std::vector<StampNetwork> out;
  out.reserve(b);
  std::vector<std::uint8_t> block;
  for (std::size_t j = 0; j < b; ++j) {
    std::vector<std::size_t> nodes;
    block.clear();
    for (std::size_t i = 0; i < n_series; ++i) {
      const std::uint8_t* row = symbols.data() + i * n_stamps + j * rho;
      if (std::find(row, row + rho, std::uint8_t{0}) != row + rho) continue;
      nodes.push_back(i);
      block.insert(block.end(), row, row + rho);
    }
    out.push_back(network_from_symbols(j, rho, std::move(nodes), block));
  }
  return out;
}

void write_edge_list(const StampNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& e : net.edges()) {
    out << net.nodes()[e.a] + 1 << ' ' << net.nodes()[e.b] + 1 << ' ' << e.weight << '\n';
  }
}

}  // namespace atlas
