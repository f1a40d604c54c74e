#include "atlas/grid.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "atlas/error.hpp"

namespace atlas {

namespace {

const std::vector<double> kNoFeature;

}  // namespace

MappingGrid::MappingGrid(std::size_t K, std::size_t b, std::size_t n_series, std::size_t rho)
    : K_(K),
      b_(b),
      n_series_(n_series),
      rho_(rho),
      cells_(b, std::vector<std::vector<std::size_t>>(K + 1)),
      features_(b, std::vector<std::vector<double>>(n_series)) {}

const std::vector<std::size_t>& MappingGrid::cell(int label, std::size_t stamp) const {
  if (label < 0 || static_cast<std::size_t>(label) > K_ || stamp >= b_) {
    throw ConfigError("grid cell (" + std::to_string(label) + ", " + std::to_string(stamp) +
                      ") out of range");
  }
  return cells_[stamp][static_cast<std::size_t>(label)];
}

void MappingGrid::add(int label, std::size_t stamp, std::size_t series) {
  if (label < 0 || static_cast<std::size_t>(label) > K_ || stamp >= b_ || series >= n_series_) {
    throw ConfigError("grid insertion out of range");
  }
  auto& c = cells_[stamp][static_cast<std::size_t>(label)];
  c.insert(std::lower_bound(c.begin(), c.end(), series), series);
}

int MappingGrid::label_of(std::size_t series, std::size_t stamp) const {
  if (series >= n_series_ || stamp >= b_) {
    throw ConfigError("series " + std::to_string(series) + " at stamp " + std::to_string(stamp) +
                      " is outside the grid");
  }
  for (std::size_t r = 0; r <= K_; ++r) {
    const auto& c = cells_[stamp][r];
    if (std::binary_search(c.begin(), c.end(), series)) return static_cast<int>(r);
  }
  throw StageError("grid", "series " + std::to_string(series) + " has no cell at stamp " +
                               std::to_string(stamp));
}

const std::vector<double>& MappingGrid::feature(std::size_t series, std::size_t stamp) const {
  if (series >= n_series_ || stamp >= b_) return kNoFeature;
  return features_[stamp][series];
}

void MappingGrid::set_feature(std::size_t series, std::size_t stamp, std::vector<double> f) {
  if (series >= n_series_ || stamp >= b_) throw ConfigError("feature index out of range");
  features_[stamp][series] = std::move(f);
}

void MappingGrid::append_column(const std::vector<int>& labels) {
  if (labels.size() != n_series_) throw ConfigError("new grid column has the wrong length");
  cells_.emplace_back(K_ + 1);
  features_.emplace_back(n_series_);
  ++b_;
  for (std::size_t i = 0; i < n_series_; ++i) add(labels[i], b_ - 1, i);
}

void MappingGrid::check() const {
  for (std::size_t j = 0; j < b_; ++j) {
    std::vector<int> seen(n_series_, 0);
    for (const auto& c : cells_[j]) {
      for (std::size_t i : c) ++seen[i];
    }
    for (std::size_t i = 0; i < n_series_; ++i) {
      if (seen[i] != 1) {
        throw StageError("grid", "series " + std::to_string(i) + " appears " +
                                     std::to_string(seen[i]) + " times at stamp " +
                                     std::to_string(j));
      }
    }
  }
}

bool MappingGrid::operator==(const MappingGrid& other) const {
  return K_ == other.K_ && b_ == other.b_ && n_series_ == other.n_series_ &&
         rho_ == other.rho_ && cells_ == other.cells_ && features_ == other.features_;
}

MappingGrid build_grid(const RegimeCatalog& catalog, const std::vector<Partition>& partitions,
                       std::size_t n_series) {
  if (catalog.assignment.size() != partitions.size()) {
    throw StageError("grid", "catalog and partitions cover different stamp counts");
  }
  MappingGrid grid(catalog.K, partitions.size(), n_series, catalog.rho);
  for (std::size_t j = 0; j < partitions.size(); ++j) {
    std::vector<char> placed(n_series, 0);
    const auto& groups = partitions[j].groups;
    if (catalog.assignment[j].size() != groups.size()) {
      throw StageError("grid", "catalog assignment does not match partition at stamp " +
                                   std::to_string(j));
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t i : groups[g]) {
        if (i >= n_series || placed[i]) {
          throw StageError("grid", "series " + std::to_string(i) +
                                       " assigned twice at stamp " + std::to_string(j));
        }
        placed[i] = 1;
        grid.add(catalog.assignment[j][g], j, i);
      }
    }
    for (std::size_t i = 0; i < n_series; ++i) {
      if (!placed[i]) grid.add(0, j, i);
    }
  }
  return grid;
}

std::vector<int> trajectory(const MappingGrid& grid, std::size_t series, std::size_t up_to) {
  if (series >= grid.n_series()) throw ConfigError("unknown series " + std::to_string(series));
  if (up_to > grid.b()) {
    throw ConfigError("trajectory length " + std::to_string(up_to) + " exceeds " +
                      std::to_string(grid.b()) + " stamps");
  }
  std::vector<int> out(up_to);
  for (std::size_t j = 0; j < up_to; ++j) out[j] = grid.label_of(series, j);
  return out;
}

Lifespan lifespan(const MappingGrid& grid, int regime) {
  if (regime < 1 || static_cast<std::size_t>(regime) > grid.K()) {
    throw ConfigError("regime " + std::to_string(regime) + " is not in 1..K");
  }
  Lifespan out;
  out.regime = regime;
  for (std::size_t j = 0; j < grid.b(); ++j) {
    out.members.push_back(grid.cell(regime, j));
    out.counts.push_back(out.members.back().size());
  }
  return out;
}

nlohmann::json grid_to_json(const MappingGrid& grid) {
  nlohmann::json j;
  j["K"] = grid.K();
  j["b"] = grid.b();
  j["n_series"] = grid.n_series();
  j["rho"] = grid.rho();
  auto cells = nlohmann::json::array();
  auto feats = nlohmann::json::array();
  for (std::size_t s = 0; s < grid.b(); ++s) {
    auto column = nlohmann::json::array();
    for (std::size_t r = 0; r <= grid.K(); ++r) column.push_back(grid.cell(static_cast<int>(r), s));
    cells.push_back(std::move(column));
    auto fcol = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.n_series(); ++i) fcol.push_back(grid.feature(i, s));
    feats.push_back(std::move(fcol));
  }
  j["cells"] = std::move(cells);
  j["features"] = std::move(feats);
  return j;
}

MappingGrid grid_from_json(const nlohmann::json& j) {
  try {
    MappingGrid grid(j.at("K").get<std::size_t>(), j.at("b").get<std::size_t>(),
                     j.at("n_series").get<std::size_t>(), j.at("rho").get<std::size_t>());
    const auto& cells = j.at("cells");
    const auto& feats = j.at("features");
    for (std::size_t s = 0; s < grid.b(); ++s) {
      for (std::size_t r = 0; r <= grid.K(); ++r) {
        for (const auto& id : cells.at(s).at(r)) grid.add(static_cast<int>(r), s, id.get<std::size_t>());
      }
      for (std::size_t i = 0; i < grid.n_series(); ++i) {
        grid.set_feature(i, s, feats.at(s).at(i).get<std::vector<double>>());
      }
    }
    grid.check();
    return grid;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed grid: ") + e.what());
  }
}

void write_heatmap_csv(const MappingGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "regime";
  for (std::size_t s = 0; s < grid.b(); ++s) out << ",w" << s + 1;
  out << '\n';
  const double n = static_cast<double>(std::max<std::size_t>(grid.n_series(), 1));
  for (std::size_t k = 1; k <= grid.K() + 1; ++k) {
    const int r = k <= grid.K() ? static_cast<int>(k) : 0;
    out << 'R' << r;
    for (std::size_t s = 0; s < grid.b(); ++s) out << ',' << grid.cell(r, s).size() / n;
    out << '\n';
  }
}

}  // namespace atlas
