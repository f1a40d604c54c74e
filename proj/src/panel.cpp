#include "atlas/panel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "atlas/error.hpp"

namespace atlas {

double ScaleInfo::normalize(double x) const {
  if (constant) return 0.5;
  return (x - min) / (max - min);
}

double ScaleInfo::denormalize(double v) const {
  if (constant) return min;
  return min + v * (max - min);
}

GapMask::GapMask(std::size_t n_series, std::size_t n_stamps)
    : n_series_(n_series), n_stamps_(n_stamps), bits_(n_series * n_stamps, 0) {}

std::size_t GapMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

SeriesPanel::SeriesPanel(std::vector<std::string> ids, std::size_t n_stamps)
    : ids_(std::move(ids)),
      n_stamps_(n_stamps),
      values_(ids_.size() * n_stamps),
      scale_(ids_.size(), ScaleInfo{0.0, 1.0, false, false}) {}

SeriesPanel SeriesPanel::from_raw(std::vector<std::string> ids,
                                  const std::vector<std::vector<std::optional<double>>>& raw) {
  if (ids.size() != raw.size()) {
    throw DataError("series id count does not match number of series");
  }
  const std::size_t m = raw.empty() ? 0 : raw.front().size();
  for (const auto& row : raw) {
    if (row.size() != m) throw DataError("series have unequal lengths");
  }
  {
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DataError("duplicate series id");
    }
  }

  SeriesPanel panel(std::move(ids), m);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    ScaleInfo s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (const auto& v : raw[i]) {
      if (!v) continue;
      s.min = std::min(s.min, *v);
      s.max = std::max(s.max, *v);
    }
    if (s.min > s.max) {
      s = ScaleInfo{0.0, 0.0, false, true};
    } else if (s.min == s.max) {
      s.constant = true;
    }
    panel.scale_[i] = s;
    for (std::size_t l = 0; l < m; ++l) {
      if (raw[i][l]) panel.set(i, l, s.normalize(*raw[i][l]));
    }
  }
  return panel;
}

GapMask SeriesPanel::gap_mask() const {
  GapMask mask(n_series(), n_stamps_);
  for (std::size_t i = 0; i < n_series(); ++i) {
    for (std::size_t l = 0; l < n_stamps_; ++l) mask.set(i, l, !at(i, l).has_value());
  }
  return mask;
}

std::vector<std::optional<double>> SeriesPanel::denormalized(std::size_t i) const {
  std::vector<std::optional<double>> out(n_stamps_);
  for (std::size_t l = 0; l < n_stamps_; ++l) {
    if (const auto& v = at(i, l)) out[l] = scale_[i].denormalize(*v);
  }
  return out;
}

bool SeriesPanel::has_warnings() const {
  return std::any_of(scale_.begin(), scale_.end(),
                     [](const ScaleInfo& s) { return s.all_missing; });
}

bool SeriesPanel::operator==(const SeriesPanel& other) const {
  if (ids_ != other.ids_ || n_stamps_ != other.n_stamps_) return false;
  if (values_ != other.values_) return false;
  for (std::size_t i = 0; i < scale_.size(); ++i) {
    const auto& a = scale_[i];
    const auto& b = other.scale_[i];
    if (a.min != b.min || a.max != b.max || a.constant != b.constant ||
        a.all_missing != b.all_missing) {
      return false;
    }
  }
  return true;
}

CsvLayout parse_layout(const std::string& text) {
  if (text == "rows=time" || text == "time") return CsvLayout::rows_are_time;
  if (text == "rows=series" || text == "series") return CsvLayout::rows_are_series;
  throw ConfigError("unknown layout '" + text + "' (expected rows=time or rows=series)");
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") return std::nullopt;
  double v = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw DataError("non-numeric cell '" + cell + "' at row " + std::to_string(row + 1) +
                    ", column " + std::to_string(col + 1));
  }
  return v;
}

}  // namespace

LoadedPanel parse_csv(const std::string& text, CsvLayout layout) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_row(line));
  }
  if (rows.size() < 2) throw DataError("CSV needs a header row and at least one data row");
  const std::size_t width = rows.front().size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw DataError("ragged CSV: row " + std::to_string(r + 1) + " has " +
                      std::to_string(rows[r].size()) + " cells, header has " +
                      std::to_string(width));
    }
  }

  std::vector<std::string> ids;
  std::vector<std::vector<std::optional<double>>> raw;
  if (layout == CsvLayout::rows_are_time) {
    ids = rows.front();
    raw.assign(width, {});
    for (std::size_t r = 1; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < width; ++c) raw[c].push_back(parse_cell(rows[r][c], r, c));
    }
  } else {
    // First column is the series id; header row names the time-stamps.
    for (std::size_t r = 1; r < rows.size(); ++r) {
      ids.push_back(rows[r].front());
      std::vector<std::optional<double>> series;
      for (std::size_t c = 1; c < width; ++c) series.push_back(parse_cell(rows[r][c], r, c));
      raw.push_back(std::move(series));
    }
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].empty()) ids[i] = "s" + std::to_string(i + 1);
  }

  LoadedPanel out{SeriesPanel::from_raw(std::move(ids), raw), {}};
  out.gaps = out.panel.gap_mask();
  return out;
}

LoadedPanel load_csv(const std::filesystem::path& path, CsvLayout layout) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), layout);
}

void write_csv(const SeriesPanel& panel, const std::filesystem::path& path, bool denormalize) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  for (std::size_t i = 0; i < panel.n_series(); ++i) {
    if (i) out << ',';
    out << panel.ids()[i];
  }
  out << '\n';
  for (std::size_t l = 0; l < panel.n_stamps(); ++l) {
    for (std::size_t i = 0; i < panel.n_series(); ++i) {
      if (i) out << ',';
      if (const auto& v = panel.at(i, l)) {
        out << (denormalize ? panel.scale(i).denormalize(*v) : *v);
      }
    }
    out << '\n';
  }
}

nlohmann::json scale_to_json(const SeriesPanel& panel) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < panel.n_series(); ++i) {
    const auto& s = panel.scale(i);
    arr.push_back({{"id", panel.ids()[i]},
                   {"min", s.min},
                   {"max", s.max},
                   {"constant", s.constant},
                   {"all_missing", s.all_missing}});
  }
  return arr;
}

void scale_from_json(const nlohmann::json& j, SeriesPanel& panel) {
  if (!j.is_array() || j.size() != panel.n_series()) {
    throw DataError("scale sidecar does not match panel");
  }
  for (std::size_t i = 0; i < panel.n_series(); ++i) {
    auto& s = panel.scales()[i];
    s.min = j[i].at("min").get<double>();
    s.max = j[i].at("max").get<double>();
    s.constant = j[i].at("constant").get<bool>();
    s.all_missing = j[i].at("all_missing").get<bool>();
  }
}

}  // namespace atlas
