#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace atlas {

/// Original range of one series, kept so forecasts can be mapped back.
struct ScaleInfo {
  double min = 0.0;
  double max = 0.0;
  bool constant = false;     // all present values equal; normalized to 0.5
  bool all_missing = false;  // no present value at all

  double normalize(double x) const;
  double denormalize(double v) const;
};

/// Missing-observation mask, row-major N x m. true = missing.
class GapMask {
 public:
  GapMask() = default;
  GapMask(std::size_t n_series, std::size_t n_stamps);

  std::size_t n_series() const { return n_series_; }
  std::size_t n_stamps() const { return n_stamps_; }

  bool missing(std::size_t i, std::size_t l) const { return bits_[i * n_stamps_ + l] != 0; }
  void set(std::size_t i, std::size_t l, bool is_missing) {
    bits_[i * n_stamps_ + l] = is_missing ? 1 : 0;
  }
  std::size_t count() const;

 private:
  std::size_t n_series_ = 0;
  std::size_t n_stamps_ = 0;
  std::vector<unsigned char> bits_;
};

/// Ensemble of N aligned univariate series over m time-stamps.
///
/// Present values are normalized to [0, 1] per series; absent values are
/// gaps. Series ids are the header labels of the source (or "s<i>" for
/// generated data), and positions 0..N-1 are the index set used everywhere
/// else in the library.
class SeriesPanel {
 public:
  SeriesPanel() = default;
  SeriesPanel(std::vector<std::string> ids, std::size_t n_stamps);

  /// Builds a panel from raw values, normalizing each series by its own
  /// present min/max.
  static SeriesPanel from_raw(std::vector<std::string> ids,
                              const std::vector<std::vector<std::optional<double>>>& raw);

  std::size_t n_series() const { return ids_.size(); }
  std::size_t n_stamps() const { return n_stamps_; }
  const std::vector<std::string>& ids() const { return ids_; }

  const std::optional<double>& at(std::size_t i, std::size_t l) const {
    return values_[i * n_stamps_ + l];
  }
  void set(std::size_t i, std::size_t l, std::optional<double> v) {
    values_[i * n_stamps_ + l] = v;
  }

  const ScaleInfo& scale(std::size_t i) const { return scale_[i]; }
  std::vector<ScaleInfo>& scales() { return scale_; }
  const std::vector<ScaleInfo>& scales() const { return scale_; }

  GapMask gap_mask() const;

  /// Values of series i in original units (gaps stay absent).
  std::vector<std::optional<double>> denormalized(std::size_t i) const;

  /// True when any series was all-missing at load time.
  bool has_warnings() const;

  bool operator==(const SeriesPanel& other) const;

 private:
  std::vector<std::string> ids_;
  std::size_t n_stamps_ = 0;
  std::vector<std::optional<double>> values_;
  std::vector<ScaleInfo> scale_;
};

enum class CsvLayout { rows_are_time, rows_are_series };

CsvLayout parse_layout(const std::string& text);

struct LoadedPanel {
  SeriesPanel panel;
  GapMask gaps;
};

/// Reads a CSV whose header row holds series ids (rows=time) or whose first
/// column holds them (rows=series). Empty cells are gaps.
LoadedPanel load_csv(const std::filesystem::path& path, CsvLayout layout);
LoadedPanel parse_csv(const std::string& text, CsvLayout layout);

/// Writes normalized values in rows=time layout; gaps are empty cells.
void write_csv(const SeriesPanel& panel, const std::filesystem::path& path,
               bool denormalize = false);

nlohmann::json scale_to_json(const SeriesPanel& panel);
void scale_from_json(const nlohmann::json& j, SeriesPanel& panel);

}  // namespace atlas
