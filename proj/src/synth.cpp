#include "atlas/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "atlas/error.hpp"

namespace atlas {

double regime_function(int r, double t) {
  constexpr double pi = std::numbers::pi;
  switch (r) {
    case 1:
      return std::cos(2 * pi * t / 5) + std::cos(pi * (t - 3));
    case 2:
      return std::sin(pi * t / 2 - 3) - std::sin(pi * t / 6);
    case 3:
      return std::tan(pi * t / 2 - 3) - 0.5 * std::cos(pi * (t - 3) / 6) + std::cos(pi * (t - 13));
    case 4:
      return std::sin(pi * t / 2 - 3) * std::cos(pi * (t - 3) / 6) * std::cos(pi * (t - 13));
    case 5:
      return std::cos(3 * pi * t / 5) + std::sin(2 * pi * t / 5 - t);
    default:
      throw ConfigError("regime function index must be in 1..5, got " + std::to_string(r));
  }
}

std::vector<double> regime_shape(int r, std::size_t length) {
  std::vector<double> shape(length);
  for (std::size_t k = 0; k < length; ++k) shape[k] = regime_function(r, static_cast<double>(k + 1));
  if (length == 0) return shape;
  const auto [lo, hi] = std::minmax_element(shape.begin(), shape.end());
  const double min = *lo;
  const double span = *hi - *lo;
  for (auto& v : shape) v = span > 0 ? (v - min) / span : 0.5;
  return shape;
}

const RegimeLaw& SynthConfig::law_at(std::size_t segment) const {
  static const RegimeLaw uniform{0.2, 0.2, 0.2, 0.2, 0.2};
  if (switch_law.empty()) return uniform;
  return switch_law[std::min(segment, switch_law.size() - 1)];
}

void SynthConfig::validate() const {
  if (n_series == 0 || n_stamps == 0) throw ConfigError("synthetic panel must be non-empty");
  if (segment_length == 0) throw ConfigError("segment_length must be positive");
  if (noise_sd < 0) throw ConfigError("noise_sd must be >= 0");
  if (persistence < 0 || persistence > 1) throw ConfigError("persistence must be in [0, 1]");
  for (std::size_t s = 0; s < switch_law.size(); ++s) {
    double sum = 0.0;
    for (double p : switch_law[s]) {
      if (p < 0) throw ConfigError("switch law has a negative probability at segment " +
                                   std::to_string(s));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ConfigError("switch law row " + std::to_string(s) + " sums to " +
                        std::to_string(sum) + ", expected 1");
    }
  }
}

namespace {

int quantile_regime(const RegimeLaw& law, double u) {
  double cum = 0.0;
  for (int r = 0; r < kSynthRegimes; ++r) {
    cum += law[r];
    if (u < cum) return r + 1;
  }
  // u sits in the rounding slack above the last cumulative value.
  for (int r = kSynthRegimes - 1; r >= 0; --r) {
    if (law[r] > 0) return r + 1;
  }
  return kSynthRegimes;
}

}  // namespace

SynthResult generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, cfg.noise_sd > 0 ? cfg.noise_sd : 1.0);

  std::array<std::vector<double>, kSynthRegimes> shapes;
  for (int r = 1; r <= kSynthRegimes; ++r) shapes[r - 1] = regime_shape(r, cfg.segment_length);

  const std::size_t n = cfg.n_series;
  const std::size_t m = cfg.n_stamps;
  GroundTruth truth{n, m, std::vector<int>(n * m)};
  std::vector<std::vector<std::optional<double>>> raw(n, std::vector<std::optional<double>>(m));
  std::vector<std::string> ids(n);

  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = "s" + std::to_string(i + 1);
    double u = unit(rng);
    for (std::size_t seg = 0; seg < cfg.n_segments(); ++seg) {
      if (seg > 0 && unit(rng) >= cfg.persistence) u = unit(rng);
      const int r = quantile_regime(cfg.law_at(seg), u);
      const auto& shape = shapes[r - 1];
      for (std::size_t k = 0; k < cfg.segment_length; ++k) {
        const std::size_t l = seg * cfg.segment_length + k;
        if (l >= m) break;
        double v = shape[k];
        if (cfg.noise_sd > 0) v += noise(rng);
        raw[i][l] = v;
        truth.labels[i * m + l] = r;
      }
    }
  }

  SynthResult out{SeriesPanel::from_raw(std::move(ids), raw), {}, std::move(truth)};
  out.gaps = out.panel.gap_mask();
  return out;
}

std::vector<RegimeLaw> decaying_law(std::size_t n_segments, int decaying,
                                    std::size_t fade_segments) {
  if (decaying < 1 || decaying > kSynthRegimes) throw ConfigError("decaying regime out of range");
  std::vector<RegimeLaw> law(n_segments);
  const double base = 1.0 / kSynthRegimes;
  for (std::size_t s = 0; s < n_segments; ++s) {
    const double frac =
        fade_segments == 0 ? 0.0
                           : std::max(0.0, 1.0 - static_cast<double>(s) / static_cast<double>(fade_segments));
    const double p = base * frac;
    const double rest = (1.0 - p) / (kSynthRegimes - 1);
    for (int r = 0; r < kSynthRegimes; ++r) law[s][r] = (r == decaying - 1) ? p : rest;
  }
  return law;
}

Deletion delete_values(const SeriesPanel& panel, std::uint64_t seed) {
  const std::size_t n = panel.n_series();
  const std::size_t m = panel.n_stamps();
  if (n < 30) throw ConfigError("delete_values needs N >= 30, got N = " + std::to_string(n));
  if (m < 30) throw ConfigError("delete_values needs m >= 30, got m = " + std::to_string(m));

  std::mt19937_64 rng(seed);
  const std::size_t max_count = n / 30;
  const std::size_t count = std::uniform_int_distribution<std::size_t>(1, max_count)(rng);
  const std::size_t len_lo = m / 30;
  const std::size_t len_hi = m / 10;
  const std::size_t length = std::uniform_int_distribution<std::size_t>(len_lo, len_hi)(rng);
  const std::size_t start1 = std::uniform_int_distribution<std::size_t>(1, m - length)(rng);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(count);
  std::sort(order.begin(), order.end());

  Deletion out{panel, {}, order, start1 - 1, length};
  for (std::size_t i : order) {
    for (std::size_t l = out.start; l <= out.start + length; ++l) out.panel.set(i, l, std::nullopt);
  }
  out.gaps = out.panel.gap_mask();
  return out;
}

SeriesPanel plant_periodic_gaps(const SeriesPanel& panel, double fraction, std::size_t period,
                                std::size_t gap_length, std::uint64_t seed,
                                std::vector<std::size_t>* chosen) {
  if (gap_length == 0 || gap_length >= period) {
    throw ConfigError("periodic gaps need 0 < gap_length < period");
  }
  if (fraction < 0 || fraction > 1) throw ConfigError("gap fraction must be in [0, 1]");
  const std::size_t n = panel.n_series();
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
  std::sort(order.begin(), order.end());

  const std::size_t phases = period / gap_length;
  SeriesPanel out = panel;
  for (std::size_t i : order) {
    const std::size_t phase = std::uniform_int_distribution<std::size_t>(0, phases - 1)(rng) * gap_length;
    for (std::size_t l = 0; l < panel.n_stamps(); ++l) {
      const std::size_t pos = (l + period - phase % period) % period;
      if (pos < gap_length) out.set(i, l, std::nullopt);
    }
  }
  if (chosen) *chosen = order;
  return out;
}

}  // namespace atlas
