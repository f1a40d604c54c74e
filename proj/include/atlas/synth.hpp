#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "atlas/panel.hpp"

namespace atlas {

inline constexpr int kSynthRegimes = 5;

/// Raw generator function fct_r(t), r in 1..5.
double regime_function(int r, double t);

/// fct_r sampled at t = 1..length and rescaled to [0, 1]. This is the exact
/// content of a noise-free segment exhibiting regime r.
std::vector<double> regime_shape(int r, std::size_t length);

using RegimeLaw = std::array<double, kSynthRegimes>;

struct SynthConfig {
  std::size_t n_series = 450;
  std::size_t n_stamps = 1125;
  std::size_t segment_length = 75;
  /// One probability row per segment; empty means uniform 1/5. A shorter
  /// table repeats its last row.
  std::vector<RegimeLaw> switch_law;
  double noise_sd = 0.05;
  /// Probability that a series keeps its regime quantile across a segment
  /// boundary. Marginals always follow switch_law exactly.
  double persistence = 0.9;
  std::uint64_t seed = 7;

  std::size_t n_segments() const { return (n_stamps + segment_length - 1) / segment_length; }
  const RegimeLaw& law_at(std::size_t segment) const;
  void validate() const;
};

/// Regime label per series per time-step (1..5), row-major N x m.
struct GroundTruth {
  std::size_t n_series = 0;
  std::size_t n_stamps = 0;
  std::vector<int> labels;

  int at(std::size_t i, std::size_t l) const { return labels[i * n_stamps + l]; }
};

struct SynthResult {
  SeriesPanel panel;
  GapMask gaps;
  GroundTruth truth;
};

SynthResult generate_synthetic(const SynthConfig& cfg);

/// Uniform law with regime `decaying` (1-based) fading linearly to zero by
/// segment `fade_segments`; the freed mass is shared by the other regimes.
std::vector<RegimeLaw> decaying_law(std::size_t n_segments, int decaying,
                                    std::size_t fade_segments);

struct Deletion {
  SeriesPanel panel;
  GapMask gaps;
  std::vector<std::size_t> series;  // sorted, distinct
  std::size_t start = 0;            // 0-based first deleted time-step
  std::size_t length = 0;           // rho_d; start..start+length inclusive
};

/// Random gap injection: between 1 and N/30 series lose every value in one
/// shared interval of rho_d + 1 time-steps, rho_d in [m/30, m/10].
Deletion delete_values(const SeriesPanel& panel, std::uint64_t seed);

/// Periodic gaps: a fraction of series lose `gap_length` consecutive values
/// every `period` time-steps, at a phase that is a random multiple of
/// gap_length.
SeriesPanel plant_periodic_gaps(const SeriesPanel& panel, double fraction,
                                std::size_t period, std::size_t gap_length,
                                std::uint64_t seed,
                                std::vector<std::size_t>* chosen = nullptr);

}  // namespace atlas
