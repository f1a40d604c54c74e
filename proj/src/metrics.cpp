#include "atlas/metrics.hpp"

#include <cmath>
#include <map>

#include "atlas/error.hpp"

namespace atlas {

namespace {

void same_length(std::size_t a, std::size_t b) {
  if (a != b) throw ConfigError("metric inputs have different lengths");
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

std::optional<double> mape(std::span<const double> predicted, std::span<const double> truth) {
  same_length(predicted.size(), truth.size());
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (std::abs(truth[k]) <= kMapeGuard) continue;
    sum += std::abs(predicted[k] - truth[k]) / std::abs(truth[k]);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> rmse(std::span<const double> predicted, std::span<const double> truth) {
  same_length(predicted.size(), truth.size());
  if (truth.empty()) return std::nullopt;
  double ss = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    ss += (predicted[k] - truth[k]) * (predicted[k] - truth[k]);
  }
  return std::sqrt(ss / static_cast<double>(truth.size()));
}

double f1_score(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  same_length(predicted.size(), truth.size());
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    tp += predicted[k] && truth[k];
    fp += predicted[k] && !truth[k];
    fn += !predicted[k] && truth[k];
  }
  if (tp + fn == 0) return fp == 0 ? 1.0 : 0.0;
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  same_length(a.size(), b.size());
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, rb;
  for (std::size_t k = 0; k < a.size(); ++k) {
    joint[{a[k], b[k]}] += 1.0;
    ra[a[k]] += 1.0;
    rb[b[k]] += 1.0;
  }
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [key, c] : joint) index += choose2(c);
  for (const auto& [key, c] : ra) sa += choose2(c);
  for (const auto& [key, c] : rb) sb += choose2(c);
  const double total = choose2(n);
  if (total == 0.0) return 1.0;
  const double expected = sa * sb / total;
  const double maximum = 0.5 * (sa + sb);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

}  // namespace atlas
