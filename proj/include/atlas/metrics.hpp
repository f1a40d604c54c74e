#pragma once

#include <optional>
#include <span>
#include <vector>

namespace atlas {

inline constexpr double kMapeGuard = 1e-9;

/// Mean |p - y| / |y| over pairs with |y| > 1e-9; empty when none qualify.
std::optional<double> mape(std::span<const double> predicted, std::span<const double> truth);

std::optional<double> rmse(std::span<const double> predicted, std::span<const double> truth);

/// F1 of the positive class. With no true positives in the truth, 1.0 when
/// nothing was predicted positive and 0.0 otherwise.
double f1_score(const std::vector<bool>& predicted, const std::vector<bool>& truth);

/// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace atlas
