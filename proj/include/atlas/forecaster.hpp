#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "atlas/grid.hpp"
#include "atlas/panel.hpp"
#include "atlas/survival.hpp"
#include "atlas/transition.hpp"
#include "atlas/window_select.hpp"

namespace atlas {

/// Successor-averaging nearest-neighbour regression over a sequence of
/// flattened objects.
class KnnPredictor {
 public:
  explicit KnnPredictor(std::size_t k = 3) : k_(k) {}

  void push(Eigen::VectorXd object) { history_.push_back(std::move(object)); }
  const std::vector<Eigen::VectorXd>& history() const { return history_; }

  /// Mean of the successors of the k past objects nearest to the latest one.
  /// With fewer than two objects the latest object is returned and
  /// fell_back() reports it.
  Eigen::VectorXd predict();
  bool fell_back() const { return fell_back_; }

 private:
  std::size_t k_;
  std::vector<Eigen::VectorXd> history_;
  bool fell_back_ = false;
};

Eigen::VectorXd flatten(const Eigen::MatrixXd& m);
Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols);

/// TP(alpha -> beta) for every beta from one row of Theta. Regimes carry the
/// survival factor (1 - Surv), or Surv when flip is set; R^0 does not.
std::vector<double> transition_probabilities(const TransitionMatrix& theta, int alpha,
                                             std::span<const double> survival, bool flip = false);

struct RegimeChoice {
  int label = 0;
  double tp = 0.0;
  bool persisted = false;  // every TP was zero
};

/// argmax over beta; ties go to the lower label.
RegimeChoice choose_regime(std::span<const double> tp, int alpha);

struct ValueForecast {
  std::vector<double> point;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Profile values restored to their level, with a symmetric band of
/// half-width (1 - TP) sd / 2.
ValueForecast forecast_values(const ProfilePattern& profile, double tp);

struct Forecast {
  std::size_t series = 0;
  std::size_t stamp = 0;  // 0-based stamp index in the extended grid
  int regime = 0;
  double tp = 0.0;
  std::optional<ValueForecast> values;
};

struct ForecastOptions {
  std::size_t k = 3;
  bool flip_survival = false;
  CoxOptions cox;
};

struct ForecastDiagnostics {
  std::size_t knn_fallbacks = 0;
  std::size_t persistence_fallbacks = 0;
};

/// Extends the grid one column per step, refreshing Theta and
/// the survival model at every step.
std::vector<Forecast> forecast_horizon(MappingGrid& grid, SurvivalModel& survival,
                                       const RegimeCatalog& catalog, std::size_t horizon,
                                       const ForecastOptions& options = {},
                                       ForecastDiagnostics* diagnostics = nullptr);

/// series_id, stamp, regime, tp, t_index, value, lower, upper. Stamps and
/// time indices are 1-based; regime-0 rows leave the value columns empty.
void write_forecasts_csv(const std::vector<Forecast>& forecasts, const SeriesPanel& panel,
                         std::size_t rho, const std::filesystem::path& path,
                         bool denormalize = false);

}  // namespace atlas
