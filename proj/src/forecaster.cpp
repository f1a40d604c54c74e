#include "atlas/forecaster.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "atlas/error.hpp"

namespace atlas {

Eigen::VectorXd KnnPredictor::predict() {
  fell_back_ = false;
  if (history_.empty()) throw DataError("KNN prediction needs at least one object");
  const std::size_t n = history_.size();
  if (n < 2) {
    fell_back_ = true;
    return history_.back();
  }
  const Eigen::VectorXd& latest = history_.back();
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) dist.emplace_back((history_[t] - latest).norm(), t);
  std::sort(dist.begin(), dist.end());
  const std::size_t k = std::min(k_, n - 1);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(latest.size());
  for (std::size_t q = 0; q < k; ++q) out += history_[dist[q].second + 1];
  return out / static_cast<double>(k);
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

std::vector<double> transition_probabilities(const TransitionMatrix& theta, int alpha,
                                             std::span<const double> survival, bool flip) {
  const auto k = theta.cols();
  if (alpha < 0 || alpha >= theta.rows()) throw ConfigError("alpha outside 0..K");
  if (static_cast<Eigen::Index>(survival.size()) + 1 != k) {
    throw ConfigError("survival needs one value per regime");
  }
  std::vector<double> tp(static_cast<std::size_t>(k));
  tp[0] = theta(alpha, 0);
  for (Eigen::Index b = 1; b < k; ++b) {
    const double s = survival[static_cast<std::size_t>(b - 1)];
    tp[static_cast<std::size_t>(b)] = theta(alpha, b) * (flip ? s : 1.0 - s);
  }
  return tp;
}

RegimeChoice choose_regime(std::span<const double> tp, int alpha) {
  RegimeChoice c;
  c.label = alpha;
  double best = 0.0;
  for (std::size_t b = 0; b < tp.size(); ++b) {
    if (tp[b] > best) {
      best = tp[b];
      c.label = static_cast<int>(b);
    }
  }
  c.tp = best;
  c.persisted = best == 0.0;
  return c;
}

ValueForecast forecast_values(const ProfilePattern& profile, double tp) {
  ValueForecast v;
  const double half = (1.0 - tp) * profile.sd / 2.0;
  v.point = profile.values();
  for (double p : v.point) {
    v.lower.push_back(p - half);
    v.upper.push_back(p + half);
  }
  return v;
}

namespace {

std::vector<double> survival_at_next(SurvivalModel& survival, const MappingGrid& grid,
                                     const std::vector<Eigen::VectorXd>& features,
                                     const CoxOptions& cox) {
  const std::size_t last = grid.b() - 1;
  std::vector<double> out;
  for (auto& rs : survival.regimes) {
    const auto& members = grid.cell(rs.regime, last);
    CoxStamp cell = CoxStamp::Zero(static_cast<Eigen::Index>(members.size()),
                                   static_cast<Eigen::Index>(survival.dim));
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto& f = features[members[k]];
      for (Eigen::Index c = 0; c < f.size() && c < cell.cols(); ++c) {
        cell(static_cast<Eigen::Index>(k), c) = f(c);
      }
    }
    rs.push_stamp(std::move(cell), cox);
    out.push_back(rs.curve.back());
  }
  return out;
}

}  // namespace

std::vector<Forecast> forecast_horizon(MappingGrid& grid, SurvivalModel& survival,
                                       const RegimeCatalog& catalog, std::size_t horizon,
                                       const ForecastOptions& options,
                                       ForecastDiagnostics* diagnostics) {
  if (grid.b() < 2) throw StageError("forecast", "need at least two known stamps");
  if (survival.regimes.size() != grid.K()) {
    throw StageError("forecast", "survival model and grid disagree on K");
  }
  const std::size_t n = grid.n_series();
  const auto k1 = static_cast<Eigen::Index>(grid.K() + 1);
  std::vector<Forecast> out;
  ForecastDiagnostics diag;

  for (std::size_t step = 0; step < horizon; ++step) {
    const std::size_t b = grid.b();

    KnnPredictor q_knn(options.k);
    for (std::size_t j = 0; j + 1 < b; ++j) q_knn.push(flatten(global_switch(grid, j)));
    const TransitionMatrix q_hat = unflatten(q_knn.predict(), k1, k1);
    diag.knn_fallbacks += q_knn.fell_back();

    std::vector<Eigen::VectorXd> next_features(n);
    for (std::size_t i = 0; i < n; ++i) {
      KnnPredictor f_knn(options.k);
      for (std::size_t j = 0; j < b; ++j) {
        const auto& f = grid.feature(i, j);
        if (!f.empty()) f_knn.push(Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size())));
      }
      if (f_knn.history().empty()) {
        next_features[i] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(survival.dim));
      } else {
        next_features[i] = f_knn.predict();
        diag.knn_fallbacks += f_knn.fell_back();
      }
    }
    const std::vector<double> surv = survival_at_next(survival, grid, next_features, options.cox);

    std::vector<int> labels(n);
    std::vector<Forecast> column;
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<int> tr = trajectory(grid, i, b);
      KnnPredictor pi_knn(options.k);
      for (std::size_t len = 2; len <= b; ++len) {
        pi_knn.push(flatten(switch_from_trajectory(std::span<const int>(tr.data(), len), grid.K())));
      }
      const TransitionMatrix pi_hat = unflatten(pi_knn.predict(), k1, k1);
      diag.knn_fallbacks += pi_knn.fell_back();
      const TransitionMatrix theta = effective_transition(q_hat, pi_hat);
      const int alpha = tr.back();
      const auto tp = transition_probabilities(theta, alpha, surv, options.flip_survival);
      const RegimeChoice choice = choose_regime(tp, alpha);
      diag.persistence_fallbacks += choice.persisted;
      labels[i] = choice.label;
      Forecast f;
      f.series = i;
      f.stamp = b;
      f.regime = choice.label;
      f.tp = choice.tp;
      if (choice.label >= 1) {
        f.values = forecast_values(catalog.profiles[static_cast<std::size_t>(choice.label - 1)], f.tp);
      }
      column.push_back(std::move(f));
    }
    grid.append_column(labels);
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] >= 1) {
        const auto& v = next_features[i];
        grid.set_feature(i, b, std::vector<double>(v.data(), v.data() + v.size()));
      }
    }
    out.insert(out.end(), column.begin(), column.end());
  }
  if (diagnostics) *diagnostics = diag;
  return out;
}

void write_forecasts_csv(const std::vector<Forecast>& forecasts, const SeriesPanel& panel,
                         std::size_t rho, const std::filesystem::path& path, bool denormalize) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "series_id,stamp,regime,tp,t_index,value,lower,upper\n";
  for (const auto& f : forecasts) {
    const std::string& id = panel.ids().at(f.series);
    if (!f.values) {
      out << id << ',' << f.stamp + 1 << ',' << f.regime << ',' << f.tp << ",,,,\n";
      continue;
    }
    const ScaleInfo& sc = panel.scale(f.series);
    for (std::size_t k = 0; k < f.values->point.size(); ++k) {
      double v = f.values->point[k];
      double lo = f.values->lower[k];
      double hi = f.values->upper[k];
      if (denormalize) {
        v = sc.denormalize(v);
        lo = sc.denormalize(lo);
        hi = sc.denormalize(hi);
      }
      out << id << ',' << f.stamp + 1 << ',' << f.regime << ',' << f.tp << ','
          << f.stamp * rho + k + 1 << ',' << v << ',' << lo << ',' << hi << '\n';
    }
  }
}

}  // namespace atlas
