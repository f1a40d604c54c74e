#include "atlas/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

#include "atlas/error.hpp"
#include "atlas/metrics.hpp"
#include "atlas/transition.hpp"

namespace atlas {

namespace {

template <typename F>
auto stage(const char* name, bool verbose, F&& f) {
  if (verbose) std::clog << "[atlas] " << name << '\n';
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const DataError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

bool observed(const GapMask& gaps, std::size_t i, std::size_t stamp, std::size_t rho) {
  for (std::size_t k = 0; k < rho; ++k) {
    if (gaps.missing(i, stamp * rho + k)) return false;
  }
  return true;
}

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void PipelineConfig::apply_seed(std::uint64_t s) {
  seed = s;
  synth.seed = s;
  scan.community.seed = s;
  embedding.seed = s;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

int truth_label(const GroundTruth& truth, std::size_t series, std::size_t stamp, std::size_t rho) {
  std::map<int, std::size_t> votes;
  for (std::size_t k = 0; k < rho; ++k) ++votes[truth.at(series, stamp * rho + k)];
  return std::max_element(votes.begin(), votes.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->first;
}

std::vector<double> grid_ari(const MappingGrid& grid, const GroundTruth& truth, const GapMask& gaps) {
  std::vector<double> out;
  for (std::size_t j = 0; j < grid.b(); ++j) {
    std::vector<int> found, expected;
    for (std::size_t i = 0; i < grid.n_series(); ++i) {
      if (!observed(gaps, i, j, grid.rho())) continue;
      found.push_back(grid.label_of(i, j));
      expected.push_back(truth_label(truth, i, j, grid.rho()));
    }
    out.push_back(adjusted_rand_index(found, expected));
  }
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  const bool write = !cfg.out_dir.empty();
  if (write) std::filesystem::create_directories(cfg.out_dir);
  const auto at = [&](const char* name) { return cfg.out_dir / name; };
  const bool v = cfg.verbose;

  PipelineResult res;
  GapMask gaps;
  std::optional<GroundTruth> truth;

  stage("ingest", v, [&] {
    if (cfg.csv) {
      LoadedPanel lp = load_csv(*cfg.csv, cfg.layout);
      res.panel = std::move(lp.panel);
    } else {
      SynthResult s = generate_synthetic(cfg.synth);
      res.panel = std::move(s.panel);
      truth = std::move(s.truth);
    }
    if (cfg.gaps.fraction > 0.0) {
      res.panel = plant_periodic_gaps(res.panel, cfg.gaps.fraction, cfg.gaps.period,
                                      cfg.gaps.length, cfg.seed);
    }
    if (cfg.random_deletion) res.panel = delete_values(res.panel, cfg.seed).panel;
    gaps = res.panel.gap_mask();
    if (write) {
      write_csv(res.panel, at("panel.csv"));
      write_json(scale_to_json(res.panel), at("scale.json"));
    }
    return 0;
  });

  stage("sweep", v, [&] {
    if (cfg.rho) {
      res.curve.entries.push_back({*cfg.rho, density_score(res.panel, *cfg.rho, cfg.scan)});
      res.curve.epsilon = cfg.epsilon;
    } else {
      const auto cand = cfg.candidates.empty() ? default_candidates(res.panel.n_stamps()) : cfg.candidates;
      res.curve = sweep(res.panel, cand, cfg.epsilon, cfg.scan);
    }
    if (write) write_density_csv(res.curve, at("density_curve.csv"));
    return 0;
  });

  res.rho = stage("select", v, [&] {
    if (cfg.rho) return *cfg.rho;
    if (res.curve.entries.size() < 3) {
      throw ConfigError("the sweep stopped after " + std::to_string(res.curve.entries.size()) +
                        " sizes; window selection needs at least 3 (lower --epsilon)");
    }
    return select_window(res.curve, cfg.scan.mdl);
  });

  ScanResult scanned = stage("canonicalize", v, [&] {
    ScanResult full = scan(res.panel, res.rho, cfg.scan);
    const std::size_t b = full.partitions.size();
    const std::size_t keep = cfg.holdout ? (b > cfg.horizon ? b - cfg.horizon : 0) : b;
    if (keep < 2) {
      throw ConfigError("window size " + std::to_string(res.rho) + " leaves " + std::to_string(keep) +
                        " training stamps; at least 2 are needed");
    }
    full.networks.resize(keep);
    full.partitions.resize(keep);
    res.catalog = canonicalize_regimes(res.panel, full, cfg.scan.theta_match);
    res.b_train = keep;
    if (write) {
      nlohmann::json j = catalog_to_json(res.catalog);
      j["density_mode"] = cfg.scan.density == DensityMode::stamp_max ? "stamp-max" : "distinct";
      write_json(j, at("regimes.json"));
    }
    return full;
  });

  stage("grid", v, [&] {
    res.grid = build_grid(res.catalog, scanned.partitions, res.panel.n_series());
    res.grid.check();
    return 0;
  });

  stage("embed", v, [&] {
    embed_grid(res.grid, scanned.networks, res.panel, cfg.embedding);
    if (write) {
      write_json(grid_to_json(res.grid), at("grid.json"));
      write_heatmap_csv(res.grid, at("grid_heatmap.csv"));
    }
    return 0;
  });

  stage("survival", v, [&] {
    res.survival = fit_survival(res.grid, static_cast<std::size_t>(cfg.embedding.dim), cfg.forecast.cox);
    if (write) {
      write_json(survival_to_json(res.survival), at("survival.json"));
      write_survival_csv(res.survival, at("survival_curves.csv"));
      write_cox_csv(res.survival, at("cox_coeffs.csv"));
    }
    return 0;
  });

  stage("transitions", v, [&] {
    const TransitionSet set = compute_transitions(res.grid);
    if (write) {
      write_json(transitions_to_json(set), at("transitions.json"));
      write_theta_edges(set, at("theta_edges.csv"));
    }
    return 0;
  });

  ForecastDiagnostics diag;
  stage("forecast", v, [&] {
    MappingGrid extended = res.grid;
    SurvivalModel surv = res.survival;
    res.forecasts = forecast_horizon(extended, surv, res.catalog, cfg.horizon, cfg.forecast, &diag);
    if (write) {
      write_forecasts_csv(res.forecasts, res.panel, res.rho, at("forecasts.csv"), cfg.denormalize);
    }
    return 0;
  });

  stage("score", v, [&] {
    nlohmann::json& r = res.report;
    r["rho_hat"] = res.rho;
    r["K"] = res.catalog.K;
    r["b"] = stamp_count(res.panel.n_stamps(), res.rho);
    r["b_train"] = res.b_train;
    r["horizon"] = cfg.horizon;
    r["n_series"] = res.panel.n_series();
    r["n_stamps"] = res.panel.n_stamps();
    r["seed"] = cfg.seed;
    r["density_curve"] = nlohmann::json::array();
    for (const auto& e : res.curve.entries) r["density_curve"].push_back({e.rho, e.score});
    r["diagnostics"] = {{"knn_fallbacks", diag.knn_fallbacks},
                        {"persistence_fallbacks", diag.persistence_fallbacks}};

    const std::size_t b_total = stamp_count(res.panel.n_stamps(), res.rho);
    auto horizons = nlohmann::json::array();
    for (std::size_t h = 1; h <= cfg.horizon; ++h) {
      const std::size_t s = res.b_train + h - 1;
      nlohmann::json hj;
      hj["horizon"] = h;
      std::size_t missing_predicted = 0;
      for (const auto& f : res.forecasts) missing_predicted += f.stamp == s && f.regime == 0;
      hj["predicted_missing"] = missing_predicted;
      if (!cfg.holdout || s >= b_total) {
        hj["scored"] = false;
        horizons.push_back(std::move(hj));
        continue;
      }
      std::vector<double> pred, obs;
      std::vector<bool> pred_gap, true_gap;
      std::size_t scored_series = 0;
      for (const auto& f : res.forecasts) {
        if (f.stamp != s) continue;
        const bool seen = observed(gaps, f.series, s, res.rho);
        pred_gap.push_back(f.regime == 0);
        true_gap.push_back(!seen);
        if (!seen || !f.values) continue;
        ++scored_series;
        for (std::size_t k = 0; k < res.rho; ++k) {
          pred.push_back(f.values->point[k]);
          obs.push_back(*res.panel.at(f.series, s * res.rho + k));
        }
      }
      hj["scored"] = true;
      hj["scored_series"] = scored_series;
      hj["mape"] = opt(mape(pred, obs));
      hj["rmse"] = opt(rmse(pred, obs));
      hj["f1_missing"] = f1_score(pred_gap, true_gap);
      hj["true_missing"] = std::count(true_gap.begin(), true_gap.end(), true);
      horizons.push_back(std::move(hj));
    }
    r["horizons"] = std::move(horizons);
    if (truth) {
      const auto ari = grid_ari(res.grid, *truth, gaps);
      double mean = 0.0;
      for (double a : ari) mean += a;
      r["ari"] = {{"per_stamp", ari},
                  {"mean", ari.empty() ? 0.0 : mean / static_cast<double>(ari.size())},
                  {"min", ari.empty() ? 0.0 : *std::min_element(ari.begin(), ari.end())}};
    }
    if (write) {
      write_json(r, at("report.json"));
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      write_json({{"seconds", secs}}, at("timing.json"));
    }
    return 0;
  });
  return res;
}

}  // namespace atlas
