// atlas: regime discovery, survival and forecasting for co-evolving series.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "atlas/error.hpp"
#include "atlas/pipeline.hpp"
#include "atlas/scanner.hpp"
#include "atlas/synth.hpp"
#include "atlas/window_select.hpp"

using namespace atlas;

namespace {

std::vector<std::size_t> parse_rho_set(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw ConfigError("--rho-set expects first:last:step, got '" + text + "'");
  }
  try {
    return rho_range(std::stoul(text.substr(0, a)), std::stoul(text.substr(a + 1, b - a - 1)),
                     std::stoul(text.substr(b + 1)));
  } catch (const std::logic_error&) {
    throw ConfigError("--rho-set expects integers, got '" + text + "'");
  }
}

struct ModelFlags {
  std::string method = "map-equation";
  std::string density = "distinct";
  std::string mdl = "log-lsq";
  std::string engine = "autoencoder";
  double theta = 0.15;
  std::size_t knn = 3;
  bool flip = false;

  void add(CLI::App* app) {
    app->add_option("--method", method, "community objective: map-equation or modularity");
    app->add_option("--density", density, "regime count in the density score: distinct or stamp-max");
    app->add_option("--mdl", mdl, "split criterion: log-lsq, deviation or literal");
    app->add_option("--engine", engine, "embedding engine: autoencoder or spectral");
    app->add_option("--theta", theta, "RMS distance under which two profiles are one regime");
    app->add_option("--knn", knn, "neighbours of the KNN regressor");
    app->add_flag("--flip-survival", flip, "use Surv instead of 1 - Surv in TP");
  }

  void apply(PipelineConfig& cfg) const {
    cfg.scan.community.method = parse_community_method(method);
    cfg.scan.density = parse_density_mode(density);
    cfg.scan.mdl = parse_mdl_form(mdl);
    cfg.scan.theta_match = theta;
    cfg.embedding.engine = parse_embedding_engine(engine);
    cfg.forecast.k = knn;
    cfg.forecast.flip_survival = flip;
  }
};

struct SynthFlags {
  std::size_t n = 450;
  std::size_t m = 1125;
  std::size_t segment = 75;
  double noise = 0.05;
  double persistence = 0.9;

  void add(CLI::App* app) {
    app->add_option("--n", n, "number of series");
    app->add_option("--m", m, "number of time-stamps");
    app->add_option("--segment", segment, "regime segment length");
    app->add_option("--noise", noise, "Gaussian noise sd before renormalization");
    app->add_option("--persistence", persistence, "chance a series keeps its regime quantile");
  }

  void apply(SynthConfig& c) const {
    c.n_series = n;
    c.n_stamps = m;
    c.segment_length = segment;
    c.noise_sd = noise;
    c.persistence = persistence;
  }
};

std::uint64_t seed_or_env(std::uint64_t seed) {
  if (const char* env = std::getenv("ATLAS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::logic_error&) {
      throw ConfigError(std::string("ATLAS_SEED is not an integer: ") + env);
    }
  }
  return seed;
}

void print_summary(const nlohmann::json& r) {
  std::cout << "rho_hat " << r.value("rho_hat", 0) << "  K " << r.value("K", 0) << "  stamps "
            << r.value("b", 0) << " (train " << r.value("b_train", 0) << ")\n";
  if (r.contains("ari")) std::cout << "ARI mean " << r["ari"]["mean"] << "  min " << r["ari"]["min"] << '\n';
  for (const auto& h : r.value("horizons", nlohmann::json::array())) {
    if (!h.value("scored", false)) continue;
    std::cout << "h=" << h["horizon"] << "  MAPE " << h["mape"] << "  RMSE " << h["rmse"]
              << "  F1(missing) " << h["f1_missing"] << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regime-shift discovery and forecasting for co-evolving time series"};
  app.require_subcommand(1);

  std::string csv, layout = "rows=time", out;
  std::uint64_t seed = 7;
  bool verbose = false;
  ModelFlags model;
  SynthFlags synth_flags;

  auto* ingest = app.add_subcommand("ingest", "load and normalize a CSV panel");
  ingest->add_option("--csv", csv, "input CSV")->required();
  ingest->add_option("--layout", layout, "rows=time or rows=series");
  ingest->add_option("--out", out, "directory for panel.csv and scale.json");

  auto* synth = app.add_subcommand("synth", "generate the synthetic benchmark");
  synth_flags.add(synth);
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--out", out, "output directory")->required();

  std::string corrupt_out;
  auto* corrupt = app.add_subcommand("corrupt", "delete a random block of values");
  corrupt->add_option("--csv", csv, "input CSV")->required();
  corrupt->add_option("--layout", layout, "rows=time or rows=series");
  corrupt->add_option("--seed", seed, "deletion seed");
  corrupt->add_option("--out", corrupt_out, "output CSV")->required();

  std::size_t rho = 0;
  std::string dump;
  auto* scan_cmd = app.add_subcommand("scan", "build stamp networks and groups for one window size");
  scan_cmd->add_option("--csv", csv, "input CSV")->required();
  scan_cmd->add_option("--layout", layout, "rows=time or rows=series");
  scan_cmd->add_option("--rho", rho, "window size")->required();
  scan_cmd->add_option("--dump-networks", dump, "directory for edge lists and partitions");
  scan_cmd->add_option("--method", model.method, "map-equation or modularity");
  scan_cmd->add_option("--seed", seed, "community seed");

  std::string rho_set;
  double epsilon = 0.01;
  std::size_t fixed_rho = 0;
  auto* fit = app.add_subcommand("fit", "select the window, find regimes, fit survival and transitions");
  fit->add_option("--csv", csv, "input CSV (synthetic data when omitted)");
  fit->add_option("--layout", layout, "rows=time or rows=series");
  fit->add_option("--rho-set", rho_set, "candidate window sizes first:last:step");
  fit->add_option("--epsilon", epsilon, "sweep convergence threshold");
  fit->add_option("--rho", fixed_rho, "use this window size instead of sweeping");
  fit->add_option("--seed", seed, "seed");
  fit->add_option("--out", out, "model directory")->required();
  fit->add_flag("--verbose", verbose, "log stages");
  model.add(fit);
  synth_flags.add(fit);

  std::string model_dir;
  std::size_t horizon = 4;
  bool denormalize = false;
  auto* forecast = app.add_subcommand("forecast", "forecast regimes and values from a fitted model");
  forecast->add_option("--model", model_dir, "model directory written by fit")->required();
  forecast->add_option("--horizon", horizon, "stamps ahead");
  forecast->add_option("--out", out, "forecast CSV")->required();
  forecast->add_option("--knn", model.knn, "neighbours of the KNN regressor");
  forecast->add_flag("--flip-survival", model.flip, "use Surv instead of 1 - Surv in TP");
  forecast->add_flag("--denormalize", denormalize, "emit values in original units");

  bool synthetic = false;
  PeriodicGaps gaps;
  bool deletion = false;
  auto* bench = app.add_subcommand("bench", "end-to-end run with the last stamps held out");
  bench->add_flag("--synthetic", synthetic, "use the synthetic generator");
  bench->add_option("--csv", csv, "input CSV");
  bench->add_option("--layout", layout, "rows=time or rows=series");
  bench->add_option("--seed", seed, "seed");
  bench->add_option("--horizon", horizon, "held-out stamps to forecast");
  bench->add_option("--rho-set", rho_set, "candidate window sizes first:last:step");
  bench->add_option("--epsilon", epsilon, "sweep convergence threshold");
  bench->add_option("--rho", fixed_rho, "use this window size instead of sweeping");
  bench->add_option("--gap-fraction", gaps.fraction, "share of series given periodic gaps");
  bench->add_option("--gap-period", gaps.period, "gap period in time-steps");
  bench->add_option("--gap-length", gaps.length, "gap length in time-steps");
  bench->add_flag("--delete", deletion, "also delete one random block of values");
  bench->add_option("--out", out, "output directory")->default_val("atlas_bench");
  bench->add_flag("--denormalize", denormalize, "emit forecast values in original units");
  bench->add_flag("--verbose", verbose, "log stages");
  model.add(bench);
  synth_flags.add(bench);

  auto* report = app.add_subcommand("report", "summarize report.json of a run directory");
  report->add_option("--model", model_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      const LoadedPanel lp = load_csv(csv, parse_layout(layout));
      std::cout << "series " << lp.panel.n_series() << "  stamps " << lp.panel.n_stamps()
                << "  gaps " << lp.gaps.count() << '\n';
      for (std::size_t i = 0; i < lp.panel.n_series(); ++i) {
        const ScaleInfo& s = lp.panel.scale(i);
        if (s.all_missing) std::cout << "warning: series " << lp.panel.ids()[i] << " has no values\n";
        if (s.constant) std::cout << "note: series " << lp.panel.ids()[i] << " is constant\n";
      }
      if (!out.empty()) {
        std::filesystem::create_directories(out);
        write_csv(lp.panel, std::filesystem::path(out) / "panel.csv");
        write_json(scale_to_json(lp.panel), std::filesystem::path(out) / "scale.json");
      }
    } else if (*synth) {
      SynthConfig c;
      synth_flags.apply(c);
      c.seed = seed_or_env(seed);
      const SynthResult s = generate_synthetic(c);
      const std::filesystem::path dir(out);
      std::filesystem::create_directories(dir);
      write_csv(s.panel, dir / "panel.csv");
      std::ofstream t(dir / "truth.csv");
      for (std::size_t l = 0; l < c.n_stamps; ++l) {
        for (std::size_t i = 0; i < c.n_series; ++i) t << (i ? "," : "") << s.truth.at(i, l);
        t << '\n';
      }
      std::cout << "wrote " << c.n_series << " x " << c.n_stamps << " panel to " << dir << '\n';
    } else if (*corrupt) {
      const LoadedPanel lp = load_csv(csv, parse_layout(layout));
      const Deletion d = delete_values(lp.panel, seed_or_env(seed));
      write_csv(d.panel, corrupt_out, true);
      std::cout << "deleted time-steps " << d.start + 1 << ".." << d.start + d.length + 1 << " of "
                << d.series.size() << " series\n";
    } else if (*scan_cmd) {
      const LoadedPanel lp = load_csv(csv, parse_layout(layout));
      ScanOptions opts;
      opts.community.method = parse_community_method(model.method);
      opts.community.seed = seed_or_env(seed);
      const ScanResult r = atlas::scan(lp.panel, rho, opts);
      if (!dump.empty()) std::filesystem::create_directories(dump);
      for (std::size_t j = 0; j < r.networks.size(); ++j) {
        std::cout << "stamp " << j + 1 << "  nodes " << r.networks[j].size() << "  edges "
                  << r.networks[j].edge_count() << "  groups " << r.partitions[j].size() << '\n';
        if (dump.empty()) continue;
        const auto path = std::filesystem::path(dump) / ("stamp_" + std::to_string(j + 1) + ".txt");
        write_edge_list(r.networks[j], path);
        std::ofstream part(path, std::ios::app);
        for (std::size_t g = 0; g < r.partitions[j].groups.size(); ++g) {
          for (std::size_t i : r.partitions[j].groups[g]) part << "# " << i + 1 << ' ' << g + 1 << '\n';
        }
      }
      std::cout << "max groups " << r.max_groups() << "  density "
                << static_cast<double>(r.max_groups()) / static_cast<double>(rho) << '\n';
    } else if (*fit || *bench) {
      PipelineConfig cfg;
      cfg.apply_seed(seed_or_env(seed));
      synth_flags.apply(cfg.synth);
      model.apply(cfg);
      if (!csv.empty()) {
        cfg.csv = csv;
        cfg.layout = parse_layout(layout);
      } else if (*bench && !synthetic) {
        throw ConfigError("bench needs --synthetic or --csv");
      }
      if (!rho_set.empty()) cfg.candidates = parse_rho_set(rho_set);
      if (fixed_rho) cfg.rho = fixed_rho;
      cfg.epsilon = epsilon;
      cfg.out_dir = out;
      cfg.verbose = verbose;
      cfg.denormalize = denormalize;
      if (*fit) {
        cfg.holdout = false;
        cfg.horizon = 0;
      } else {
        cfg.horizon = horizon;
        cfg.gaps = gaps;
        cfg.random_deletion = deletion;
      }
      const PipelineResult res = run_pipeline(cfg);
      print_summary(res.report);
      std::cout << "artifacts in " << out << '\n';
    } else if (*forecast) {
      const std::filesystem::path dir(model_dir);
      const RegimeCatalog catalog = catalog_from_json(read_json(dir / "regimes.json"));
      MappingGrid grid = grid_from_json(read_json(dir / "grid.json"));
      LoadedPanel lp = load_csv(dir / "panel.csv", CsvLayout::rows_are_time);
      scale_from_json(read_json(dir / "scale.json"), lp.panel);
      SurvivalModel surv = fit_survival(grid);
      ForecastOptions fo;
      fo.k = model.knn;
      fo.flip_survival = model.flip;
      const auto fc = forecast_horizon(grid, surv, catalog, horizon, fo);
      write_forecasts_csv(fc, lp.panel, catalog.rho, out, denormalize);
      std::cout << "wrote " << fc.size() << " forecasts to " << out << '\n';
    } else if (*report) {
      print_summary(read_json(std::filesystem::path(model_dir) / "report.json"));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const StageError& e) {
    std::cerr << "stage failure (" << e.stage() << "): " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "stage failure: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
