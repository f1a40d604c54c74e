#include "atlas/window_select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "atlas/error.hpp"

namespace atlas {

namespace {

constexpr double kLogFloor = 1e-12;

double flog2(double x) { return std::log2(std::max(x, kLogFloor)); }

double side_length(const DensityCurve& curve, std::size_t first, std::size_t last, MdlForm form) {
  const double n = static_cast<double>(last - first + 1);
  if (form == MdlForm::log_least_squares) {
    double mean = 0.0;
    for (std::size_t k = first; k <= last; ++k) mean += flog2(curve.entries[k].score);
    mean /= n;
    double ss = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
      const double d = flog2(curve.entries[k].score) - mean;
      ss += d * d;
    }
    return ss;
  }
  double mean = 0.0;
  for (std::size_t k = first; k <= last; ++k) mean += curve.entries[k].score;
  mean /= n;
  const double centre = form == MdlForm::literal ? flog2(mean) : mean;
  double cl = flog2(mean);
  for (std::size_t k = first; k <= last; ++k) cl += flog2(std::abs(curve.entries[k].score - centre));
  return cl;
}

}  // namespace

MdlForm parse_mdl_form(const std::string& text) {
  if (text == "deviation") return MdlForm::deviation_from_mean;
  if (text == "literal") return MdlForm::literal;
  if (text == "log-lsq") return MdlForm::log_least_squares;
  throw ConfigError("unknown MDL form '" + text + "' (expected deviation, literal or log-lsq)");
}

DensityMode parse_density_mode(const std::string& text) {
  if (text == "stamp-max") return DensityMode::stamp_max;
  if (text == "distinct") return DensityMode::distinct_regimes;
  throw ConfigError("unknown density mode '" + text + "' (expected stamp-max or distinct)");
}

std::size_t ScanResult::max_groups() const {
  std::size_t k = 0;
  for (const auto& p : partitions) k = std::max(k, p.size());
  return k;
}

ScanResult scan_symbols(const std::vector<std::uint8_t>& symbols, std::size_t n_series,
                        std::size_t n_stamps, std::size_t rho, const ScanOptions& options) {
  ScanResult out;
  out.rho = rho;
  out.networks = build_networks(symbols, n_series, n_stamps, rho);
  out.partitions.reserve(out.networks.size());
  for (const auto& net : out.networks) {
    out.partitions.push_back(detect_communities(net, options.community));
  }
  return out;
}

ScanResult scan(const SeriesPanel& panel, std::size_t rho, const ScanOptions& options) {
  return scan_symbols(symbolize_panel(panel, options.symbols), panel.n_series(),
                      panel.n_stamps(), rho, options);
}

double density_score(const SeriesPanel& panel, const ScanResult& result,
                     const ScanOptions& options) {
  if (result.rho == 0) return 0.0;
  std::size_t k = result.max_groups();
  if (options.density == DensityMode::distinct_regimes) {
    k = canonicalize_regimes(panel, result, options.theta_match).K;
  }
  return static_cast<double>(k) / static_cast<double>(result.rho);
}

double density_score(const SeriesPanel& panel, std::size_t rho, const ScanOptions& options) {
  return density_score(panel, scan(panel, rho, options), options);
}

std::vector<std::size_t> rho_range(std::size_t first, std::size_t last, std::size_t step) {
  if (step == 0) throw ConfigError("window-size step must be positive");
  std::vector<std::size_t> out;
  for (std::size_t r = first; r <= last; r += step) out.push_back(r);
  return out;
}

std::vector<std::size_t> default_candidates(std::size_t n_stamps) {
  const std::size_t last = std::min<std::size_t>(n_stamps / 4, 200);
  if (last < 2) return n_stamps >= 2 ? std::vector<std::size_t>{2} : std::vector<std::size_t>{};
  const std::size_t count = last - 1;
  const std::size_t step = (count + 59) / 60;
  return rho_range(2, last, step);
}

DensityCurve sweep(const SeriesPanel& panel, const std::vector<std::size_t>& candidates,
                   double epsilon, const ScanOptions& options) {
  if (candidates.empty()) throw ConfigError("window-size candidate set is empty");
  if (!std::is_sorted(candidates.begin(), candidates.end()) ||
      std::adjacent_find(candidates.begin(), candidates.end()) != candidates.end()) {
    throw ConfigError("window-size candidates must be strictly increasing");
  }
  DensityCurve curve;
  curve.epsilon = epsilon;
  const auto symbols = symbolize_panel(panel, options.symbols);
  double previous = 0.0;
  for (std::size_t rho : candidates) {
    const ScanResult result =
        scan_symbols(symbols, panel.n_series(), panel.n_stamps(), rho, options);
    const double score = density_score(panel, result, options);
    curve.entries.push_back({rho, score});
    if (std::abs(score - previous) < epsilon) break;
    previous = score;
  }
  return curve;
}

double split_code_length(const DensityCurve& curve, std::size_t split, MdlForm form) {
  const std::size_t n = curve.entries.size();
  if (split + 1 >= n) throw ConfigError("split must leave both sides non-empty");
  return side_length(curve, 0, split, form) + side_length(curve, split + 1, n - 1, form);
}

std::size_t select_window(const DensityCurve& curve, MdlForm form) {
  const std::size_t n = curve.entries.size();
  if (n < 3) throw ConfigError("window selection needs at least 3 tested sizes");
  std::size_t best = 0;
  double best_cl = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < n; ++s) {
    const double cl = split_code_length(curve, s, form);
    if (cl < best_cl) {
      best_cl = cl;
      best = s;
    }
  }
  return curve.entries[best + 1].rho;
}

std::vector<std::vector<std::vector<double>>> group_centroids(const SeriesPanel& panel,
                                                              const ScanResult& scan) {
  const std::size_t rho = scan.rho;
  std::vector<std::vector<std::vector<double>>> out(scan.partitions.size());
  for (std::size_t j = 0; j < scan.partitions.size(); ++j) {
    for (const auto& group : scan.partitions[j].groups) {
      std::vector<double> c(rho, 0.0);
      for (std::size_t i : group) {
        for (std::size_t k = 0; k < rho; ++k) c[k] += panel.at(i, j * rho + k).value_or(0.0);
      }
      for (double& v : c) v /= static_cast<double>(group.size());
      out[j].push_back(std::move(c));
    }
  }
  return out;
}

RegimeCatalog canonicalize_centroids(
    const std::vector<std::vector<std::vector<double>>>& centroids,
    const std::vector<std::vector<std::size_t>>& group_sizes, std::size_t rho,
    double theta_match) {
  struct Item {
    std::size_t stamp;
    std::size_t group;
  };
  std::vector<Item> items;
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    for (std::size_t g = 0; g < centroids[j].size(); ++g) items.push_back({j, g});
  }
  const std::size_t n = items.size();

  std::vector<std::vector<double>> sum(n);
  std::vector<std::size_t> count(n, 1);
  std::vector<std::vector<double>> profile(n);
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t a = 0; a < n; ++a) {
    sum[a] = centroids[items[a].stamp][items[a].group];
    profile[a] = sum[a];
  }
  std::vector<char> active(n, 1);
  std::vector<std::size_t> nn(n, n);
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());

  auto dist = [&](std::size_t a, std::size_t b) { return rms_distance(profile[a], profile[b]); };
  auto refresh = [&](std::size_t a) {
    nn[a] = n;
    nnd[a] = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a || !active[b]) continue;
      const double d = dist(a, b);
      if (d < nnd[a]) {
        nnd[a] = d;
        nn[a] = b;
      }
    }
  };
  for (std::size_t a = 0; a < n; ++a) refresh(a);

  while (true) {
    std::size_t a = n;
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || nn[x] == n) continue;
      if (a == n || nnd[x] < nnd[a]) a = x;
    }
    if (a == n || nnd[a] > theta_match) break;
    std::size_t b = nn[a];
    if (b < a) std::swap(a, b);
    for (std::size_t k = 0; k < rho; ++k) sum[a][k] += sum[b][k];
    count[a] += count[b];
    for (std::size_t k = 0; k < rho; ++k) profile[a][k] = sum[a][k] / static_cast<double>(count[a]);
    active[b] = 0;
    for (std::size_t x = 0; x < n; ++x) {
      if (parent[x] == static_cast<int>(b)) parent[x] = static_cast<int>(a);
    }
    refresh(a);
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || x == a) continue;
      if (nn[x] == a || nn[x] == b) {
        refresh(x);
      } else {
        const double d = dist(x, a);
        if (d < nnd[x] || (d == nnd[x] && a < nn[x])) {
          nnd[x] = d;
          nn[x] = a;
        }
      }
    }
  }

  // Name clusters by first stamp, then size there (descending), then position.
  struct Key {
    std::size_t root, first_stamp, size_at_first, first_item;
  };
  std::vector<Key> keys;
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t root = static_cast<std::size_t>(parent[x]);
    auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.root == root; });
    const std::size_t sz = group_sizes[items[x].stamp][items[x].group];
    if (it == keys.end()) {
      keys.push_back({root, items[x].stamp, sz, x});
    } else if (items[x].stamp == it->first_stamp) {
      it->size_at_first += sz;
    }
  }
  std::sort(keys.begin(), keys.end(), [](const Key& l, const Key& r) {
    if (l.first_stamp != r.first_stamp) return l.first_stamp < r.first_stamp;
    if (l.size_at_first != r.size_at_first) return l.size_at_first > r.size_at_first;
    return l.first_item < r.first_item;
  });

  RegimeCatalog cat;
  cat.rho = rho;
  cat.K = keys.size();
  std::vector<int> label_of_root(n, 0);
  for (std::size_t r = 0; r < keys.size(); ++r) {
    label_of_root[keys[r].root] = static_cast<int>(r + 1);
    cat.profiles.push_back(ProfilePattern::from_values(profile[keys[r].root]));
  }
  cat.assignment.resize(centroids.size());
  for (std::size_t j = 0; j < centroids.size(); ++j) cat.assignment[j].resize(centroids[j].size());
  for (std::size_t x = 0; x < n; ++x) {
    cat.assignment[items[x].stamp][items[x].group] = label_of_root[static_cast<std::size_t>(parent[x])];
  }
  return cat;
}

RegimeCatalog canonicalize_regimes(const SeriesPanel& panel, const ScanResult& scan,
                                   double theta_match) {
  std::vector<std::vector<std::size_t>> sizes(scan.partitions.size());
  for (std::size_t j = 0; j < scan.partitions.size(); ++j) {
    for (const auto& g : scan.partitions[j].groups) sizes[j].push_back(g.size());
  }
  return canonicalize_centroids(group_centroids(panel, scan), sizes, scan.rho, theta_match);
}

nlohmann::json catalog_to_json(const RegimeCatalog& catalog) {
  nlohmann::json j;
  j["rho"] = catalog.rho;
  j["K"] = catalog.K;
  j["profiles"] = nlohmann::json::array();
  for (std::size_t r = 0; r < catalog.profiles.size(); ++r) {
    const auto& p = catalog.profiles[r];
    j["profiles"].push_back(
        {{"regime", r + 1}, {"mean", p.mean}, {"sd", p.sd}, {"shape", p.shape}});
  }
  j["assignment"] = catalog.assignment;
  return j;
}

RegimeCatalog catalog_from_json(const nlohmann::json& j) {
  RegimeCatalog cat;
  try {
    cat.rho = j.at("rho").get<std::size_t>();
    cat.K = j.at("K").get<std::size_t>();
    for (const auto& p : j.at("profiles")) {
      ProfilePattern pp;
      pp.mean = p.at("mean").get<double>();
      pp.sd = p.at("sd").get<double>();
      pp.shape = p.at("shape").get<std::vector<double>>();
      cat.profiles.push_back(std::move(pp));
    }
    cat.assignment = j.at("assignment").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed regime catalog: ") + e.what());
  }
  if (cat.profiles.size() != cat.K) throw DataError("regime catalog K does not match profiles");
  return cat;
}

void write_density_csv(const DensityCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "rho,score\n";
  for (const auto& e : curve.entries) out << e.rho << ',' << e.score << '\n';
}

}  // namespace atlas
