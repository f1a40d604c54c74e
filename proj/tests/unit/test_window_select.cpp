#include <doctest.h>

#include <cmath>
#include <random>

#include "atlas/error.hpp"
#include "atlas/synth.hpp"
#include "atlas/window_select.hpp"

using namespace atlas;

namespace {

DensityCurve curve_of(std::vector<std::pair<std::size_t, double>> pts) {
  DensityCurve c;
  for (auto [r, s] : pts) c.entries.push_back({r, s});
  return c;
}

double oracle_lsq(const std::vector<double>& scores, std::size_t split) {
  auto side = [&](std::size_t a, std::size_t b) {
    double mean = 0.0;
    for (std::size_t k = a; k <= b; ++k) mean += std::log2(scores[k]);
    mean /= static_cast<double>(b - a + 1);
    double ss = 0.0;
    for (std::size_t k = a; k <= b; ++k) ss += std::pow(std::log2(scores[k]) - mean, 2);
    return ss;
  };
  return side(0, split) + side(split + 1, scores.size() - 1);
}

}  // namespace

TEST_CASE("selection lands on the border between high and low scores") {
  const auto c = curve_of({{2, 8.0}, {3, 7.9}, {4, 0.5}, {5, 0.49}, {6, 0.48}});
  // The minimum code-length split separates {2,3} from {4,5,6}; the first
  // size on the low side is reported.
  CHECK(select_window(c) == 4);
  CHECK(select_window(c, MdlForm::deviation_from_mean) == 4);
  for (std::size_t s = 0; s + 1 < c.entries.size(); ++s) {
    if (s != 1) CHECK(split_code_length(c, 1, MdlForm::log_least_squares) < split_code_length(c, s, MdlForm::log_least_squares));
  }
}

TEST_CASE("least-squares code length matches a direct computation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> scores(3 + rng() % 20);
    DensityCurve c;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      scores[k] = u(rng);
      c.entries.push_back({k + 2, scores[k]});
    }
    for (std::size_t s = 0; s + 1 < scores.size(); ++s) {
      CHECK(split_code_length(c, s, MdlForm::log_least_squares) ==
            doctest::Approx(oracle_lsq(scores, s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("selection ties go to the earliest split") {
  const auto c = curve_of({{2, 1.0}, {3, 1.0}, {4, 1.0}, {5, 1.0}});
  CHECK(select_window(c) == 3);
}

TEST_CASE("selection needs three sizes") {
  CHECK_THROWS_AS(select_window(curve_of({{2, 1.0}, {3, 0.5}})), ConfigError);
  CHECK_THROWS_AS(parse_mdl_form("bic"), ConfigError);
  CHECK_THROWS_AS(parse_density_mode("mean"), ConfigError);
}

TEST_CASE("candidate ranges") {
  CHECK(rho_range(10, 30, 10) == std::vector<std::size_t>{10, 20, 30});
  CHECK(rho_range(10, 29, 10) == std::vector<std::size_t>{10, 20});
  CHECK_THROWS_AS(rho_range(1, 5, 0), ConfigError);
  const auto d = default_candidates(1125);
  CHECK(d.front() == 2);
  CHECK(d.back() <= 200);
  CHECK(d.size() <= 60);
  CHECK(default_candidates(40) == rho_range(2, 10, 1));
}

TEST_CASE("matching merges equal shapes and keeps distinct ones apart") {
  // Stamp 0: a big rising group and a small falling one. Stamp 1: falling,
  // rising and a flat newcomer.
  const std::vector<double> up{0.0, 0.5, 1.0}, down{1.0, 0.5, 0.0}, flat{0.5, 0.5, 0.5};
  const std::vector<double> up2{0.02, 0.52, 0.98};
  const std::vector<std::vector<std::vector<double>>> cents{{down, up}, {up2, down, flat}};
  const std::vector<std::vector<std::size_t>> sizes{{3, 10}, {9, 4, 2}};
  const RegimeCatalog cat = canonicalize_centroids(cents, sizes, 3, 0.15);
  CHECK(cat.K == 3);
  CHECK(cat.assignment[0] == std::vector<int>{2, 1});
  CHECK(cat.assignment[1] == std::vector<int>{1, 2, 3});
  CHECK(cat.profiles[0].values()[0] == doctest::Approx(0.01));
  const RegimeCatalog strict = canonicalize_centroids(cents, sizes, 3, 0.0);
  CHECK(strict.K == 4);
  const RegimeCatalog loose = canonicalize_centroids(cents, sizes, 3, 10.0);
  CHECK(loose.K == 1);
}

TEST_CASE("catalog JSON round-trip") {
  const std::vector<std::vector<std::vector<double>>> cents{{{0.0, 1.0}, {1.0, 0.0}}, {{0.1, 0.9}}};
  const RegimeCatalog cat = canonicalize_centroids(cents, {{2, 1}, {3}}, 2, 0.15);
  const RegimeCatalog back = catalog_from_json(nlohmann::json::parse(catalog_to_json(cat).dump()));
  CHECK(back.K == cat.K);
  CHECK(back.rho == cat.rho);
  CHECK(back.assignment == cat.assignment);
  for (std::size_t r = 0; r < cat.K; ++r) {
    CHECK(back.profiles[r].values() == cat.profiles[r].values());
  }
}

TEST_CASE("density is K over rho at the generator segment length") {
  SynthConfig c;
  c.n_series = 60;
  c.n_stamps = 600;
  c.segment_length = 60;
  c.noise_sd = 0.0;
  const auto s = generate_synthetic(c);
  const ScanResult r = scan(s.panel, 60);
  CHECK(r.partitions.size() == 10);
  CHECK(density_score(s.panel, r) == doctest::Approx(5.0 / 60.0));
  ScanOptions stamp_max;
  stamp_max.density = DensityMode::stamp_max;
  CHECK(density_score(s.panel, r, stamp_max) == doctest::Approx(static_cast<double>(r.max_groups()) / 60.0));
}

TEST_CASE("sweep stops at the first small change") {
  SynthConfig c;
  c.n_series = 40;
  c.n_stamps = 400;
  c.segment_length = 40;
  const auto s = generate_synthetic(c);
  const auto cands = rho_range(10, 80, 10);
  const DensityCurve curve = sweep(s.panel, cands, 0.01);
  REQUIRE_FALSE(curve.entries.empty());
  double prev = 0.0;
  for (std::size_t k = 0; k < curve.entries.size(); ++k) {
    CHECK(curve.entries[k].rho == cands[k]);
    const bool small = std::abs(curve.entries[k].score - prev) < 0.01;
    if (k + 1 < curve.entries.size()) CHECK_FALSE(small);
    if (k + 1 == curve.entries.size() && curve.entries.size() < cands.size()) CHECK(small);
    prev = curve.entries[k].score;
  }
  CHECK_THROWS_AS(sweep(s.panel, {20, 10}, 0.01), ConfigError);
  CHECK_THROWS_AS(sweep(s.panel, {}, 0.01), ConfigError);
}
