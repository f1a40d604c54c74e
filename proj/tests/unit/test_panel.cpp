#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "atlas/error.hpp"
#include "atlas/panel.hpp"

using namespace atlas;

TEST_CASE("one empty cell becomes the only gap") {
  const auto lp = parse_csv("a,b,c\n1,2,3\n4,,6\n7,8,9\n10,11,12\n", CsvLayout::rows_are_time);
  CHECK(lp.panel.n_series() == 3);
  CHECK(lp.panel.n_stamps() == 4);
  CHECK(lp.gaps.count() == 1);
  CHECK(lp.gaps.missing(1, 1));
  CHECK_FALSE(lp.panel.at(1, 1).has_value());
}

TEST_CASE("min-max normalization per series") {
  const auto lp = parse_csv("s\n2\n4\n6\n", CsvLayout::rows_are_time);
  CHECK(*lp.panel.at(0, 0) == 0.0);
  CHECK(*lp.panel.at(0, 1) == 0.5);
  CHECK(*lp.panel.at(0, 2) == 1.0);
}

TEST_CASE("constant series map to 0.5 and are flagged") {
  const auto lp = parse_csv("s,t\n5,1\n5,2\n5,3\n", CsvLayout::rows_are_time);
  for (std::size_t l = 0; l < 3; ++l) CHECK(*lp.panel.at(0, l) == 0.5);
  CHECK(lp.panel.scale(0).constant);
  CHECK_FALSE(lp.panel.scale(1).constant);
}

TEST_CASE("rows=series layout reads ids from the first column") {
  const auto lp = parse_csv("id,t1,t2,t3\nx,1,2,3\ny,3,,1\n", CsvLayout::rows_are_series);
  CHECK(lp.panel.ids() == std::vector<std::string>{"x", "y"});
  CHECK(lp.panel.n_stamps() == 3);
  CHECK(lp.gaps.missing(1, 1));
  CHECK(*lp.panel.at(1, 0) == 1.0);
}

TEST_CASE("structural errors") {
  CHECK_THROWS_AS(parse_csv("a,b\n1,2\n3\n", CsvLayout::rows_are_time), DataError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,x\n", CsvLayout::rows_are_time), DataError);
  CHECK_THROWS_AS(parse_layout("rows=cols"), ConfigError);
}

TEST_CASE("all-missing series are accepted with a warning") {
  const auto lp = parse_csv("a,b\n1,\n2,\n", CsvLayout::rows_are_time);
  CHECK(lp.panel.has_warnings());
  CHECK(lp.panel.scale(1).all_missing);
}

TEST_CASE("denormalization round-trips within 1e-12") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<std::vector<std::optional<double>>> raw(5, std::vector<std::optional<double>>(40));
  for (auto& s : raw) {
    for (auto& v : s) v = u(rng);
  }
  const SeriesPanel p = SeriesPanel::from_raw({"a", "b", "c", "d", "e"}, raw);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto back = p.denormalized(i);
    for (std::size_t l = 0; l < 40; ++l) {
      CHECK(*p.at(i, l) >= 0.0);
      CHECK(*p.at(i, l) <= 1.0);
      CHECK(std::abs(*back[l] - *raw[i][l]) <= 1e-12 * std::max(1.0, std::abs(*raw[i][l])));
    }
  }
}

TEST_CASE("csv and scale sidecar round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "atlas_panel_test";
  std::filesystem::create_directories(dir);
  const auto lp = parse_csv("a,b\n1,10\n,20\n3,40\n", CsvLayout::rows_are_time);
  write_csv(lp.panel, dir / "p.csv", true);
  const auto again = load_csv(dir / "p.csv", CsvLayout::rows_are_time);
  CHECK(again.panel == lp.panel);
  SeriesPanel copy = again.panel;
  scale_from_json(scale_to_json(lp.panel), copy);
  CHECK(copy.scale(1).max == 40.0);
  std::filesystem::remove_all(dir);
}
