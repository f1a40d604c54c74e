#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "atlas/error.hpp"
#include "atlas/grid.hpp"

using namespace atlas;

namespace {

// Three stamps, six series, two regimes.
MappingGrid sample_grid() {
  RegimeCatalog cat;
  cat.rho = 4;
  cat.K = 2;
  cat.profiles = {ProfilePattern::from_values({0, 1, 2, 3}), ProfilePattern::from_values({3, 2, 1, 0})};
  cat.assignment = {{1, 2}, {2, 1}, {1}};
  std::vector<Partition> parts(3);
  parts[0].groups = {{0, 1, 2}, {3, 4}};
  parts[1].groups = {{0, 1}, {2, 3, 4, 5}};
  parts[2].groups = {{0, 1, 2, 3, 4, 5}};
  return build_grid(cat, parts, 6);
}

}  // namespace

TEST_CASE("groups land in their regime cell and leftovers in R0") {
  const MappingGrid g = sample_grid();
  CHECK(g.K() == 2);
  CHECK(g.b() == 3);
  CHECK(g.cell(1, 0) == std::vector<std::size_t>{0, 1, 2});
  CHECK(g.cell(2, 0) == std::vector<std::size_t>{3, 4});
  CHECK(g.cell(0, 0) == std::vector<std::size_t>{5});
  CHECK(g.cell(2, 1) == std::vector<std::size_t>{0, 1});
  CHECK(g.cell(0, 2).empty());
  CHECK(g.label_of(5, 0) == 0);
  CHECK(g.label_of(5, 1) == 1);
  g.check();
}

TEST_CASE("every column partitions the id set") {
  const MappingGrid g = sample_grid();
  for (std::size_t j = 0; j < g.b(); ++j) {
    std::vector<int> hits(g.n_series(), 0);
    for (int r = 0; r <= static_cast<int>(g.K()); ++r) {
      for (std::size_t i : g.cell(r, j)) ++hits[i];
    }
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("double placement is a stage error") {
  RegimeCatalog cat;
  cat.K = 1;
  cat.rho = 2;
  cat.assignment = {{1, 1}};
  std::vector<Partition> parts(1);
  parts[0].groups = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(build_grid(cat, parts, 3), StageError);
  MappingGrid g(1, 1, 2, 2);
  g.add(1, 0, 0);
  CHECK_THROWS_AS(g.check(), StageError);
}

TEST_CASE("trajectory, lifespan and appended columns") {
  MappingGrid g = sample_grid();
  CHECK(trajectory(g, 0, 3) == std::vector<int>{1, 2, 1});
  CHECK(trajectory(g, 5, 2) == std::vector<int>{0, 1});
  const Lifespan life = lifespan(g, 1);
  CHECK(life.counts == std::vector<std::size_t>{3, 4, 6});
  g.append_column({2, 2, 0, 1, 1, 1});
  CHECK(g.b() == 4);
  CHECK(g.cell(2, 3) == std::vector<std::size_t>{0, 1});
  CHECK(g.label_of(2, 3) == 0);
  g.check();
}

TEST_CASE("JSON round-trip keeps cells and features") {
  MappingGrid g = sample_grid();
  g.set_feature(0, 0, {0.25, -1.5});
  g.set_feature(4, 2, {3.0, 0.125});
  const MappingGrid back = grid_from_json(nlohmann::json::parse(grid_to_json(g).dump()));
  CHECK(back == g);
  CHECK(back.feature(4, 2) == std::vector<double>{3.0, 0.125});
  CHECK(back.feature(5, 0).empty());
}

TEST_CASE("heatmap rows are regimes then R0") {
  const auto path = std::filesystem::temp_directory_path() / "atlas_heatmap_test.csv";
  write_heatmap_csv(sample_grid(), path);
  std::ifstream in(path);
  std::string header, r1, r2, r0;
  std::getline(in, header);
  std::getline(in, r1);
  std::getline(in, r2);
  std::getline(in, r0);
  CHECK(r1.rfind("R1,", 0) == 0);
  CHECK(r2.rfind("R2,", 0) == 0);
  CHECK(r0.rfind("R0,", 0) == 0);
  std::filesystem::remove(path);
}
