#include <doctest.h>

#include <random>

#include "atlas/error.hpp"
#include "atlas/transition.hpp"

using namespace atlas;

namespace {

MappingGrid grid_from_labels(std::size_t K, const std::vector<std::vector<int>>& columns) {
  MappingGrid g(K, 0, columns.front().size(), 5);
  for (const auto& c : columns) g.append_column(c);
  return g;
}

}  // namespace

TEST_CASE("global switch is the Jaccard overlap of consecutive cells") {
  // Stamp 0: R1={0,1,2}, R2={3}. Stamp 1: R1={0,1}, R2={2,3}.
  const MappingGrid g = grid_from_labels(2, {{1, 1, 1, 2}, {1, 1, 2, 2}});
  const TransitionMatrix q = global_switch(g, 0);
  CHECK(q(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(q(1, 2) == doctest::Approx(1.0 / 4.0));
  CHECK(q(2, 2) == doctest::Approx(1.0 / 2.0));
  CHECK(q(2, 1) == 0.0);
  CHECK(q(0, 0) == 0.0);
  CHECK_THROWS_AS(global_switch(g, 1), ConfigError);
}

TEST_CASE("series switch counts consecutive label pairs") {
  const std::vector<int> tr{1, 2, 1, 2};
  const TransitionMatrix pi = switch_from_trajectory(tr, 2);
  CHECK(pi(1, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(pi(2, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(pi.sum() == doctest::Approx(1.0));
  const std::vector<int> one{1};
  CHECK(switch_from_trajectory(one, 2).isZero());
  const MappingGrid g = grid_from_labels(2, {{1, 0}, {2, 0}, {1, 1}});
  CHECK(series_switch(g, 0, 0) == switch_from_trajectory(std::vector<int>{1, 2}, 2));
  CHECK(series_switch(g, 0, 1) == switch_from_trajectory(std::vector<int>{1, 2, 1}, 2));
}

TEST_CASE("effective transition is normalized on random pairs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng() % 8);
    TransitionMatrix q(k, k), pi(k, k);
    for (Eigen::Index x = 0; x < q.size(); ++x) {
      q(x) = u(rng);
      pi(x) = u(rng) < 0.3 ? 0.0 : u(rng);
    }
    const TransitionMatrix theta = effective_transition(q, pi);
    if (pi.cwiseProduct(q).sum() > 0) {
      CHECK(std::abs(theta.sum() - 1.0) <= 1e-12);
    }
    for (Eigen::Index x = 0; x < q.size(); ++x) {
      CHECK(theta(x) >= 0.0);
      if (pi(x) == 0.0) CHECK(theta(x) == 0.0);
    }
  }
  CHECK(effective_transition(TransitionMatrix::Zero(3, 3), TransitionMatrix::Ones(3, 3)).isZero());
}

TEST_CASE("alternating series keeps its alternation through Theta") {
  const MappingGrid g = grid_from_labels(2, {{1, 2}, {2, 1}, {1, 2}, {2, 1}});
  const TransitionSet set = compute_transitions(g);
  REQUIRE(set.q.size() == 3);
  const TransitionMatrix& theta = set.theta[2][0];
  CHECK(theta(1, 1) == 0.0);
  CHECK(theta(2, 2) == 0.0);
  CHECK(theta(1, 2) + theta(2, 1) == doctest::Approx(1.0));
}
