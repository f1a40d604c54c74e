#include <doctest.h>

#include "atlas/error.hpp"
#include "atlas/forecaster.hpp"

using namespace atlas;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

}  // namespace

TEST_CASE("period-2 sequence is continued by its successor") {
  const auto a = vec({1, 0});
  const auto b = vec({0, 1});
  for (std::size_t k : {1u, 2u}) {
    KnnPredictor knn(k);
    for (const auto& x : {a, b, a, b, a}) knn.push(x);
    CHECK(knn.predict() == b);
    CHECK_FALSE(knn.fell_back());
  }
}

TEST_CASE("k is capped and short histories fall back") {
  KnnPredictor one(3);
  one.push(vec({2, 3}));
  CHECK(one.predict() == vec({2, 3}));
  CHECK(one.fell_back());
  KnnPredictor two(5);
  two.push(vec({0}));
  two.push(vec({4}));
  CHECK(two.predict() == vec({4}));
  KnnPredictor ties(1);
  for (double x : {0.0, 10.0, 0.0, 20.0, 0.0}) ties.push(vec({x}));
  CHECK(ties.predict() == vec({10.0}));
  CHECK_THROWS_AS(KnnPredictor(1).predict(), DataError);
}

TEST_CASE("flatten and unflatten are inverse") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  CHECK(unflatten(flatten(m), 2, 3) == m);
}

TEST_CASE("transition probability branches") {
  TransitionMatrix theta(3, 3);
  theta << 0.1, 0.2, 0.0,
           0.3, 0.1, 0.2,
           0.0, 0.05, 0.05;
  const std::vector<double> surv{0.25, 0.5};
  const auto tp = transition_probabilities(theta, 1, surv);
  CHECK(tp[0] == doctest::Approx(0.3));
  CHECK(tp[1] == doctest::Approx(0.1 * 0.75));
  CHECK(tp[2] == doctest::Approx(0.2 * 0.5));
  const auto flipped = transition_probabilities(theta, 1, surv, true);
  CHECK(flipped[1] == doctest::Approx(0.1 * 0.25));
  const auto from_none = transition_probabilities(theta, 0, surv);
  CHECK(from_none[0] == doctest::Approx(0.1));
  CHECK(from_none[1] == doctest::Approx(0.2 * 0.75));
  CHECK_THROWS_AS(transition_probabilities(theta, 3, surv), ConfigError);
  CHECK_THROWS_AS(transition_probabilities(theta, 1, std::vector<double>{0.5}), ConfigError);
}

TEST_CASE("regime choice ties and persistence") {
  const std::vector<double> tied{0.0, 0.4, 0.4};
  CHECK(choose_regime(tied, 2).label == 1);
  const std::vector<double> zero{0.0, 0.0, 0.0};
  const RegimeChoice p = choose_regime(zero, 2);
  CHECK(p.label == 2);
  CHECK(p.persisted);
  CHECK(p.tp == 0.0);
  const std::vector<double> none{0.6, 0.3, 0.1};
  CHECK(choose_regime(none, 1).label == 0);
}

TEST_CASE("value forecast restores the level and sets the band") {
  const ProfilePattern prof = ProfilePattern::from_values({0.2, 0.4, 0.6});
  const ValueForecast v = forecast_values(prof, 0.5);
  CHECK(v.point[1] == doctest::Approx(0.4));
  const double half = 0.5 * prof.sd / 2.0;
  CHECK(v.upper[0] - v.point[0] == doctest::Approx(half));
  CHECK(v.point[2] - v.lower[2] == doctest::Approx(half));
  const ValueForecast sure = forecast_values(prof, 1.0);
  CHECK(sure.upper == sure.point);
}
