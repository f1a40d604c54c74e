#include <doctest.h>

#include <cmath>
#include <set>

#include "atlas/error.hpp"
#include "atlas/synth.hpp"

using namespace atlas;

TEST_CASE("default configuration has the benchmark size") {
  SynthConfig c;
  c.n_series = 450;
  c.n_stamps = 1125;
  const auto s = generate_synthetic(c);
  CHECK(s.panel.n_series() == 450);
  CHECK(s.panel.n_stamps() == 1125);
  CHECK(s.gaps.count() == 0);
}

TEST_CASE("noise-free segments equal their generator shape") {
  SynthConfig c;
  c.n_series = 20;
  c.n_stamps = 300;
  c.noise_sd = 0.0;
  c.seed = 11;
  const auto s = generate_synthetic(c);
  // The panel renormalizes each series over its whole length, so compare the
  // min-max rescaled segment against the rescaled generator shape.
  for (std::size_t i = 0; i < c.n_series; ++i) {
    for (std::size_t seg = 0; seg < c.n_segments(); ++seg) {
      const int r = s.truth.at(i, seg * c.segment_length);
      const auto shape = regime_shape(r, c.segment_length);
      const double lo = *std::min_element(shape.begin(), shape.end());
      const double hi = *std::max_element(shape.begin(), shape.end());
      std::vector<double> seg_vals;
      for (std::size_t k = 0; k < c.segment_length; ++k) {
        seg_vals.push_back(*s.panel.at(i, seg * c.segment_length + k));
      }
      const double slo = *std::min_element(seg_vals.begin(), seg_vals.end());
      const double shi = *std::max_element(seg_vals.begin(), seg_vals.end());
      for (std::size_t k = 0; k < c.segment_length; ++k) {
        const double expect = (shape[k] - lo) / (hi - lo);
        const double got = (seg_vals[k] - slo) / (shi - slo);
        CHECK(std::abs(expect - got) < 1e-12);
        CHECK(s.truth.at(i, seg * c.segment_length + k) == r);
      }
    }
  }
}

TEST_CASE("single-regime law puts every segment in that regime") {
  SynthConfig c;
  c.n_series = 10;
  c.n_stamps = 150;
  c.noise_sd = 0.0;
  c.switch_law = {RegimeLaw{0, 1, 0, 0, 0}};
  const auto s = generate_synthetic(c);
  for (int label : s.truth.labels) CHECK(label == 2);
}

TEST_CASE("fixed seed gives bit-identical panels") {
  SynthConfig c;
  c.n_series = 30;
  c.n_stamps = 225;
  CHECK(generate_synthetic(c).panel == generate_synthetic(c).panel);
  SynthConfig d = c;
  d.seed = c.seed + 1;
  CHECK_FALSE(generate_synthetic(c).panel == generate_synthetic(d).panel);
}

TEST_CASE("switch-law rows must sum to one") {
  SynthConfig c;
  c.switch_law = {RegimeLaw{0.5, 0.5, 0.1, 0, 0}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(generate_synthetic(c), ConfigError);
}

TEST_CASE("deletion draws stay inside the floor bounds") {
  SynthConfig c;
  const auto s = generate_synthetic(c);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Deletion d = delete_values(s.panel, seed);
    CHECK(d.series.size() >= 1);
    CHECK(d.series.size() <= 15);
    CHECK(d.length >= 37);
    CHECK(d.length <= 112);
    CHECK(d.start + d.length < 1125);
    std::set<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t i : d.series) {
      for (std::size_t l = d.start; l <= d.start + d.length; ++l) expected.insert({i, l});
    }
    std::size_t found = 0;
    for (std::size_t i = 0; i < 450; ++i) {
      for (std::size_t l = 0; l < 1125; ++l) {
        if (d.gaps.missing(i, l)) {
          CHECK(expected.count({i, l}) == 1);
          ++found;
        }
      }
    }
    CHECK(found == expected.size());
  }
}

TEST_CASE("deletion is deterministic and validates its bounds") {
  SynthConfig c;
  c.n_series = 60;
  c.n_stamps = 300;
  const auto s = generate_synthetic(c);
  CHECK(delete_values(s.panel, 5).panel == delete_values(s.panel, 5).panel);
  SynthConfig small = c;
  small.n_series = 29;
  CHECK_THROWS_AS(delete_values(generate_synthetic(small).panel, 1), ConfigError);
}

TEST_CASE("decaying law fades one regime and keeps rows normalized") {
  const auto law = decaying_law(15, 5, 8);
  CHECK(law.size() == 15);
  for (std::size_t s = 0; s < law.size(); ++s) {
    double sum = 0.0;
    for (double p : law[s]) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    if (s > 0) CHECK(law[s][4] <= law[s - 1][4]);
  }
  CHECK(law.back()[4] == 0.0);
}
