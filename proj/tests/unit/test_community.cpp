#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "atlas/community.hpp"
#include "atlas/error.hpp"

using namespace atlas;

namespace {

StampNetwork two_cliques(int inner, int bridge) {
  std::vector<std::size_t> nodes(10);
  std::iota(nodes.begin(), nodes.end(), 0);
  StampNetwork net(0, 20, nodes);
  for (std::size_t a = 0; a < 10; ++a) {
    for (std::size_t b = a + 1; b < 10; ++b) {
      if ((a < 5) == (b < 5)) net.set_weight(a, b, inner);
    }
  }
  net.set_weight(4, 5, bridge);
  return net;
}

double plogp(double p) { return p > 0 ? p * std::log2(p) : 0.0; }

// Independent two-level map equation: L = q H(Q) + sum p_i H(P_i).
double oracle_codelength(const StampNetwork& net, const std::vector<int>& mod) {
  const std::size_t n = net.size();
  double two_w = 0.0;
  std::vector<double> s(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) s[a] += net.weight(a, b);
    }
    two_w += s[a];
  }
  std::map<int, double> exit, flow;
  for (std::size_t a = 0; a < n; ++a) {
    flow[mod[a]] += s[a] / two_w;
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && mod[a] != mod[b]) exit[mod[a]] += net.weight(a, b) / two_w;
    }
  }
  double q = 0.0;
  for (auto [m, e] : exit) q += e;
  double index_entropy = 0.0;
  for (auto [m, e] : exit) {
    if (e > 0) index_entropy -= (e / q) * std::log2(e / q);
  }
  double len = q > 0 ? q * index_entropy : 0.0;
  for (auto [m, p] : flow) {
    const double e = exit.count(m) ? exit[m] : 0.0;
    const double total = e + p;
    double h = 0.0;
    if (e > 0) h -= (e / total) * std::log2(e / total);
    for (std::size_t a = 0; a < n; ++a) {
      if (mod[a] != m) continue;
      const double r = s[a] / two_w / total;
      if (r > 0) h -= r * std::log2(r);
    }
    len += total * h;
  }
  return len;
}

double oracle_modularity(const StampNetwork& net, const std::vector<int>& mod) {
  const std::size_t n = net.size();
  double two_w = 0.0;
  std::vector<double> s(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) s[a] += net.weight(a, b);
    }
    two_w += s[a];
  }
  double q = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (mod[a] != mod[b]) continue;
      const double w = a == b ? 0.0 : net.weight(a, b);
      q += w - s[a] * s[b] / two_w;
    }
  }
  return q / two_w;
}

std::vector<int> membership(const Partition& p, const StampNetwork& net) {
  std::vector<int> mod(net.size(), -1);
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    for (std::size_t i : p.groups[g]) {
      const auto pos = std::find(net.nodes().begin(), net.nodes().end(), i) - net.nodes().begin();
      mod[static_cast<std::size_t>(pos)] = static_cast<int>(g);
    }
  }
  return mod;
}

}  // namespace

TEST_CASE("codelength and modularity agree with direct formulas") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + rng() % 10;
    std::vector<std::size_t> nodes(n);
    std::iota(nodes.begin(), nodes.end(), 0);
    StampNetwork net(0, 10, nodes);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) net.set_weight(a, b, static_cast<int>(rng() % 6));
    }
    std::vector<int> mod(n);
    for (auto& m : mod) m = static_cast<int>(rng() % 4);
    if (net.edge_count() == 0) continue;
    CHECK(map_equation_codelength(net, mod) == doctest::Approx(oracle_codelength(net, mod)).epsilon(1e-10));
    CHECK(modularity(net, mod) == doctest::Approx(oracle_modularity(net, mod)).epsilon(1e-10));
  }
}

TEST_CASE("two cliques with a weak bridge split in two and beat every bipartition") {
  const StampNetwork net = two_cliques(5, 1);
  for (auto method : {CommunityMethod::map_equation, CommunityMethod::modularity}) {
    CommunityOptions opt;
    opt.method = method;
    const Partition p = detect_communities(net, opt);
    REQUIRE(p.size() == 2);
    CHECK(p.groups[0] == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(p.groups[1] == std::vector<std::size_t>{5, 6, 7, 8, 9});
    const auto mod = membership(p, net);
    for (unsigned mask = 0; mask < (1u << 9); ++mask) {
      std::vector<int> other(10, 0);
      for (std::size_t v = 1; v < 10; ++v) other[v] = (mask >> (v - 1)) & 1u;
      if (method == CommunityMethod::map_equation) {
        CHECK(map_equation_codelength(net, mod) <= map_equation_codelength(net, other) + 1e-12);
      } else {
        CHECK(modularity(net, mod) >= modularity(net, other) - 1e-12);
      }
    }
  }
}

TEST_CASE("partitions cover every node exactly once and are reproducible") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 20 + rng() % 30;
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back(3 * i + 1);
    StampNetwork net(2, 8, nodes);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const bool same = a % 3 == b % 3;
        net.set_weight(a, b, static_cast<int>(rng() % (same ? 8 : 2)));
      }
    }
    const Partition p = detect_communities(net);
    std::vector<std::size_t> seen;
    for (const auto& g : p.groups) {
      CHECK(std::is_sorted(g.begin(), g.end()));
      seen.insert(seen.end(), g.begin(), g.end());
    }
    std::sort(seen.begin(), seen.end());
    CHECK(seen == nodes);
    for (std::size_t g = 1; g < p.groups.size(); ++g) CHECK(p.groups[g - 1][0] < p.groups[g][0]);
    CHECK(detect_communities(net).groups == p.groups);
  }
}

TEST_CASE("isolated nodes form singleton groups") {
  StampNetwork net(0, 5, {0, 1, 2});
  const Partition p = detect_communities(net);
  CHECK(p.size() == 3);
}

TEST_CASE("centroids and RMS distance") {
  const std::vector<std::vector<double>> members{{0.0, 1.0, 2.0}, {2.0, 3.0, 4.0}};
  const ProfilePattern c = group_centroid(members);
  const auto v = c.values();
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[2] == doctest::Approx(3.0));
  CHECK(c.mean == doctest::Approx(2.0));
  CHECK(c.sd == doctest::Approx(std::sqrt(2.0 / 3.0)));
  const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
  CHECK(rms_distance(a, b) == doctest::Approx(std::sqrt(12.5)));
  CHECK_THROWS_AS(parse_community_method("spectral"), ConfigError);
}
