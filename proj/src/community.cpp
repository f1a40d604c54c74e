#include "atlas/community.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "atlas/error.hpp"

namespace atlas {

CommunityMethod parse_community_method(const std::string& text) {
  if (text == "map-equation" || text == "infomap") return CommunityMethod::map_equation;
  if (text == "modularity") return CommunityMethod::modularity;
  throw ConfigError("unknown community method '" + text + "'");
}

namespace {

double plogp(double p) { return p > 0 ? p * std::log2(p) : 0.0; }

// Undirected weighted graph over "super-nodes". At the leaf level every
// super-node is one network node; after aggregation a super-node is a module.
struct FlowGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // no self loops
  std::vector<double> strength;  // total original strength of members
  std::vector<double> external;  // weight to other super-nodes
  double total_weight = 0.0;     // sum of edge weights, each edge once
};

FlowGraph leaf_graph(const StampNetwork& net, const std::vector<std::size_t>& active) {
  FlowGraph g;
  g.n = active.size();
  g.adj.resize(g.n);
  g.strength.assign(g.n, 0.0);
  for (std::size_t x = 0; x < active.size(); ++x) {
    for (std::size_t y = x + 1; y < active.size(); ++y) {
      const int w = net.weight(active[x], active[y]);
      if (w <= 0) continue;
      g.adj[x].emplace_back(y, w);
      g.adj[y].emplace_back(x, w);
      g.strength[x] += w;
      g.strength[y] += w;
      g.total_weight += w;
    }
  }
  g.external = g.strength;
  return g;
}

FlowGraph aggregate(const FlowGraph& g, const std::vector<int>& module_of, std::size_t k) {
  FlowGraph h;
  h.n = k;
  h.adj.resize(k);
  h.strength.assign(k, 0.0);
  h.external.assign(k, 0.0);
  h.total_weight = g.total_weight;
  std::vector<std::map<std::size_t, double>> acc(k);
  for (std::size_t v = 0; v < g.n; ++v) {
    const auto mv = static_cast<std::size_t>(module_of[v]);
    h.strength[mv] += g.strength[v];
    for (auto [u, w] : g.adj[v]) {
      const auto mu = static_cast<std::size_t>(module_of[u]);
      if (mu != mv) acc[mv][mu] += w;
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (auto [b, w] : acc[a]) {
      h.adj[a].emplace_back(b, w);
      h.external[a] += w;
    }
  }
  return h;
}

// Local moving of super-nodes between modules for one objective.
class Mover {
 public:
  Mover(const FlowGraph& g, CommunityMethod method) : g_(g), method_(method) {
    module_of_.resize(g.n);
    std::iota(module_of_.begin(), module_of_.end(), 0);
    mod_flow_.resize(g.n);
    mod_exit_.resize(g.n);
    mod_tot_.resize(g.n);
    const double two_w = 2.0 * g.total_weight;
    for (std::size_t v = 0; v < g.n; ++v) {
      mod_flow_[v] = g.strength[v] / two_w;
      mod_exit_[v] = g.external[v] / two_w;
      mod_tot_[v] = g.strength[v];
    }
    exit_total_ = std::accumulate(mod_exit_.begin(), mod_exit_.end(), 0.0);
    touched_weight_.assign(g.n, 0.0);
  }

  // Returns the number of moves made in this sweep.
  std::size_t sweep(const std::vector<std::size_t>& order) {
    std::size_t moves = 0;
    const double two_w = 2.0 * g_.total_weight;
    for (std::size_t v : order) {
      const int from = module_of_[v];
      touched_.clear();
      for (auto [u, w] : g_.adj[v]) {
        const int mu = module_of_[u];
        if (touched_weight_[mu] == 0.0) touched_.push_back(mu);
        touched_weight_[mu] += w;
      }
      const double w_from = touched_weight_[from];
      int best = from;
      double best_delta = 0.0;
      std::sort(touched_.begin(), touched_.end());
      for (int to : touched_) {
        if (to == from) continue;
        const double delta = method_ == CommunityMethod::map_equation
                                 ? map_delta(v, from, to, w_from, touched_weight_[to], two_w)
                                 : modularity_delta(v, from, to, w_from, touched_weight_[to]);
        if (delta < best_delta - 1e-12) {
          best_delta = delta;
          best = to;
        }
      }
      if (best != from) {
        apply_move(v, from, best, w_from, touched_weight_[best], two_w);
        ++moves;
      }
      for (int m : touched_) touched_weight_[m] = 0.0;
      touched_weight_[from] = 0.0;
    }
    return moves;
  }

  const std::vector<int>& module_of() const { return module_of_; }

 private:
  double term(double exit, double flow) const { return -2.0 * plogp(exit) + plogp(exit + flow); }

  // Change of codelength (up to the constant node-entropy term).
  double map_delta(std::size_t v, int from, int to, double w_from, double w_to,
                   double two_w) const {
    const double p = g_.strength[v] / two_w;
    const double ext = g_.external[v];
    const double exit_from_new = mod_exit_[from] - (ext - 2.0 * w_from) / two_w;
    const double exit_to_new = mod_exit_[to] + (ext - 2.0 * w_to) / two_w;
    const double total_new = exit_total_ - mod_exit_[from] - mod_exit_[to] + exit_from_new + exit_to_new;
    const double before = plogp(exit_total_) + term(mod_exit_[from], mod_flow_[from]) +
                          term(mod_exit_[to], mod_flow_[to]);
    const double after = plogp(total_new) + term(exit_from_new, mod_flow_[from] - p) +
                         term(exit_to_new, mod_flow_[to] + p);
    return after - before;
  }

  // Negative modularity gain, so that smaller is better for both objectives.
  double modularity_delta(std::size_t v, int from, int to, double w_from, double w_to) const {
    const double m = g_.total_weight;
    const double k = g_.strength[v];
    const double gain_to = w_to / m - (mod_tot_[to]) * k / (2.0 * m * m);
    const double gain_from = w_from / m - (mod_tot_[from] - k) * k / (2.0 * m * m);
    return -(gain_to - gain_from);
  }

  void apply_move(std::size_t v, int from, int to, double w_from, double w_to, double two_w) {
    const double p = g_.strength[v] / two_w;
    const double ext = g_.external[v];
    const double exit_from_new = mod_exit_[from] - (ext - 2.0 * w_from) / two_w;
    const double exit_to_new = mod_exit_[to] + (ext - 2.0 * w_to) / two_w;
    exit_total_ += exit_from_new - mod_exit_[from] + exit_to_new - mod_exit_[to];
    mod_exit_[from] = std::max(0.0, exit_from_new);
    mod_exit_[to] = exit_to_new;
    mod_flow_[from] -= p;
    mod_flow_[to] += p;
    mod_tot_[from] -= g_.strength[v];
    mod_tot_[to] += g_.strength[v];
    module_of_[v] = to;
  }

  const FlowGraph& g_;
  CommunityMethod method_;
  std::vector<int> module_of_;
  std::vector<double> mod_flow_;
  std::vector<double> mod_exit_;
  std::vector<double> mod_tot_;
  double exit_total_ = 0.0;
  std::vector<double> touched_weight_;
  std::vector<int> touched_;
};

// Relabels modules to 0..k-1 in order of first appearance.
std::size_t compact(std::vector<int>& module_of) {
  std::map<int, int> relabel;
  for (int& m : module_of) {
    auto [it, inserted] = relabel.try_emplace(m, static_cast<int>(relabel.size()));
    m = it->second;
  }
  return relabel.size();
}

std::vector<int> optimize(const FlowGraph& leaf, CommunityMethod method, std::mt19937_64& rng,
                          int max_passes) {
  std::vector<int> leaf_module(leaf.n);
  std::iota(leaf_module.begin(), leaf_module.end(), 0);
  FlowGraph level = leaf;
  while (true) {
    Mover mover(level, method);
    std::vector<std::size_t> order(level.n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t total_moves = 0;
    for (int pass = 0; pass < max_passes; ++pass) {
      const std::size_t moves = mover.sweep(order);
      total_moves += moves;
      if (moves == 0) break;
    }
    if (total_moves == 0) break;
    std::vector<int> level_module = mover.module_of();
    const std::size_t k = compact(level_module);
    for (int& m : leaf_module) m = level_module[static_cast<std::size_t>(m)];
    if (k == level.n) break;
    level = aggregate(level, level_module, k);
  }
  compact(leaf_module);
  return leaf_module;
}

}  // namespace

double map_equation_codelength(const StampNetwork& network, std::span<const int> module_of) {
  const auto edges = network.edges();
  double total = 0.0;
  std::vector<double> strength(network.size(), 0.0);
  for (const auto& e : edges) {
    total += e.weight;
    strength[e.a] += e.weight;
    strength[e.b] += e.weight;
  }
  if (total == 0.0) return 0.0;
  const double two_w = 2.0 * total;
  std::map<int, double> flow;
  std::map<int, double> exit;
  for (std::size_t v = 0; v < network.size(); ++v) flow[module_of[v]] += strength[v] / two_w;
  for (const auto& e : edges) {
    if (module_of[e.a] != module_of[e.b]) {
      exit[module_of[e.a]] += e.weight / two_w;
      exit[module_of[e.b]] += e.weight / two_w;
    }
  }
  double exit_total = 0.0;
  double length = 0.0;
  for (auto [m, q] : exit) {
    exit_total += q;
    length -= 2.0 * plogp(q);
  }
  length += plogp(exit_total);
  for (auto [m, p] : flow) {
    const auto it = exit.find(m);
    const double q = it == exit.end() ? 0.0 : it->second;
    length += plogp(q + p);
  }
  for (double s : strength) length -= plogp(s / two_w);
  return length;
}

double modularity(const StampNetwork& network, std::span<const int> module_of) {
  const auto edges = network.edges();
  double total = 0.0;
  std::map<int, double> tot;
  std::map<int, double> in;
  for (const auto& e : edges) {
    total += e.weight;
    tot[module_of[e.a]] += e.weight;
    tot[module_of[e.b]] += e.weight;
    if (module_of[e.a] == module_of[e.b]) in[module_of[e.a]] += e.weight;
  }
  if (total == 0.0) return 0.0;
  double q = 0.0;
  for (auto [m, t] : tot) {
    const auto it = in.find(m);
    const double inside = it == in.end() ? 0.0 : it->second;
    q += inside / total - (t / (2.0 * total)) * (t / (2.0 * total));
  }
  return q;
}

Partition detect_communities(const StampNetwork& network, const CommunityOptions& options) {
  Partition part;
  part.stamp = network.stamp();
  const std::size_t n = network.size();
  if (n == 0) return part;

  // Isolated nodes carry no flow; each forms its own group.
  std::vector<std::size_t> active;
  std::vector<std::size_t> isolated;
  for (std::size_t v = 0; v < n; ++v) {
    bool connected = false;
    for (std::size_t u = 0; u < n && !connected; ++u) connected = network.weight(v, u) > 0;
    (connected ? active : isolated).push_back(v);
  }

  std::vector<int> module_of(n, -1);
  int next_module = 0;
  if (!active.empty()) {
    const FlowGraph leaf = leaf_graph(network, active);
    std::mt19937_64 rng(options.seed);
    auto objective = [&](const std::vector<int>& leaf_module) {
      std::vector<int> full(n, -1);
      int iso = static_cast<int>(active.size());
      for (std::size_t x = 0; x < active.size(); ++x) full[active[x]] = leaf_module[x];
      for (std::size_t v : isolated) full[v] = iso++;
      return options.method == CommunityMethod::map_equation ? map_equation_codelength(network, full)
                                                             : -modularity(network, full);
    };
    std::vector<int> best(active.size(), 0);  // one module is always a candidate
    double best_value = objective(best);
    for (int t = 0; t < std::max(1, options.trials); ++t) {
      auto candidate = optimize(leaf, options.method, rng, options.max_passes);
      const double value = objective(candidate);
      if (value < best_value - 1e-10) {
        best_value = value;
        best = std::move(candidate);
      }
    }
    for (std::size_t x = 0; x < active.size(); ++x) module_of[active[x]] = best[x];
    next_module = *std::max_element(best.begin(), best.end()) + 1;
  }
  for (std::size_t v : isolated) module_of[v] = next_module++;

  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t v = 0; v < n; ++v) groups[module_of[v]].push_back(network.nodes()[v]);
  for (auto& [m, members] : groups) {
    std::sort(members.begin(), members.end());
    part.groups.push_back(std::move(members));
  }
  std::sort(part.groups.begin(), part.groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  part.quality = options.method == CommunityMethod::map_equation
                     ? map_equation_codelength(network, module_of)
                     : modularity(network, module_of);
  return part;
}

std::vector<double> ProfilePattern::values() const {
  std::vector<double> out(shape.size());
  std::transform(shape.begin(), shape.end(), out.begin(), [this](double s) { return s + mean; });
  return out;
}

ProfilePattern ProfilePattern::from_values(std::vector<double> values) {
  ProfilePattern p;
  if (values.empty()) return p;
  const double n = static_cast<double>(values.size());
  p.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - p.mean) * (v - p.mean);
  p.sd = std::sqrt(ss / n);
  for (double& v : values) v -= p.mean;
  p.shape = std::move(values);
  return p;
}

ProfilePattern group_centroid(std::span<const std::vector<double>> members) {
  if (members.empty()) throw DataError("group_centroid needs at least one member");
  const std::size_t len = members.front().size();
  std::vector<double> sum(len, 0.0);
  for (const auto& m : members) {
    if (m.size() != len) throw DataError("group members have unequal lengths");
    for (std::size_t k = 0; k < len; ++k) sum[k] += m[k];
  }
  for (double& v : sum) v /= static_cast<double>(members.size());
  return ProfilePattern::from_values(std::move(sum));
}

double rms_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("rms_distance needs equal lengths");
  if (a.empty()) return 0.0;
  double ss = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) ss += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

}  // namespace atlas
