#include "atlas/transition.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "atlas/error.hpp"

namespace atlas {

TransitionMatrix global_switch(const MappingGrid& grid, std::size_t j) {
  if (j + 1 >= grid.b()) throw ConfigError("global switch needs stamps j and j+1 inside the grid");
  const auto k = static_cast<Eigen::Index>(grid.K() + 1);
  TransitionMatrix q = TransitionMatrix::Zero(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto& from = grid.cell(static_cast<int>(a), j);
    for (Eigen::Index b = 0; b < k; ++b) {
      const auto& to = grid.cell(static_cast<int>(b), j + 1);
      if (from.empty() && to.empty()) continue;
      std::size_t common = 0;
      auto x = from.begin();
      auto y = to.begin();
      while (x != from.end() && y != to.end()) {
        if (*x < *y) {
          ++x;
        } else if (*y < *x) {
          ++y;
        } else {
          ++common;
          ++x;
          ++y;
        }
      }
      const std::size_t uni = from.size() + to.size() - common;
      q(a, b) = static_cast<double>(common) / static_cast<double>(uni);
    }
  }
  return q;
}

TransitionMatrix switch_from_trajectory(std::span<const int> trajectory, std::size_t K) {
  const auto k = static_cast<Eigen::Index>(K + 1);
  TransitionMatrix pi = TransitionMatrix::Zero(k, k);
  if (trajectory.size() < 2) return pi;
  for (std::size_t l = 0; l + 1 < trajectory.size(); ++l) {
    const int a = trajectory[l];
    const int b = trajectory[l + 1];
    if (a < 0 || b < 0 || a >= k || b >= k) throw ConfigError("trajectory label outside 0..K");
    pi(a, b) += 1.0;
  }
  return pi / static_cast<double>(trajectory.size() - 1);
}

TransitionMatrix series_switch(const MappingGrid& grid, std::size_t series, std::size_t j) {
  const auto tr = trajectory(grid, series, std::min(j + 2, grid.b()));
  return switch_from_trajectory(tr, grid.K());
}

TransitionMatrix effective_transition(const TransitionMatrix& q, const TransitionMatrix& pi) {
  if (q.rows() != pi.rows() || q.cols() != pi.cols()) {
    throw ConfigError("Q and Pi have different shapes");
  }
  const TransitionMatrix num = pi.cwiseProduct(q);
  const double den = num.sum();
  if (den == 0.0) return TransitionMatrix::Zero(q.rows(), q.cols());
  return num / den;
}

TransitionSet compute_transitions(const MappingGrid& grid) {
  TransitionSet set;
  for (std::size_t j = 0; j + 1 < grid.b(); ++j) {
    set.q.push_back(global_switch(grid, j));
    std::vector<TransitionMatrix> per_series;
    per_series.reserve(grid.n_series());
    for (std::size_t i = 0; i < grid.n_series(); ++i) {
      per_series.push_back(effective_transition(set.q.back(), series_switch(grid, i, j)));
    }
    set.theta.push_back(std::move(per_series));
  }
  return set;
}

nlohmann::json transitions_to_json(const TransitionSet& set) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t s = 0; s < set.q.size(); ++s) {
    nlohmann::json pair;
    pair["from_stamp"] = s + 1;
    auto q = nlohmann::json::array();
    for (Eigen::Index a = 0; a < set.q[s].rows(); ++a) {
      const auto row = set.q[s].row(a);
      q.push_back(std::vector<double>(row.begin(), row.end()));
    }
    pair["Q"] = std::move(q);
    auto theta = nlohmann::json::array();
    for (std::size_t i = 0; i < set.theta[s].size(); ++i) {
      const auto& t = set.theta[s][i];
      for (Eigen::Index a = 0; a < t.rows(); ++a) {
        for (Eigen::Index b = 0; b < t.cols(); ++b) {
          if (t(a, b) != 0.0) theta.push_back({i, a, b, t(a, b)});
        }
      }
    }
    pair["theta"] = std::move(theta);
    j.push_back(std::move(pair));
  }
  return j;
}

void write_theta_edges(const TransitionSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "from_stamp,series,alpha,beta,theta\n";
  for (std::size_t s = 0; s < set.theta.size(); ++s) {
    for (std::size_t i = 0; i < set.theta[s].size(); ++i) {
      const auto& t = set.theta[s][i];
      for (Eigen::Index a = 0; a < t.rows(); ++a) {
        for (Eigen::Index b = 0; b < t.cols(); ++b) {
          if (t(a, b) != 0.0) out << s + 1 << ',' << i << ',' << a << ',' << b << ',' << t(a, b) << '\n';
        }
      }
    }
  }
}

}  // namespace atlas
