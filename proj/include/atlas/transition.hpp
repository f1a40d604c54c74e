#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "atlas/grid.hpp"

namespace atlas {

/// (K+1) x (K+1) matrix indexed by labels 0..K (0 = R^0).
using TransitionMatrix = Eigen::MatrixXd;

/// Jaccard overlap of cell alpha at stamp j with cell beta at stamp j+1.
TransitionMatrix global_switch(const MappingGrid& grid, std::size_t j);

/// Pair counts of consecutive labels divided by (length - 1). A trajectory
/// shorter than 2 gives the zero matrix.
TransitionMatrix switch_from_trajectory(std::span<const int> trajectory, std::size_t K);

/// Pi for series i between stamps j and j+1, from its trajectory up to j+1.
TransitionMatrix series_switch(const MappingGrid& grid, std::size_t series, std::size_t j);

/// Element-wise composition Pi(a,b) Q(a,b), normalized by its total; all
/// zero when the total is zero.
TransitionMatrix effective_transition(const TransitionMatrix& q, const TransitionMatrix& pi);

/// Q for every consecutive stamp pair and Theta for every series.
struct TransitionSet {
  std::vector<TransitionMatrix> q;                   // [j]
  std::vector<std::vector<TransitionMatrix>> theta;  // [j][series]
};

TransitionSet compute_transitions(const MappingGrid& grid);

nlohmann::json transitions_to_json(const TransitionSet& set);
void write_theta_edges(const TransitionSet& set, const std::filesystem::path& path);

}  // namespace atlas
