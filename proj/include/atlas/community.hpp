#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "atlas/scanner.hpp"

namespace atlas {

enum class CommunityMethod { map_equation, modularity };

CommunityMethod parse_community_method(const std::string& text);

struct CommunityOptions {
  CommunityMethod method = CommunityMethod::map_equation;
  std::uint64_t seed = 1;
  /// Independent node-order restarts; the best objective wins.
  int trials = 2;
  int max_passes = 64;
};

/// Disjoint groups covering every node of one stamp network.
struct Partition {
  std::size_t stamp = 0;
  /// Series indices per group. Each group is sorted; groups are ordered by
  /// their smallest member.
  std::vector<std::vector<std::size_t>> groups;
  /// Map-equation description length (bits) or Newman modularity.
  double quality = 0.0;

  std::size_t size() const { return groups.size(); }
};

Partition detect_communities(const StampNetwork& network, const CommunityOptions& options = {});

/// Two-level map-equation codelength of a membership vector over node
/// positions of `network` (module ids are arbitrary non-negative ints).
double map_equation_codelength(const StampNetwork& network, std::span<const int> module_of);

double modularity(const StampNetwork& network, std::span<const int> module_of);

/// Centroid of a group of subseries, kept as a mean-centered shape plus its
/// level. sd is the population standard deviation of the centroid values.
struct ProfilePattern {
  std::vector<double> shape;
  double mean = 0.0;
  double sd = 0.0;

  std::vector<double> values() const;
  static ProfilePattern from_values(std::vector<double> values);
};

ProfilePattern group_centroid(std::span<const std::vector<double>> members);

/// Root-mean-square pointwise distance between two equal-length vectors.
double rms_distance(std::span<const double> a, std::span<const double> b);

}  // namespace atlas
