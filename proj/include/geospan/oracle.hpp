#pragma once

#include <cstddef>
#include <vector>

#include "geospan/geometry.hpp"
#include "geospan/pointcloud.hpp"
#include "geospan/trees.hpp"

namespace geospan {

/// Arbitrary rooted tree on vertices 0..n-1, root 0. parent[0] is -1.
struct ExplicitTree {
  std::vector<int> parent;

  [[nodiscard]] std::size_t size() const noexcept { return parent.size(); }
  /// Throws std::invalid_argument unless the array is a tree rooted at 0.
  void validate() const;

  /// Positions of a balanced tree as vertex ids.
  static ExplicitTree from_balanced(const BalancedTree& tree);
};

/// Largest graph accepted by contains_spanning_tree.
inline constexpr std::size_t kOracleMaxVertices = 14;

/// Exact test whether g contains t as a spanning tree. Throws
/// std::invalid_argument when |g| > 14. Sizes that differ give false.
bool contains_spanning_tree(const GeometricGraph& g, const ExplicitTree& t);

/// All degree sequences of height h with entries >= 2 whose tree has
/// exactly n vertices.
std::vector<DegreeSequence> balanced_sequences(std::size_t n, int h);

/// True when some balanced tree of height h spans g.
bool contains_balanced_tree(const GeometricGraph& g, int h);

/// Reference for compute_k: scans k = 1, 2, ... until both inequalities hold.
int smallest_k_scan(int s, int d, double eps, double r, double r_star, double relax = 1.0,
                    Metric metric = {});

}  // namespace geospan
