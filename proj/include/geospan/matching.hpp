#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geospan {

/// Bipartite graph with parts A = {0..a_size-1}, B = {0..b_size-1}.
struct BipartiteInstance {
  int a_size = 0;
  int b_size = 0;
  std::vector<std::vector<int>> adjacency;  // per A-vertex, sorted B-neighbors

  /// Throws std::invalid_argument when neighbor ids are out of range,
  /// unsorted, or duplicated.
  void validate() const;
};

/// stars[u] lists the B-vertices assigned to center u.
struct StarPartition {
  std::vector<std::vector<int>> stars;
};

/// Partition of B into |A| disjoint a-stars centered in A, via integral max
/// flow (source->A cap a, A->B cap 1, B->sink cap 1). nullopt when infeasible.
std::optional<StarPartition> star_partition(const BipartiteInstance& inst, int a);

/// Same question answered through a-fold duplication of A and a perfect
/// matching by augmenting paths; test-scale only.
std::optional<StarPartition> star_partition_by_duplication(const BipartiteInstance& inst, int a);

struct HallResult {
  bool holds = true;
  std::vector<int> violating;  // a set S with |N(S)| < a|S| when !holds
};

/// Checks |N(S)| >= a|S| for every S subset of A. Requires |A| <= 24.
HallResult hall_check_exhaustive(const BipartiteInstance& inst, int a);

/// Independent check of disjointness, coverage, star sizes and adjacency.
/// Returns an empty string when valid, otherwise a description of the defect.
std::string validate_star_partition(const BipartiteInstance& inst, int a,
                                    const StarPartition& partition);

/// B compressed into groups of interchangeable vertices: group g holds
/// capacity[g] vertices sharing the same A-neighborhood.
struct GroupedInstance {
  int a_size = 0;
  std::vector<std::int64_t> capacity;
  std::vector<std::vector<int>> adjacency;  // per A-vertex, sorted group ids
};

/// flow[u] lists (group, amount) pairs with positive amount, groups ascending.
struct GroupedStarPartition {
  std::vector<std::vector<std::pair<int, std::int64_t>>> flow;
};

/// Grouped star partition: every A-vertex receives exactly a vertices, every
/// group is fully used. nullopt when the generalized Hall condition fails.
std::optional<GroupedStarPartition> star_partition_grouped(const GroupedInstance& inst,
                                                           std::int64_t a);

/// Value of a maximum flow for the unit-capacity star network; exposed for
/// monotonicity tests.
std::int64_t star_flow_value(const BipartiteInstance& inst, int a);

}  // namespace geospan
