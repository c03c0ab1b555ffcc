#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "geospan/geometry.hpp"

namespace geospan {

using VertexId = std::uint32_t;

/// An ordered point sample in [0,1]^d; index = vertex id.
class PointSet {
 public:
  PointSet() = default;
  PointSet(int dim, std::vector<double> coords, std::uint64_t seed = 0);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept {
    return dim_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(dim_);
  }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] PointView point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  [[nodiscard]] const std::vector<double>& coords() const noexcept { return coords_; }

  /// The first m points.
  [[nodiscard]] PointSet prefix(std::size_t m) const;
  /// Points reordered so that new vertex i is old vertex order[i].
  [[nodiscard]] PointSet permuted(const std::vector<std::size_t>& order) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  int dim_ = 0;
  std::vector<double> coords_;
  std::uint64_t seed_ = 0;
};

/// Coordinate j of vertex i for a given seed; a pure function of its inputs.
double uniform_coordinate(std::uint64_t seed, std::uint64_t index, int axis);

PointSet sample_uniform(std::size_t n, int d, std::uint64_t seed);

/// Radius-r closed-ball graph over a point set, answered through a cell grid
/// of side >= r so every neighbor lies in one of the 3^d adjacent cells.
class GeometricGraph {
 public:
  GeometricGraph(std::shared_ptr<const PointSet> points, double radius, Metric metric);

  [[nodiscard]] std::size_t size() const noexcept { return points_->size(); }
  [[nodiscard]] double radius() const noexcept { return radius_; }
  [[nodiscard]] Metric metric() const noexcept { return metric_; }
  [[nodiscard]] const PointSet& points() const noexcept { return *points_; }
  [[nodiscard]] const std::shared_ptr<const PointSet>& shared_points() const noexcept {
    return points_;
  }
  [[nodiscard]] std::int64_t grid_cells_per_axis() const noexcept { return cells_per_axis_; }

  [[nodiscard]] bool adjacent(VertexId u, VertexId v) const;

  /// Calls visit(v) for every neighbor v of u, in no particular order.
  template <typename Visit>
  void for_each_neighbor(VertexId u, Visit&& visit) const;

  [[nodiscard]] std::vector<VertexId> neighbors(VertexId u) const;
  [[nodiscard]] std::size_t degree(VertexId u) const;
  [[nodiscard]] std::uint64_t edge_count() const;

 private:
  [[nodiscard]] std::int64_t axis_cell(double x) const;

  std::shared_ptr<const PointSet> points_;
  double radius_;
  Metric metric_;
  std::int64_t cells_per_axis_ = 1;
  std::vector<std::uint32_t> cell_start_;  // CSR over linearized grid cells
  std::vector<VertexId> cell_members_;
};

GeometricGraph build_graph(std::shared_ptr<const PointSet> points, double radius,
                           Metric metric = {});
GeometricGraph build_graph(const PointSet& points, double radius, Metric metric = {});

/// Breadth-first hop count between u and v, or nullopt when unreachable.
/// With max_depth set, the search stops at that depth and reports nullopt when
/// v was not reached (callers interpret it as "more than max_depth hops").
std::optional<std::size_t> hop_distance(const GeometricGraph& g, VertexId u, VertexId v,
                                        std::optional<std::size_t> max_depth = std::nullopt);

struct OccupancyTable {
  int level = 0;
  int base = 2;
  int dim = 1;
  std::vector<std::int64_t> counts;  // indexed by linear_index of the cube

  [[nodiscard]] std::int64_t total() const;
  [[nodiscard]] std::int64_t count(const CubeId& q) const { return counts.at(linear_index(q)); }
};

OccupancyTable occupancy(const PointSet& ps, int level, int base);

/// Linear level-k cube index for every point.
std::vector<std::int64_t> cube_indices(const PointSet& ps, int level, int base);

// ---------------------------------------------------------------------------

template <typename Visit>
void GeometricGraph::for_each_neighbor(VertexId u, Visit&& visit) const {
  const int d = points_->dim();
  const PointView pu = points_->point(u);
  std::int64_t lo[16];
  std::int64_t hi[16];
  std::int64_t cur[16];
  for (int a = 0; a < d; ++a) {
    const std::int64_t c = axis_cell(pu[a]);
    lo[a] = c > 0 ? c - 1 : 0;
    hi[a] = c + 1 < cells_per_axis_ ? c + 1 : cells_per_axis_ - 1;
    cur[a] = lo[a];
  }
  while (true) {
    std::int64_t idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * cells_per_axis_ + cur[a];
    for (std::uint32_t i = cell_start_[idx]; i < cell_start_[idx + 1]; ++i) {
      const VertexId v = cell_members_[i];
      if (v != u && lp_distance(pu, points_->point(v), metric_) <= radius_) visit(v);
    }
    int axis = d - 1;
    for (; axis >= 0; --axis) {
      if (++cur[axis] <= hi[axis]) break;
      cur[axis] = lo[axis];
    }
    if (axis < 0) return;
  }
}

}  // namespace geospan
