#include "geospan/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace geospan {

namespace {

constexpr int kMaxDim = 16;
constexpr std::int64_t kMaxGridCells = std::int64_t{1} << 22;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

PointSet::PointSet(int dim, std::vector<double> coords, std::uint64_t seed)
    : dim_(dim), coords_(std::move(coords)), seed_(seed) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("point dimension must lie in [1, 16]");
  }
  if (coords_.size() % static_cast<std::size_t>(dim) != 0) {
    throw std::invalid_argument("coordinate count is not a multiple of the dimension");
  }
  for (double x : coords_) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("coordinate outside [0,1]: " + std::to_string(x));
    }
  }
}

PointSet PointSet::prefix(std::size_t m) const {
  if (m > size()) throw std::out_of_range("prefix longer than the point set");
  return PointSet(dim_,
                  std::vector<double>(coords_.begin(),
                                      coords_.begin() + static_cast<std::ptrdiff_t>(m * dim_)),
                  seed_);
}

PointSet PointSet::permuted(const std::vector<std::size_t>& order) const {
  std::vector<double> out;
  out.reserve(coords_.size());
  for (std::size_t old : order) {
    const PointView p = point(old);
    out.insert(out.end(), p.begin(), p.end());
  }
  return PointSet(dim_, std::move(out), seed_);
}

double uniform_coordinate(std::uint64_t seed, std::uint64_t index, int axis) {
  const std::uint64_t key = index * kMaxDim + static_cast<std::uint64_t>(axis);
  const std::uint64_t h = mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + key * 0x9e3779b97f4a7c15ULL);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

PointSet sample_uniform(std::size_t n, int d, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_uniform: n must be >= 1");
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("sample_uniform: d must lie in [1, 16]");
  std::vector<double> coords(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < d; ++a) {
      coords[i * d + a] = uniform_coordinate(seed, i, a);
    }
  }
  return PointSet(d, std::move(coords), seed);
}

GeometricGraph::GeometricGraph(std::shared_ptr<const PointSet> points, double radius,
                               Metric metric)
    : points_(std::move(points)), radius_(radius), metric_(metric) {
  if (!points_) throw std::invalid_argument("build_graph: null point set");
  if (!(radius > 0.0)) throw std::invalid_argument("build_graph: radius must be positive");
  const int d = points_->dim();
  const double side = std::max(radius, 1.0 / 255.0);
  std::int64_t per_axis = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(1.0 / side)));
  // Coarsen until the grid fits the memory budget; a coarser grid is still exact.
  auto total_cells = [d](std::int64_t m) {
    long double t = 1;
    for (int a = 0; a < d; ++a) t *= static_cast<long double>(m);
    return t;
  };
  while (per_axis > 1 && total_cells(per_axis) > static_cast<long double>(kMaxGridCells)) {
    per_axis = std::max<std::int64_t>(1, per_axis / 2);
  }
  cells_per_axis_ = per_axis;
  const auto n_cells = static_cast<std::size_t>(total_cells(per_axis));

  const std::size_t n = points_->size();
  std::vector<std::uint32_t> cell_of(n);
  cell_start_.assign(n_cells + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const PointView p = points_->point(i);
    std::int64_t idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * cells_per_axis_ + axis_cell(p[a]);
    cell_of[i] = static_cast<std::uint32_t>(idx);
    ++cell_start_[idx + 1];
  }
  for (std::size_t c = 0; c < n_cells; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_members_.resize(n);
  std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    cell_members_[fill[cell_of[i]]++] = static_cast<VertexId>(i);
  }
}

std::int64_t GeometricGraph::axis_cell(double x) const {
  const auto c = static_cast<std::int64_t>(std::floor(x * static_cast<double>(cells_per_axis_)));
  return std::clamp<std::int64_t>(c, 0, cells_per_axis_ - 1);
}

bool GeometricGraph::adjacent(VertexId u, VertexId v) const {
  return u != v && lp_distance(points_->point(u), points_->point(v), metric_) <= radius_;
}

std::vector<VertexId> GeometricGraph::neighbors(VertexId u) const {
  std::vector<VertexId> out;
  for_each_neighbor(u, [&](VertexId v) { out.push_back(v); });
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t GeometricGraph::degree(VertexId u) const {
  std::size_t deg = 0;
  for_each_neighbor(u, [&](VertexId) { ++deg; });
  return deg;
}

std::uint64_t GeometricGraph::edge_count() const {
  std::uint64_t twice = 0;
  for (std::size_t u = 0; u < size(); ++u) twice += degree(static_cast<VertexId>(u));
  return twice / 2;
}

GeometricGraph build_graph(std::shared_ptr<const PointSet> points, double radius, Metric metric) {
  return GeometricGraph(std::move(points), radius, metric);
}

GeometricGraph build_graph(const PointSet& points, double radius, Metric metric) {
  return GeometricGraph(std::make_shared<const PointSet>(points), radius, metric);
}

std::optional<std::size_t> hop_distance(const GeometricGraph& g, VertexId u, VertexId v,
                                        std::optional<std::size_t> max_depth) {
  const std::size_t n = g.size();
  if (u >= n || v >= n) throw std::out_of_range("hop_distance: vertex id out of range");
  if (u == v) return 0;
  constexpr std::uint32_t kUnseen = 0xffffffffu;
  std::vector<std::uint32_t> dist(n, kUnseen);
  std::vector<VertexId> frontier{u};
  std::vector<VertexId> next;
  dist[u] = 0;
  std::size_t depth = 0;
  while (!frontier.empty()) {
    if (max_depth && depth >= *max_depth) return std::nullopt;
    ++depth;
    next.clear();
    for (VertexId x : frontier) {
      bool found = false;
      g.for_each_neighbor(x, [&](VertexId y) {
        if (dist[y] != kUnseen) return;
        dist[y] = static_cast<std::uint32_t>(depth);
        if (y == v) found = true;
        next.push_back(y);
      });
      if (found) return depth;
    }
    frontier.swap(next);
  }
  return std::nullopt;
}

std::vector<std::int64_t> cube_indices(const PointSet& ps, int level, int base) {
  if (base < 2 || level < 0) throw std::invalid_argument("occupancy: need base >= 2, level >= 0");
  const std::int64_t per_axis = cells_per_axis(level, base);
  const int d = ps.dim();
  (void)ipow(per_axis, d);  // overflow guard for the linearized index
  std::vector<std::int64_t> out(ps.size());
  const auto scale = static_cast<double>(per_axis);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const PointView p = ps.point(i);
    std::int64_t idx = 0;
    for (int a = 0; a < d; ++a) {
      auto c = static_cast<std::int64_t>(std::floor(p[a] * scale));
      c = std::clamp<std::int64_t>(c, 0, per_axis - 1);
      idx = idx * per_axis + c;
    }
    out[i] = idx;
  }
  return out;
}

std::int64_t OccupancyTable::total() const {
  std::int64_t t = 0;
  for (std::int64_t c : counts) t += c;
  return t;
}

OccupancyTable occupancy(const PointSet& ps, int level, int base) {
  OccupancyTable table{level, base, ps.dim(), {}};
  table.counts.assign(static_cast<std::size_t>(ipow(cells_per_axis(level, base), ps.dim())), 0);
  for (std::int64_t idx : cube_indices(ps, level, base)) ++table.counts[idx];
  return table;
}

}  // namespace geospan
