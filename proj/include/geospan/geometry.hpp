#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace geospan {

/// An l_p metric exponent in [1, inf]. p = 2 is the Euclidean default.
class Metric {
 public:
  constexpr Metric() = default;
  explicit Metric(double p);

  static Metric euclidean() { return Metric(2.0); }
  static Metric manhattan() { return Metric(1.0); }
  static Metric chebyshev() {
    return Metric(std::numeric_limits<double>::infinity());
  }

  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] bool is_infinity() const noexcept {
    return p_ == std::numeric_limits<double>::infinity();
  }
  /// Norm of the all-ones vector in R^d, i.e. d^{1/p}.
  [[nodiscard]] double dim_factor(int d) const;

  friend bool operator==(const Metric&, const Metric&) = default;

 private:
  double p_ = 2.0;
};

using Point = std::vector<double>;
using PointView = std::span<const double>;

double lp_distance(PointView a, PointView b, Metric metric = {});

/// Exact integer power; throws std::overflow_error when the result does not
/// fit in int64.
std::int64_t ipow(std::int64_t base, int exp);

/// A closed axis-parallel cube of side base^{-level}.
struct CubeId {
  int level = 0;
  int base = 2;
  std::vector<std::int64_t> cell;

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(cell.size()); }
  [[nodiscard]] double side() const;

  friend bool operator==(const CubeId&, const CubeId&) = default;
  /// Lexicographic on (level, base, cell).
  friend auto operator<=>(const CubeId&, const CubeId&) = default;
};

/// A set of cubes sharing level and base, kept in lexicographic cell order.
using Region = std::vector<CubeId>;

/// Cubes per axis at a level, base^level.
std::int64_t cells_per_axis(int level, int base);

/// Half-open cell lookup floor(x_j * s^level), with the last cell closed.
CubeId cube_of_point(PointView x, int level, int base);

Point center(const CubeId& q);

/// sigma_j(q): the s^d level-j cubes forming the cube of side s^{1-j}
/// centered at c(q). Requires j > level(q).
Region sigma(const CubeId& q, int j);

/// Lower corner cell (per axis) of sigma_j(q).
std::int64_t sigma_corner(std::int64_t cell, int level, int j, int base);

/// Image of p in sigma_k(q) under the homothety about c(q) with ratio
/// s^{k-ell}; q must be at level ell-1. The result is a level-ell cube.
CubeId homothety_map(const CubeId& q, const CubeId& p, int ell, int k);

/// Level-k cubes whose cell offsets from q lie in {-1,0,1}^d, clipped.
Region enlarged_cube(const CubeId& q);

/// Diameter of a level-`level` cube under `metric`: d^{1/p} s^{-level}.
double cube_diameter(int d, int level, int base, Metric metric = {});

/// Row-major linear index with axis 0 most significant, so that linear order
/// coincides with lexicographic cell order.
std::int64_t linear_index(const CubeId& q);
CubeId cube_from_linear(std::int64_t index, int level, int base, int d);

/// True when p is one of the cubes in region (same level and base).
bool region_contains(const Region& region, const CubeId& p);

}  // namespace geospan
