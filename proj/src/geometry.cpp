#include "geospan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace geospan {

Metric::Metric(double p) : p_(p) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("metric exponent must lie in [1, inf], got " +
                                std::to_string(p));
  }
}

double Metric::dim_factor(int d) const {
  if (is_infinity()) return 1.0;
  return std::pow(static_cast<double>(d), 1.0 / p_);
}

double lp_distance(PointView a, PointView b, Metric metric) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("lp_distance: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  const double p = metric.p();
  if (metric.is_infinity()) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      best = std::max(best, std::abs(a[j] - b[j]));
    }
    return best;
  }
  if (p == 2.0) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double diff = a[j] - b[j];
      sum += diff * diff;
    }
    return std::sqrt(sum);
  }
  if (p == 1.0) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) sum += std::abs(a[j] - b[j]);
    return sum;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    sum += std::pow(std::abs(a[j] - b[j]), p);
  }
  return std::pow(sum, 1.0 / p);
}

std::int64_t ipow(std::int64_t base, int exp) {
  if (exp < 0) throw std::invalid_argument("ipow: negative exponent");
  std::int64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 &&
        std::abs(result) > std::numeric_limits<std::int64_t>::max() / std::abs(base)) {
      throw std::overflow_error("ipow: " + std::to_string(base) + "^" +
                                std::to_string(exp) + " overflows int64");
    }
    result *= base;
  }
  return result;
}

double CubeId::side() const { return std::pow(static_cast<double>(base), -level); }

std::int64_t cells_per_axis(int level, int base) { return ipow(base, level); }

namespace {

void check_base_level(int level, int base) {
  if (base < 2) throw std::invalid_argument("cube base must be >= 2");
  if (level < 0) throw std::invalid_argument("cube level must be >= 0");
}

}  // namespace

CubeId cube_of_point(PointView x, int level, int base) {
  check_base_level(level, base);
  const std::int64_t n = cells_per_axis(level, base);
  CubeId q{level, base, std::vector<std::int64_t>(x.size())};
  for (std::size_t j = 0; j < x.size(); ++j) {
    auto c = static_cast<std::int64_t>(std::floor(x[j] * static_cast<double>(n)));
    q.cell[j] = std::clamp<std::int64_t>(c, 0, n - 1);
  }
  return q;
}

Point center(const CubeId& q) {
  const double side = q.side();
  Point c(q.cell.size());
  for (std::size_t j = 0; j < q.cell.size(); ++j) {
    c[j] = (static_cast<double>(q.cell[j]) + 0.5) * side;
  }
  return c;
}

std::int64_t sigma_corner(std::int64_t cell, int level, int j, int base) {
  const std::int64_t scale = ipow(base, j - level);
  // (scale - base) is even for every base: base even, or base^{j-level-1}-1 even.
  return cell * scale + (scale - base) / 2;
}

namespace {

// Enumerates the box [lo_j, lo_j + extent_j) of cells in lexicographic order.
template <typename Visit>
void for_each_cell_in_box(const std::vector<std::int64_t>& lo,
                          const std::vector<std::int64_t>& extent, Visit&& visit) {
  const std::size_t d = lo.size();
  for (std::size_t j = 0; j < d; ++j) {
    if (extent[j] <= 0) return;
  }
  std::vector<std::int64_t> cur = lo;
  while (true) {
    visit(cur);
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (++cur[axis] < lo[axis] + extent[axis]) break;
      cur[axis] = lo[axis];
      if (axis == 0) return;
    }
    if (d == 0) return;
  }
}

}  // namespace

Region sigma(const CubeId& q, int j) {
  check_base_level(q.level, q.base);
  if (j <= q.level) {
    throw std::invalid_argument("sigma: level j=" + std::to_string(j) +
                                " must exceed cube level " + std::to_string(q.level));
  }
  std::vector<std::int64_t> lo(q.cell.size());
  for (std::size_t a = 0; a < q.cell.size(); ++a) {
    lo[a] = sigma_corner(q.cell[a], q.level, j, q.base);
  }
  const std::vector<std::int64_t> extent(q.cell.size(), q.base);
  Region out;
  for_each_cell_in_box(lo, extent, [&](const std::vector<std::int64_t>& cell) {
    out.push_back(CubeId{j, q.base, cell});
  });
  return out;
}

bool region_contains(const Region& region, const CubeId& p) {
  return std::binary_search(region.begin(), region.end(), p);
}

CubeId homothety_map(const CubeId& q, const CubeId& p, int ell, int k) {
  if (q.level != ell - 1) {
    throw std::invalid_argument("homothety_map: q must sit at level ell-1");
  }
  if (ell < 1 || ell > k || p.level != k || p.base != q.base ||
      p.dim() != q.dim()) {
    throw std::invalid_argument("homothety_map: inconsistent levels");
  }
  const int s = q.base;
  const int d = q.dim();
  // p must lie in sigma_k(q).
  for (int a = 0; a < d; ++a) {
    const std::int64_t lo = sigma_corner(q.cell[a], q.level, k, s);
    if (p.cell[a] < lo || p.cell[a] >= lo + s) {
      throw std::invalid_argument("homothety_map: p is not in sigma_k(q)");
    }
  }
  // Work in units of s^{-k}/2 so that all centers are odd integers.
  const std::int64_t ratio = ipow(s, k - ell);
  const std::int64_t q_scale = ipow(s, k - q.level);
  CubeId image{ell, s, std::vector<std::int64_t>(d)};
  for (int a = 0; a < d; ++a) {
    const std::int64_t qc = (2 * q.cell[a] + 1) * q_scale;
    const std::int64_t pc = 2 * p.cell[a] + 1;
    const std::int64_t u = qc + ratio * (pc - qc);
    // u is (2c+1) * ratio for the image cell c.
    image.cell[a] = (u / ratio - 1) / 2;
  }
  return image;
}

Region enlarged_cube(const CubeId& q) {
  check_base_level(q.level, q.base);
  const std::int64_t n = cells_per_axis(q.level, q.base);
  std::vector<std::int64_t> lo(q.cell.size());
  std::vector<std::int64_t> extent(q.cell.size());
  for (std::size_t a = 0; a < q.cell.size(); ++a) {
    const std::int64_t from = std::max<std::int64_t>(q.cell[a] - 1, 0);
    const std::int64_t to = std::min<std::int64_t>(q.cell[a] + 1, n - 1);
    lo[a] = from;
    extent[a] = to - from + 1;
  }
  Region out;
  for_each_cell_in_box(lo, extent, [&](const std::vector<std::int64_t>& cell) {
    out.push_back(CubeId{q.level, q.base, cell});
  });
  return out;
}

double cube_diameter(int d, int level, int base, Metric metric) {
  return metric.dim_factor(d) * std::pow(static_cast<double>(base), -level);
}

std::int64_t linear_index(const CubeId& q) {
  const std::int64_t n = cells_per_axis(q.level, q.base);
  std::int64_t idx = 0;
  for (std::int64_t c : q.cell) idx = idx * n + c;
  return idx;
}

CubeId cube_from_linear(std::int64_t index, int level, int base, int d) {
  const std::int64_t n = cells_per_axis(level, base);
  CubeId q{level, base, std::vector<std::int64_t>(d)};
  for (int a = d - 1; a >= 0; --a) {
    q.cell[a] = index % n;
    index /= n;
  }
  return q;
}

}  // namespace geospan
