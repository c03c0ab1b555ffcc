#include "geospan/embedder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "geospan/matching.hpp"

namespace geospan {

const char* to_string(Mode mode) noexcept {
  return mode == Mode::strict ? "strict" : "practical";
}

Mode parse_mode(const std::string& text) {
  if (text == "strict") return Mode::strict;
  if (text == "practical") return Mode::practical;
  throw std::invalid_argument("mode must be 'strict' or 'practical', got '" + text + "'");
}

double threshold_radius(int d, int h, Metric metric) {
  if (d < 1 || h < 1) throw std::invalid_argument("threshold_radius: need d, h >= 1");
  return metric.dim_factor(d) / (2.0 * h);
}

int compute_k(int s, int d, double eps, double r, double r_star, double relax, Metric metric) {
  if (s < 2) throw std::invalid_argument("compute_k: s must be >= 2");
  if (d < 1) throw std::invalid_argument("compute_k: d must be >= 1");
  if (!(eps > 0) || !(r > 0) || !(r_star > 0) || !(relax > 0)) {
    throw std::invalid_argument("compute_k: eps, r, r_star and relax must be positive");
  }
  const double factor = metric.dim_factor(d);
  const double log_s = std::log(static_cast<double>(s));
  const double slack = relax * eps * r_star / 8.0;
  auto fits = [&](int k) {
    return factor * std::pow(s, 1 - k) <= r && factor * std::pow(s, -k) < slack;
  };
  // Closed form from the logarithms, then exact correction for rounding.
  const double from_cover = 1.0 + std::log(factor / r) / log_s;
  const double from_slack = std::log(factor / slack) / log_s;
  double guess = std::max({1.0, std::ceil(from_cover), std::floor(from_slack) + 1.0});
  guess = std::min(guess, 4096.0);
  int k = static_cast<int>(guess);
  while (!fits(k)) ++k;
  while (k > 1 && fits(k - 1)) --k;
  return k;
}

double EmbedParams::cell_diameter() const { return cube_diameter(d, k, s, metric); }

double EmbedParams::hop_bound() const {
  return std::min((1.0 + 7.0 * eps / 8.0) * r_star, r - cell_diameter());
}

double EmbedParams::waypoint_distance() const {
  return std::min((1.0 + 3.0 * eps / 4.0) * r_star, hop_bound() - cell_diameter() / 2.0);
}

EmbedParams make_params(const BalancedTree& tree, const EmbedConfig& config) {
  return make_params(tree.sequence(), config);
}

EmbedParams make_params(const DegreeSequence& seq, const EmbedConfig& config) {
  if (!(config.eps > 0)) throw std::invalid_argument("eps must be positive");
  if (config.mode == Mode::practical && !(config.relax >= 1.0)) {
    throw std::invalid_argument("relax factor must be >= 1");
  }
  EmbedParams params;
  params.d = config.d;
  params.h = seq.height();
  params.M = seq.bound();
  params.eps = config.eps;
  params.metric = config.metric;
  params.mode = config.mode;
  params.relax = config.mode == Mode::strict ? 1.0 : config.relax;
  params.r_star = threshold_radius(config.d, params.h, config.metric);
  params.r = config.r_override ? *config.r_override : (1.0 + config.eps) * params.r_star;
  if (!(params.r > 0)) throw std::invalid_argument("radius must be positive");

  auto k_for = [&](int s) {
    return compute_k(s, params.d, params.eps, params.r, params.r_star, params.relax, params.metric);
  };
  params.k2 = k_for(2);
  if (config.mode == Mode::strict) {
    params.m_prime = params.d * params.k2 * params.M;
    if (params.m_prime <= params.h) {
      params.s = select_s(seq, params.d, params.k2).s;
      params.k = k_for(params.s);
    } else {
      params.k = params.k2;
    }
  } else {
    std::vector<int> k_of_s(static_cast<std::size_t>(params.M) + 1, 0);
    for (int s = 2; s <= params.M; ++s) k_of_s[static_cast<std::size_t>(s)] = k_for(s);
    const BaseSelection sel = select_s_shortest_prefix(seq, params.d, k_of_s);
    params.s = sel.s;
    params.m_prime = sel.m_prime;
    params.k = sel.s > 0 ? k_of_s[static_cast<std::size_t>(sel.s)] : params.k2;
  }
  return params;
}

namespace {

// s^{kd} divides prod_{i<=m'} s_i, checked on prime exponents so it works
// when the product overflows.
bool base_power_divides(const DegreeSequence& seq, int s, int k, int d, int m_prime) {
  if (s < 2 || m_prime > seq.height()) return false;
  int rest = s;
  for (int prime = 2; rest > 1; ++prime) {
    if (rest % prime != 0) continue;
    int e = 0;
    while (rest % prime == 0) {
      rest /= prime;
      ++e;
    }
    std::int64_t have = 0;
    for (int i = 1; i <= m_prime; ++i) {
      for (int v = seq.at(i); v % prime == 0; v /= prime) ++have;
    }
    if (have < static_cast<std::int64_t>(e) * k * d) return false;
  }
  return true;
}

bool required_in_practical(const std::string& id) {
  return id == "base_selected" || id == "m_prime_le_h" || id == "treebound1" ||
         id == "treebound2_relaxed" || id == "divisibility";
}

}  // namespace

std::vector<PreconditionCheck> check_preconditions(const EmbedParams& params,
                                                   const BalancedTree& tree) {
  return check_preconditions(params, tree.sequence());
}

std::vector<PreconditionCheck> check_preconditions(const EmbedParams& params,
                                                   const DegreeSequence& seq) {
  std::vector<PreconditionCheck> out;
  auto add = [&](std::string id, double margin, bool strict_less = false) {
    const bool holds = strict_less ? margin > 0 : margin >= 0;
    out.push_back({std::move(id), holds, margin});
  };
  const double factor = params.metric.dim_factor(params.d);
  const int s = params.s;
  const int k = params.k;
  const double h = params.h;
  const double eps = params.eps;
  add("base_selected", s >= 2 ? 1.0 : -1.0);
  add("m_prime_le_h", h - params.m_prime);
  if (params.mode == Mode::strict) add("eps_in_unit", std::min(eps, 1.0 - eps), true);
  const int base = s >= 2 ? s : 2;
  add("treebound1", params.r - factor * std::pow(base, 1 - k));
  add("treebound2", eps * params.r_star / 8.0 - factor * std::pow(base, -k), true);
  if (params.mode == Mode::practical) {
    add("treebound2_relaxed", params.relax * eps * params.r_star / 8.0 - factor * std::pow(base, -k),
        true);
  }
  add("treebound4", eps * h / 20.0 - params.m_prime);
  add("treebound7", eps * h / 12.0 - k);
  const double log_cubes = static_cast<double>(k) * params.d * std::log(static_cast<double>(base));
  // log(s^{-kd}/2) - log(2^{-eps h/5})
  add("treebound5", (-log_cubes - std::log(2.0)) + eps * h / 5.0 * std::log(2.0));
  const double log_t = log_tree_size(seq);
  // log(s^{-2kd}|T|/2) - log(|T|^{2/3})
  add("treebound6", (-2.0 * log_cubes + log_t - std::log(2.0)) - 2.0 / 3.0 * log_t, true);
  add("divisibility",
      base_power_divides(seq, s, k, params.d, params.m_prime) ? 1.0 : -1.0);
  return out;
}

bool all_hold(const std::vector<PreconditionCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

CubePath natural_path(const CubeId& q, const CubeId& p, int ell, const EmbedParams& params) {
  const int k = params.k;
  const CubeId target = homothety_map(q, p, ell, k);
  const Point target_center = center(target);
  const double hop = params.hop_bound();
  const double waypoint = params.waypoint_distance();
  const double min_progress = waypoint - params.cell_diameter() / 2.0;
  if (!(min_progress > 0)) {
    throw std::domain_error("path planning cannot make progress: cubes too coarse for r");
  }
  CubePath path{{p}};
  Point cur = center(p);
  double remaining = lp_distance(cur, target_center, params.metric);
  while (remaining > hop) {
    Point w(cur.size());
    const double frac = waypoint / remaining;
    for (std::size_t a = 0; a < cur.size(); ++a) {
      w[a] = cur[a] + (target_center[a] - cur[a]) * frac;
      if (w[a] < 0.0 || w[a] > 1.0) throw std::logic_error("path waypoint left the unit cube");
    }
    CubeId next = cube_of_point(w, k, params.s);
    Point next_center = center(next);
    const double next_remaining = lp_distance(next_center, target_center, params.metric);
    if (!(next_remaining < remaining)) throw std::logic_error("path planning stalled");
    path.cubes.push_back(std::move(next));
    cur = std::move(next_center);
    remaining = next_remaining;
  }
  const Region landing = sigma(target, k);
  if (region_contains(landing, path.cubes.back())) return path;
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < landing.size(); ++i) {
    const double dist = lp_distance(cur, center(landing[i]), params.metric);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  path.cubes.push_back(landing[best]);
  return path;
}

CubePath plan_path(const CubeId& q, const CubeId& p, int ell, const EmbedParams& params,
                   std::size_t t_target) {
  CubePath path = natural_path(q, p, ell, params);
  if (path.cubes.size() > t_target) {
    throw std::invalid_argument("plan_path: t_target " + std::to_string(t_target) +
                                " shorter than the natural path (" +
                                std::to_string(path.cubes.size()) + ")");
  }
  const CubeId last = path.cubes.back();
  path.cubes.resize(t_target, last);
  return path;
}

PathCheck check_path(const CubePath& path, const CubeId& q, const CubeId& p, int ell,
                     const EmbedParams& params) {
  PathCheck out;
  if (path.cubes.empty()) return out;
  const CubeId target = homothety_map(q, p, ell, params.k);
  const Region landing = sigma(target, params.k);
  const Point target_center = center(target);
  const double p3 = (1.0 + 7.0 * params.eps / 8.0) * params.r_star;
  const double progress = (1.0 + 5.0 * params.eps / 8.0) * params.r_star;
  const double budget = params.eps * params.r_star / 16.0 + p3 + params.eps * params.r_star / 16.0;
  out.starts_at_p = path.cubes.front() == p;
  out.ends_in_target = region_contains(landing, path.cubes.back());
  out.budget_within_r = budget <= params.r * (1.0 + 1e-12);
  out.hops_within_bound = true;
  out.cells_within_r = true;
  out.progress_ok = true;
  const double side = path.cubes.front().side();
  for (std::size_t i = 0; i + 1 < path.cubes.size(); ++i) {
    const Point a = center(path.cubes[i]);
    const Point b = center(path.cubes[i + 1]);
    const double hop = lp_distance(a, b, params.metric);
    out.max_hop = std::max(out.max_hop, hop);
    if (hop > p3) out.hops_within_bound = false;
    // Farthest pair of points between two equal axis-parallel cubes.
    Point spread(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) spread[j] = std::abs(a[j] - b[j]) + side;
    const Point origin(a.size(), 0.0);
    if (lp_distance(spread, origin, params.metric) > params.r) out.cells_within_r = false;
    // Interior steps are the moves made while the target was still out of reach.
    const double before = lp_distance(a, target_center, params.metric);
    if (before > p3 && !region_contains(landing, path.cubes[i + 1])) {
      const double after = lp_distance(b, target_center, params.metric);
      if (after > before - progress) out.progress_ok = false;
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

constexpr VertexId kUnassigned = std::numeric_limits<VertexId>::max();

// A contiguous run of tree indices in the current layer, all hosted by one
// level-k cube and following one path plan.
struct Segment {
  std::uint64_t first = 0;
  std::uint64_t count = 0;
  std::int64_t cube = 0;
  std::int32_t path = -1;
};

class EmbedRun {
 public:
  EmbedRun(const BalancedTree& tree, const PointSet& ps, const EmbedParams& params)
      : tree_(tree), ps_(ps), params_(params) {}

  EmbedResult run();

 private:
  struct Failure {
    std::string stage;
    std::optional<std::int64_t> cube;
    int layer;
    std::string message;
  };

  void build_pools();
  bool place(int layer, const std::vector<Segment>& segments, const char* stage);
  bool subroutine1();
  bool subroutine2();
  bool subroutine3();
  void fail(std::string stage, std::optional<std::int64_t> cube, int layer, std::string message) {
    failure_ = Failure{std::move(stage), cube, layer, std::move(message)};
  }
  [[nodiscard]] CubeId cube_at(std::int64_t linear) const {
    return cube_from_linear(linear, params_.k, params_.s, params_.d);
  }

  const BalancedTree& tree_;
  const PointSet& ps_;
  const EmbedParams& params_;
  EmbedReport report_;
  std::vector<VertexId> embedding_;
  std::vector<std::uint32_t> pool_start_;
  std::vector<std::uint32_t> pool_cursor_;
  std::vector<VertexId> pool_members_;
  std::vector<Segment> active_;
  int layer_ = 0;  // deepest embedded layer
  bool done_ = false;
  std::optional<Failure> failure_;
};

void EmbedRun::build_pools() {
  const std::vector<std::int64_t> cells = cube_indices(ps_, params_.k, params_.s);
  const auto cubes = static_cast<std::size_t>(ipow(params_.s, params_.k * params_.d));
  pool_start_.assign(cubes + 1, 0);
  for (std::int64_t c : cells) ++pool_start_[c + 1];
  for (std::size_t c = 0; c < cubes; ++c) pool_start_[c + 1] += pool_start_[c];
  pool_cursor_.assign(pool_start_.begin(), pool_start_.end() - 1);
  pool_members_.resize(cells.size());
  std::vector<std::uint32_t> fill = pool_cursor_;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    pool_members_[fill[cells[i]]++] = static_cast<VertexId>(i);
  }
}

bool EmbedRun::place(int layer, const std::vector<Segment>& segments, const char* stage) {
  const std::uint64_t offset = tree_.layer_offset(layer);
  for (const Segment& seg : segments) {
    const std::uint64_t available = pool_start_[seg.cube + 1] - pool_cursor_[seg.cube];
    if (available < seg.count) {
      fail(stage, seg.cube, layer,
           "pool depleted: cube needs " + std::to_string(seg.count) + " vertices, has " +
               std::to_string(available));
      return false;
    }
    std::uint32_t& cursor = pool_cursor_[seg.cube];
    for (std::uint64_t t = seg.first; t < seg.first + seg.count; ++t) {
      embedding_[offset + t] = pool_members_[cursor++];
    }
  }
  layer_ = layer;
  if (layer == params_.h) done_ = true;
  return true;
}

bool EmbedRun::subroutine1() {
  const int d = params_.d;
  const int s = params_.s;
  const CubeId whole{0, s, std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)};
  const Region root_block = sigma(whole, params_.k);
  const std::int64_t q0 = linear_index(root_block.front());
  const int last_in_q0 = std::min(params_.m_prime - 1, params_.h);
  for (int i = 0; i <= last_in_q0; ++i) {
    if (!place(i, {Segment{0, tree_.layer_size(i), q0, -1}}, "subroutine1")) return false;
  }
  if (done_) return true;
  const int split_layer = params_.m_prime;
  const std::uint64_t total = tree_.layer_size(split_layer);
  const auto parts = static_cast<std::uint64_t>(root_block.size());
  if (total % parts != 0) {
    fail("subroutine1", std::nullopt, split_layer, "divisibility violation: s^d does not divide L_m'");
    return false;
  }
  const std::uint64_t chunk = total / parts;
  active_.clear();
  for (std::uint64_t j = 0; j < parts; ++j) {
    active_.push_back(Segment{j * chunk, chunk, linear_index(root_block[j]), -1});
  }
  return place(split_layer, active_, "subroutine1");
}

bool EmbedRun::subroutine2() {
  const int k = params_.k;
  const int s = params_.s;
  const int d = params_.d;
  for (int ell = 1; ell <= k - 1 && !done_; ++ell) {
    // Plan one path per active segment; all share the block's t_target.
    const std::int64_t to_parent = ipow(s, k - (ell - 1));
    std::vector<PathRecord> records;
    std::vector<std::vector<std::int64_t>> linear_paths;
    std::vector<std::int64_t> path_target;
    std::size_t t_target = 0;
    std::vector<CubePath> natural;
    for (Segment& seg : active_) {
      const CubeId p = cube_at(seg.cube);
      CubeId q{ell - 1, s, p.cell};
      for (auto& c : q.cell) c /= to_parent;
      try {
        natural.push_back(natural_path(q, p, ell, params_));
      } catch (const std::exception& e) {
        fail("subroutine2", seg.cube, layer_, e.what());
        return false;
      }
      t_target = std::max(t_target, natural.back().cubes.size());
      seg.path = static_cast<std::int32_t>(records.size());
      records.push_back(PathRecord{std::move(q), p, {}});
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      CubePath padded = std::move(natural[i]);
      padded.cubes.resize(t_target, padded.cubes.back());
      std::vector<std::int64_t> lin;
      lin.reserve(t_target);
      for (const CubeId& c : padded.cubes) lin.push_back(linear_index(c));
      linear_paths.push_back(std::move(lin));
      path_target.push_back(linear_index(homothety_map(records[i].q, records[i].p, ell, k)));
      records[i].path = std::move(padded);
    }
    report_.blocks.push_back(std::move(records));

    // Moves p_j -> p_{j+1}.
    for (std::size_t j = 1; j < t_target && !done_; ++j) {
      const int layer = layer_ + 1;
      const auto deg = static_cast<std::uint64_t>(tree_.sequence().at(layer));
      for (Segment& seg : active_) {
        seg.first *= deg;
        seg.count *= deg;
        seg.cube = linear_paths[static_cast<std::size_t>(seg.path)][j];
      }
      if (!place(layer, active_, "subroutine2")) return false;
    }
    if (done_) break;

    // Spread the children equally over sigma_k(phi_ell(p)).
    const int layer = layer_ + 1;
    const auto deg = static_cast<std::uint64_t>(tree_.sequence().at(layer));
    std::vector<Segment> spread;
    spread.reserve(active_.size() * static_cast<std::size_t>(ipow(s, d)));
    for (const Segment& seg : active_) {
      const Region landing =
          sigma(cube_from_linear(path_target[static_cast<std::size_t>(seg.path)], ell, s, d), k);
      const std::uint64_t children = seg.count * deg;
      if (children % landing.size() != 0) {
        fail("subroutine2", seg.cube, layer, "divisibility violation in block distribution");
        return false;
      }
      const std::uint64_t chunk = children / landing.size();
      for (std::size_t j = 0; j < landing.size(); ++j) {
        spread.push_back(Segment{seg.first * deg + j * chunk, chunk, linear_index(landing[j]), -1});
      }
    }
    active_ = std::move(spread);
    if (!place(layer, active_, "subroutine2")) return false;
  }
  report_.m_steps = layer_ - params_.m_prime;
  report_.subroutine2_complete = !done_ || static_cast<int>(report_.blocks.size()) == k - 1;

  if (!done_) {
    const auto cubes = static_cast<std::size_t>(ipow(s, k * d));
    std::vector<std::uint64_t> per_cube(cubes, 0);
    for (const Segment& seg : active_) per_cube[static_cast<std::size_t>(seg.cube)] += seg.count;
    const std::uint64_t expected = tree_.layer_size(layer_) / cubes;
    report_.equidistributed =
        tree_.layer_size(layer_) % cubes == 0 &&
        std::all_of(per_cube.begin(), per_cube.end(), [&](std::uint64_t c) { return c == expected; });
  }
  return true;
}

bool EmbedRun::subroutine3() {
  const int k = params_.k;
  const int s = params_.s;
  const int d = params_.d;
  const int base_layer = layer_;
  const auto cubes = static_cast<std::size_t>(ipow(s, k * d));
  if (!report_.equidistributed) {
    fail("subroutine3", std::nullopt, base_layer, "active vertices are not equidistributed");
    return false;
  }
  const std::uint64_t unseen = tree_.size() - tree_.prefix_total(base_layer);
  const std::uint64_t actives = tree_.layer_size(base_layer);
  const std::uint64_t actives_per_cube = actives / cubes;
  if (unseen % cubes != 0 || unseen % actives != 0) {
    fail("subroutine3", std::nullopt, base_layer, "divisibility violation for remaining layers");
    return false;
  }
  const auto star = static_cast<std::int64_t>(unseen / cubes);
  const std::uint64_t group = unseen / actives;

  GroupedInstance inst;
  inst.a_size = static_cast<int>(cubes);
  inst.capacity.resize(cubes);
  inst.adjacency.resize(cubes);
  for (std::size_t c = 0; c < cubes; ++c) {
    inst.capacity[c] = pool_start_[c + 1] - pool_cursor_[c];
    for (const CubeId& nb : enlarged_cube(cube_at(static_cast<std::int64_t>(c)))) {
      inst.adjacency[c].push_back(static_cast<int>(linear_index(nb)));
    }
  }
  const auto partition = star_partition_grouped(inst, star);
  if (!partition) {
    fail("subroutine3", std::nullopt, base_layer, "star partition infeasible (Hall condition fails)");
    return false;
  }

  // Segment hosting each cube's actives; exactly one per cube after subroutine 2.
  std::vector<const Segment*> host(cubes, nullptr);
  for (const Segment& seg : active_) host[static_cast<std::size_t>(seg.cube)] = &seg;

  std::vector<VertexId> assigned;
  assigned.reserve(static_cast<std::size_t>(star));
  for (std::size_t c = 0; c < cubes; ++c) {
    assigned.clear();
    for (const auto& [from, amount] : partition->flow[c]) {
      std::uint32_t& cursor = pool_cursor_[static_cast<std::size_t>(from)];
      for (std::int64_t i = 0; i < amount; ++i) assigned.push_back(pool_members_[cursor++]);
    }
    const Segment* seg = host[c];
    if (seg == nullptr || seg->count != actives_per_cube) {
      fail("subroutine3", static_cast<std::int64_t>(c), base_layer, "cube without its share of actives");
      return false;
    }
    // Fill each active's descendants, layer by layer, from its own slice.
    for (std::uint64_t u = 0; u < seg->count; ++u) {
      const std::uint64_t t = seg->first + u;
      std::size_t next = static_cast<std::size_t>(u * group);
      std::uint64_t width = 1;
      for (int layer = base_layer + 1; layer <= params_.h; ++layer) {
        width *= static_cast<std::uint64_t>(tree_.sequence().at(layer));
        const std::uint64_t offset = tree_.layer_offset(layer);
        for (std::uint64_t idx = t * width; idx < (t + 1) * width; ++idx) {
          embedding_[offset + idx] = assigned[next++];
        }
      }
    }
  }
  layer_ = params_.h;
  done_ = true;
  return true;
}

EmbedResult EmbedRun::run() {
  report_.preconditions = check_preconditions(params_, tree_);
  const double factor = params_.metric.dim_factor(params_.d);
  report_.step_bound =
      2.0 * (params_.k - 1) +
      std::ceil((factor / 2.0) / ((1.0 + 5.0 * params_.eps / 8.0) * params_.r_star));

  auto finish = [&]() {
    EmbedResult result;
    if (failure_) {
      report_.success = false;
      report_.failure_stage = failure_->stage;
      if (failure_->cube) report_.failure_cube = cube_at(*failure_->cube);
      report_.failure_layer = failure_->layer;
      report_.message = failure_->message;
    } else {
      result.embedding = std::move(embedding_);
    }
    result.report = std::move(report_);
    return result;
  };

  if (params_.mode == Mode::strict) {
    if (!all_hold(report_.preconditions)) {
      std::string which;
      for (const auto& c : report_.preconditions) {
        if (!c.holds) which += (which.empty() ? "" : ", ") + c.id;
      }
      fail("preconditions", std::nullopt, -1, "strict-mode inequalities fail: " + which);
      return finish();
    }
  } else {
    for (const auto& c : report_.preconditions) {
      if (required_in_practical(c.id) && !c.holds) {
        fail("params", std::nullopt, -1, "practical mode requires " + c.id);
        return finish();
      }
    }
  }

  auto t0 = Clock::now();
  embedding_.assign(tree_.size(), kUnassigned);
  build_pools();
  report_.timings.push_back({"pools", elapsed_ms(t0)});

  t0 = Clock::now();
  const bool ok1 = subroutine1();
  report_.timings.push_back({"subroutine1", elapsed_ms(t0)});
  if (!ok1) return finish();

  t0 = Clock::now();
  if (!done_ && !subroutine2()) return finish();
  report_.timings.push_back({"subroutine2", elapsed_ms(t0)});
  report_.embedded_before_matching = tree_.prefix_total(layer_);

  if (params_.mode == Mode::strict) {
    const double m = report_.m_steps;
    if (m > (1.0 - params_.eps / 4.0) * params_.h) {
      fail("subroutine2", std::nullopt, layer_, "step count exceeds (1-eps/4)h");
      return finish();
    }
    const double cubes = std::pow(params_.s, params_.k * params_.d);
    if (!done_ && static_cast<double>(report_.embedded_before_matching) >
                      static_cast<double>(tree_.size()) / (2.0 * cubes)) {
      fail("subroutine2", std::nullopt, layer_, "consumption exceeds |T|/(2 s^{kd})");
      return finish();
    }
  }

  t0 = Clock::now();
  if (!done_ && !subroutine3()) return finish();
  report_.timings.push_back({"subroutine3", elapsed_ms(t0)});

  t0 = Clock::now();
  const VerifyResult check = verify_embedding(tree_, ps_, embedding_, params_.r, params_.metric);
  report_.timings.push_back({"verify", elapsed_ms(t0)});
  report_.max_edge = check.max_edge;
  if (!check.pass) {
    fail("verify", std::nullopt, -1, check.reason);
    return finish();
  }
  report_.success = true;
  return finish();
}

}  // namespace

EmbedResult embed(const BalancedTree& tree, const PointSet& ps, const EmbedParams& params) {
  if (ps.size() != tree.size()) {
    throw std::invalid_argument("embed: point count " + std::to_string(ps.size()) +
                                " differs from tree size " + std::to_string(tree.size()));
  }
  if (ps.dim() != params.d) throw std::invalid_argument("embed: point dimension differs from d");
  if (tree.height() != params.h) throw std::invalid_argument("embed: params built for another tree");
  if (ps.size() >= kUnassigned) throw std::invalid_argument("embed: too many points");
  return EmbedRun(tree, ps, params).run();
}

VerifyResult verify_embedding(const BalancedTree& tree, const PointSet& ps,
                              const std::vector<VertexId>& embedding, double r, Metric metric) {
  VerifyResult out;
  if (embedding.size() != tree.size()) {
    out.reason = "embedding covers " + std::to_string(embedding.size()) + " of " +
                 std::to_string(tree.size()) + " tree positions";
    return out;
  }
  std::vector<bool> used(ps.size(), false);
  for (std::size_t pos = 0; pos < embedding.size(); ++pos) {
    const VertexId v = embedding[pos];
    if (v >= ps.size()) {
      out.reason = "position " + std::to_string(pos) + " maps to missing vertex " + std::to_string(v);
      return out;
    }
    if (used[v]) {
      out.reason = "vertex " + std::to_string(v) + " used twice";
      return out;
    }
    used[v] = true;
  }
  bool edges_ok = true;
  std::string first_bad;
  for (int layer = 1; layer <= tree.height(); ++layer) {
    const auto deg = static_cast<std::uint64_t>(tree.sequence().at(layer));
    const std::uint64_t offset = tree.layer_offset(layer);
    const std::uint64_t parent_offset = tree.layer_offset(layer - 1);
    for (std::uint64_t t = 0; t < tree.layer_size(layer); ++t) {
      const VertexId child = embedding[offset + t];
      const VertexId parent = embedding[parent_offset + t / deg];
      const double len = lp_distance(ps.point(child), ps.point(parent), metric);
      out.max_edge = std::max(out.max_edge, len);
      if (len > r && edges_ok) {
        edges_ok = false;
        first_bad = "edge (" + std::to_string(layer) + "," + std::to_string(t) + ") has length " +
                    std::to_string(len) + " > r";
      }
    }
  }
  out.pass = edges_ok;
  out.reason = first_bad;
  return out;
}

}  // namespace geospan
