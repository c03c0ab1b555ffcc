#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geospan/geometry.hpp"
#include "geospan/pointcloud.hpp"
#include "geospan/trees.hpp"

namespace geospan {

enum class Mode { strict, practical };

const char* to_string(Mode mode) noexcept;
Mode parse_mode(const std::string& text);

/// User-facing knobs; everything else in EmbedParams is derived.
struct EmbedConfig {
  int d = 1;
  Metric metric{};
  double eps = 0.5;
  Mode mode = Mode::practical;
  double relax = 4.0;                   // rho, practical mode only
  std::optional<double> r_override{};  // replaces (1+eps) r*
};

/// Constants of the tessellation embedding for one tree.
struct EmbedParams {
  int d = 1;
  int h = 1;
  int M = 2;
  double eps = 0.5;
  Metric metric{};
  double r_star = 0.0;
  double r = 0.0;
  int s = 0;        // s(T); 0 when no admissible base exists
  int k = 0;        // k_s
  int k2 = 0;       // k_2
  int m_prime = 0;  // m'
  Mode mode = Mode::practical;
  double relax = 1.0;

  /// d^{1/p} s^{-k}: diameter of a cube of the finest tessellation.
  [[nodiscard]] double cell_diameter() const;
  /// Largest center-to-center hop a path may take.
  [[nodiscard]] double hop_bound() const;
  /// Distance from c(p_i) to the waypoint w on the way to the target.
  [[nodiscard]] double waypoint_distance() const;
};

/// r* = d^{1/p} / (2h); p = inf gives 1/(2h).
double threshold_radius(int d, int h, Metric metric = {});

/// Smallest k >= 1 with d^{1/p} s^{1-k} <= r and d^{1/p} s^{-k} < relax*eps*r*/8.
int compute_k(int s, int d, double eps, double r, double r_star, double relax = 1.0,
              Metric metric = {});

EmbedParams make_params(const DegreeSequence& seq, const EmbedConfig& config);
EmbedParams make_params(const BalancedTree& tree, const EmbedConfig& config);

struct PreconditionCheck {
  std::string id;
  bool holds = false;
  double margin = 0.0;  // >= 0 exactly when the inequality holds (log scale for the
                        // exponential inequalities)
};

/// The sequence form works for heights whose tree size overflows.
std::vector<PreconditionCheck> check_preconditions(const EmbedParams& params,
                                                   const DegreeSequence& seq);
std::vector<PreconditionCheck> check_preconditions(const EmbedParams& params,
                                                   const BalancedTree& tree);
bool all_hold(const std::vector<PreconditionCheck>& checks);

struct CubePath {
  std::vector<CubeId> cubes;
};

/// Path plan from p in sigma_k(q) into sigma_k(phi_ell(p)), before
/// padding. q sits at level ell-1.
CubePath natural_path(const CubeId& q, const CubeId& p, int ell, const EmbedParams& params);

/// natural_path padded to t_target cubes by repeating the terminal cube.
CubePath plan_path(const CubeId& q, const CubeId& p, int ell, const EmbedParams& params,
                   std::size_t t_target);

struct PathCheck {
  bool starts_at_p = false;
  bool ends_in_target = false;
  bool hops_within_bound = false;
  bool budget_within_r = false;    // eps r*/16 + (1+7eps/8) r* + eps r*/16 <= r
  bool cells_within_r = false;     // farthest points of consecutive cubes <= r
  bool progress_ok = false;        // first step and interior steps
  double max_hop = 0.0;
  [[nodiscard]] bool ok(bool require_progress) const {
    return starts_at_p && ends_in_target && hops_within_bound && budget_within_r &&
           cells_within_r && (progress_ok || !require_progress);
  }
};

/// Re-derives every path property from the cubes alone.
PathCheck check_path(const CubePath& path, const CubeId& q, const CubeId& p, int ell,
                     const EmbedParams& params);

struct PathRecord {
  CubeId q;
  CubeId p;
  CubePath path;  // padded to the block's t_target
};

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct EmbedReport {
  bool success = false;
  std::string failure_stage;  // preconditions | params | subroutine1 | subroutine2 |
                              // subroutine3 | verify
  std::optional<CubeId> failure_cube;
  int failure_layer = -1;
  std::string message;

  int m_steps = 0;              // subroutine-2 steps actually taken
  bool subroutine2_complete = false;
  bool equidistributed = false; // actives per level-k cube all equal L_{m'+m}/s^{kd}
  std::uint64_t embedded_before_matching = 0;  // N_{m'+m}
  double max_edge = 0.0;
  double step_bound = 0.0;      // (k-1) + ceil((d^{1/p}/2)/((1+5eps/8) r*)) + (k-1)
  std::vector<PreconditionCheck> preconditions;
  std::vector<std::vector<PathRecord>> blocks;  // blocks[ell-1]
  std::vector<StageTiming> timings;
};

struct EmbedResult {
  EmbedReport report;
  std::vector<VertexId> embedding;  // tree position -> vertex id; empty on failure
};

/// Runs the three-subroutine embedding. Throws std::invalid_argument when
/// |ps| != |T| or dimensions disagree; algorithmic failures are reported.
EmbedResult embed(const BalancedTree& tree, const PointSet& ps, const EmbedParams& params);

struct VerifyResult {
  bool pass = false;
  double max_edge = 0.0;
  std::string reason;
};

/// Checks injectivity and that every parent-child pair is within r, using
/// only the tree shape, the points and the map.
VerifyResult verify_embedding(const BalancedTree& tree, const PointSet& ps,
                              const std::vector<VertexId>& embedding, double r,
                              Metric metric = {});

}  // namespace geospan
