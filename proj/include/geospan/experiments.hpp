#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geospan/embedder.hpp"
#include "geospan/geometry.hpp"
#include "geospan/pointcloud.hpp"
#include "geospan/trees.hpp"

namespace geospan {

struct WitnessResult {
  bool certified = false;  // no tree of height h spans the graph
  VertexId u = 0;          // nearest to the origin corner
  VertexId v = 0;          // nearest to the all-ones corner
  double distance = 0.0;   // ||u - v||
  std::optional<std::size_t> hops;  // set when BFS reached v within 2h hops
  std::string method;      // "distance-bound" | "bfs" | "bfs-inconclusive" | "trivial"
};

/// Sound, incomplete certificate of non-containment: u and v more than 2h
/// hops apart rule out every spanning tree of height h.
WitnessResult diameter_witness(const GeometricGraph& g, int h);

/// Same certificate; the graph is only built when the distance bound alone
/// does not decide.
WitnessResult diameter_witness(const PointSet& ps, double r, int h, Metric metric = {});

struct SweepConfig {
  int d = 1;
  DegreeSequence sequence = DegreeSequence::uniform(2, 1);
  std::string s_spec = "2";  // label for the CSV column
  Metric metric{};
  std::vector<double> multipliers;  // r = multiplier * r*
  int trials = 1;
  std::uint64_t base_seed = 0;
  double relax = 4.0;
  int workers = 1;
  bool timings = false;  // runtime_ms stays 0 unless set

  /// Throws std::invalid_argument on unsorted or non-positive multipliers or trials < 1.
  void validate() const;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  int trial = 0;
  double r_mult = 0.0;
  double eps = 0.0;
  std::string mode;     // "witness" or "practical"
  std::string outcome;  // success | embed-failure:<stage> | witness-certified-absent | witness-inconclusive
  int m_steps = 0;
  double max_edge = 0.0;
  double runtime_ms = 0.0;
};

struct MultiplierSummary {
  double r_mult = 0.0;
  int trials = 0;
  int successes = 0;
  int certified_absent = 0;
  double frequency = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

struct SweepResult {
  SweepConfig config;
  double r_star = 0.0;
  std::vector<TrialRecord> records;  // trial-major, multipliers ascending
  std::vector<MultiplierSummary> summary;
};

/// Trial seed = base_seed XOR trial index; one PointSet per trial is shared by
/// every multiplier.
SweepResult run_sweep(const SweepConfig& cfg);

/// Worker count from GEOSPAN_WORKERS, or fallback when unset or invalid.
int workers_from_env(int fallback = 1);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_summary_json(std::ostream& out, const SweepResult& result);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at 95% confidence.
Interval wilson_interval(int successes, int trials);

/// (x_hi - x_lo) * r_star where x_level is the linear interpolation of the
/// first upward crossing of level. Throws std::domain_error when either
/// crossing is not bracketed.
double empirical_width(const std::vector<double>& multipliers,
                       const std::vector<double>& frequencies, double r_star, double lo = 0.1,
                       double hi = 0.9);
double empirical_width(const SweepResult& sweep, double lo = 0.1, double hi = 0.9);

struct OccupancyResult {
  std::size_t n = 0;
  int d = 1;
  int s = 2;
  int k = 0;
  double expected = 0.0;               // n / s^{kd}
  std::vector<double> max_deviation;   // per trial, max over cubes of |count - expected|

  /// Trials in which some cube deviates by more than band.
  [[nodiscard]] int violations(double band) const;
  /// 2 s^{kd} exp(-n^{1/3}/3).
  [[nodiscard]] double union_bound() const;
};

/// Trial t samples n points with seed base_seed XOR t.
OccupancyResult occupancy_trials(std::size_t n, int d, int s, int k, int trials,
                                 std::uint64_t base_seed);

}  // namespace geospan
