#include "geospan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace geospan {

namespace {

VertexId nearest_to(const PointSet& ps, double corner, Metric metric) {
  const Point target(static_cast<std::size_t>(ps.dim()), corner);
  VertexId best = 0;
  double best_dist = lp_distance(ps.point(0), target, metric);
  for (std::size_t i = 1; i < ps.size(); ++i) {
    const double dist = lp_distance(ps.point(i), target, metric);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<VertexId>(i);
    }
  }
  return best;
}

// Chooses u, v and settles the cases that need no graph search.
std::optional<WitnessResult> witness_prelude(const PointSet& ps, double r, int h, Metric metric,
                                             WitnessResult& out) {
  if (ps.size() == 0) throw std::invalid_argument("diameter_witness: empty point set");
  if (h < 0) throw std::invalid_argument("diameter_witness: negative height");
  out.u = nearest_to(ps, 0.0, metric);
  out.v = nearest_to(ps, 1.0, metric);
  out.distance = lp_distance(ps.point(out.u), ps.point(out.v), metric);
  if (out.u == out.v) {
    out.hops = 0;
    out.method = "trivial";
    return out;
  }
  // Each hop covers at most r, so fewer than distance/r hops cannot connect u and v.
  const double bound = 2.0 * h * r;
  if (out.distance > bound * (1.0 + 1e-12) || (r <= 0 && out.distance > 0)) {
    out.certified = true;
    out.method = "distance-bound";
    return out;
  }
  return std::nullopt;
}

void finish_with_bfs(const GeometricGraph& g, int h, WitnessResult& out) {
  out.hops = hop_distance(g, out.u, out.v, static_cast<std::size_t>(2 * h));
  out.certified = !out.hops.has_value();
  out.method = out.certified ? "bfs" : "bfs-inconclusive";
}

}  // namespace

WitnessResult diameter_witness(const GeometricGraph& g, int h) {
  WitnessResult out;
  if (auto early = witness_prelude(g.points(), g.radius(), h, g.metric(), out)) return *early;
  finish_with_bfs(g, h, out);
  return out;
}

WitnessResult diameter_witness(const PointSet& ps, double r, int h, Metric metric) {
  WitnessResult out;
  if (auto early = witness_prelude(ps, r, h, metric, out)) return *early;
  const GeometricGraph g = build_graph(ps, r, metric);
  finish_with_bfs(g, h, out);
  return out;
}

void SweepConfig::validate() const {
  if (d < 1 || d > 16) throw std::invalid_argument("sweep: d must be in 1..16");
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");
  if (multipliers.empty()) throw std::invalid_argument("sweep: no radius multipliers");
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    if (!(multipliers[i] > 0)) throw std::invalid_argument("sweep: multipliers must be positive");
    if (i > 0 && !(multipliers[i] > multipliers[i - 1])) {
      throw std::invalid_argument("sweep: multipliers must be strictly increasing");
    }
  }
  if (!(relax >= 1)) throw std::invalid_argument("sweep: relax must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<TrialRecord> run_trial(const SweepConfig& cfg, const BalancedTree& tree, double r_star,
                                   int trial) {
  const std::uint64_t seed = cfg.base_seed ^ static_cast<std::uint64_t>(trial);
  const PointSet ps = sample_uniform(tree.size(), cfg.d, seed);
  std::vector<TrialRecord> out;
  for (double mult : cfg.multipliers) {
    const auto t0 = Clock::now();
    TrialRecord rec;
    rec.seed = seed;
    rec.trial = trial;
    rec.r_mult = mult;
    rec.eps = mult - 1.0;
    if (mult < 1.0) {
      rec.mode = "witness";
      const WitnessResult w = diameter_witness(ps, mult * r_star, tree.height(), cfg.metric);
      rec.outcome = w.certified ? "witness-certified-absent" : "witness-inconclusive";
    } else {
      rec.mode = "practical";
      EmbedConfig ec;
      ec.d = cfg.d;
      ec.metric = cfg.metric;
      ec.eps = rec.eps;
      ec.mode = Mode::practical;
      ec.relax = cfg.relax;
      std::optional<EmbedParams> params;
      try {
        params = make_params(tree, ec);
      } catch (const std::invalid_argument&) {
        rec.outcome = "embed-failure:params";
      }
      if (params) {
        const EmbedResult res = embed(tree, ps, *params);
        rec.outcome = res.report.success ? "success" : "embed-failure:" + res.report.failure_stage;
        rec.m_steps = res.report.m_steps;
        rec.max_edge = res.report.max_edge;
      }
    }
    if (cfg.timings) {
      rec.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const BalancedTree tree(cfg.sequence);
  SweepResult result;
  result.config = cfg;
  result.r_star = threshold_radius(cfg.d, tree.height(), cfg.metric);

  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(cfg.trials));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (int t = next++; t < cfg.trials; t = next++) {
      try {
        per_trial[t] = run_trial(cfg, tree, result.r_star, t);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int workers = std::min(cfg.workers, cfg.trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  for (std::size_t j = 0; j < cfg.multipliers.size(); ++j) {
    MultiplierSummary sum;
    sum.r_mult = cfg.multipliers[j];
    for (const auto& recs : per_trial) {
      const TrialRecord& rec = recs[j];
      ++sum.trials;
      if (rec.outcome == "success") ++sum.successes;
      if (rec.outcome == "witness-certified-absent") ++sum.certified_absent;
    }
    sum.frequency = static_cast<double>(sum.successes) / sum.trials;
    const Interval ci = wilson_interval(sum.successes, sum.trials);
    sum.wilson_lo = ci.lo;
    sum.wilson_hi = ci.hi;
    result.summary.push_back(sum);
  }
  for (auto& recs : per_trial) {
    for (auto& rec : recs) result.records.push_back(std::move(rec));
  }
  return result;
}

int workers_from_env(int fallback) {
  const char* env = std::getenv("GEOSPAN_WORKERS");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 1024) return fallback;
  return static_cast<int>(value);
}

namespace {

std::string fmt(const char* spec, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, value);
  return buf;
}

std::string metric_label(Metric m) { return m.is_infinity() ? "inf" : fmt("%.17g", m.p()); }

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  const SweepConfig& cfg = result.config;
  out << "seed,d,h,s_spec,p,eps,r_mult,mode,outcome,m_steps,max_edge,runtime_ms\n";
  for (const TrialRecord& rec : result.records) {
    out << rec.seed << ',' << cfg.d << ',' << cfg.sequence.height() << ',' << cfg.s_spec << ','
        << metric_label(cfg.metric) << ',' << fmt("%.17g", rec.eps) << ','
        << fmt("%.17g", rec.r_mult) << ',' << rec.mode << ',' << rec.outcome << ','
        << rec.m_steps << ',' << fmt("%.17g", rec.max_edge) << ',' << fmt("%.3f", rec.runtime_ms)
        << '\n';
  }
}

void write_sweep_summary_json(std::ostream& out, const SweepResult& result) {
  nlohmann::ordered_json doc;
  doc["d"] = result.config.d;
  doc["h"] = result.config.sequence.height();
  doc["s_spec"] = result.config.s_spec;
  doc["p"] = metric_label(result.config.metric);
  doc["r_star"] = result.r_star;
  doc["trials"] = result.config.trials;
  doc["base_seed"] = result.config.base_seed;
  auto& rows = doc["multipliers"] = nlohmann::ordered_json::array();
  for (const MultiplierSummary& s : result.summary) {
    nlohmann::ordered_json row;
    row["r_mult"] = s.r_mult;
    row["trials"] = s.trials;
    row["successes"] = s.successes;
    row["certified_absent"] = s.certified_absent;
    row["frequency"] = s.frequency;
    row["wilson95"] = {s.wilson_lo, s.wilson_hi};
    rows.push_back(std::move(row));
  }
  try {
    doc["empirical_width"] = empirical_width(result);
  } catch (const std::domain_error&) {
    doc["empirical_width"] = nullptr;
  }
  out << doc.dump(2) << '\n';
}

Interval wilson_interval(int successes, int trials) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: need 0 <= successes <= trials, trials >= 1");
  }
  constexpr double z = 1.959963984540054;
  const double n = trials;
  const double p = successes / n;
  const double denom = 1.0 + z * z / n;
  const double mid = (p + z * z / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
  return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

namespace {

double crossing(const std::vector<double>& x, const std::vector<double>& f, double level) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (f[i] < level && f[i + 1] >= level) {
      return x[i] + (level - f[i]) / (f[i + 1] - f[i]) * (x[i + 1] - x[i]);
    }
  }
  throw std::domain_error("sweep does not bracket frequency " + std::to_string(level));
}

}  // namespace

double empirical_width(const std::vector<double>& multipliers,
                       const std::vector<double>& frequencies, double r_star, double lo, double hi) {
  if (multipliers.size() != frequencies.size()) {
    throw std::invalid_argument("empirical_width: size mismatch");
  }
  if (!(lo < hi)) throw std::invalid_argument("empirical_width: need lo < hi");
  return (crossing(multipliers, frequencies, hi) - crossing(multipliers, frequencies, lo)) * r_star;
}

double empirical_width(const SweepResult& sweep, double lo, double hi) {
  std::vector<double> x;
  std::vector<double> f;
  for (const auto& s : sweep.summary) {
    x.push_back(s.r_mult);
    f.push_back(s.frequency);
  }
  return empirical_width(x, f, sweep.r_star, lo, hi);
}

int OccupancyResult::violations(double band) const {
  return static_cast<int>(std::count_if(max_deviation.begin(), max_deviation.end(),
                                        [&](double dev) { return dev > band; }));
}

double OccupancyResult::union_bound() const {
  return 2.0 * std::pow(static_cast<double>(s), static_cast<double>(k) * d) *
         std::exp(-std::cbrt(static_cast<double>(n)) / 3.0);
}

OccupancyResult occupancy_trials(std::size_t n, int d, int s, int k, int trials,
                                 std::uint64_t base_seed) {
  if (k < 0) throw std::invalid_argument("occupancy_trials: k must be >= 0");
  if (trials < 1) throw std::invalid_argument("occupancy_trials: trials must be >= 1");
  const auto cubes = static_cast<double>(ipow(s, k * d));
  if (cubes > static_cast<double>(n)) throw std::invalid_argument("occupancy_trials: s^{kd} > n");
  OccupancyResult out;
  out.n = n;
  out.d = d;
  out.s = s;
  out.k = k;
  out.expected = static_cast<double>(n) / cubes;
  for (int t = 0; t < trials; ++t) {
    const PointSet ps = sample_uniform(n, d, base_seed ^ static_cast<std::uint64_t>(t));
    const OccupancyTable table = occupancy(ps, k, s);
    double worst = 0.0;
    for (std::int64_t c : table.counts) {
      worst = std::max(worst, std::abs(static_cast<double>(c) - out.expected));
    }
    out.max_deviation.push_back(worst);
  }
  return out;
}

}  // namespace geospan
