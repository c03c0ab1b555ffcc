#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geospan/embedder.hpp"
#include "geospan/experiments.hpp"
#include "geospan/geometry.hpp"
#include "geospan/io.hpp"
#include "geospan/oracle.hpp"
#include "geospan/pointcloud.hpp"
#include "geospan/trees.hpp"

using namespace geospan;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a file fails to parse; carries the file name for the diagnostic.
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TreeFlags {
  int sary = 0;
  int height = 0;
  std::string seq_file;

  void add(CLI::App* cmd) {
    cmd->add_option("--sary", sary, "Uniform branching factor s (with --height)");
    cmd->add_option("--height", height, "Tree height h");
    cmd->add_option("--seq", seq_file, "Degree sequence file ('h M' then h integers)");
  }

  [[nodiscard]] bool given() const { return sary != 0 || !seq_file.empty(); }

  [[nodiscard]] DegreeSequence sequence() const {
    if (!seq_file.empty()) {
      if (sary != 0) throw UsageError("--seq and --sary are mutually exclusive");
      std::ifstream in(seq_file);
      if (!in) throw UsageError("cannot open " + seq_file);
      DegreeSequence seq = [&] {
        try {
          return read_sequence(in);
        } catch (const ParseError& e) {
          throw FileError(seq_file + ":" + e.what());
        }
      }();
      if (height != 0 && height != seq.height()) {
        throw UsageError("--height disagrees with the sequence file");
      }
      return seq;
    }
    if (sary < 2) throw UsageError("give --sary s (s >= 2) with --height, or --seq FILE");
    if (height < 1) throw UsageError("--height must be >= 1");
    return DegreeSequence::uniform(sary, height);
  }

  [[nodiscard]] std::string label() const { return seq_file.empty() ? std::to_string(sary) : "seq"; }
};

Metric parse_metric(const std::string& text) {
  if (text == "inf" || text == "infinity") return Metric::chebyshev();
  try {
    std::size_t used = 0;
    const double p = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return Metric(p);
  } catch (const std::exception&) {
    throw UsageError("--p must be a number >= 1 or 'inf', got '" + text + "'");
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PointSet load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return read_points(in);
  } catch (const ParseError& e) {
    throw FileError(path + ":" + e.what());
  }
}

template <typename Fn>
void with_output(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  write(out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in list");
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::size_t component_count(const GeometricGraph& g) {
  std::vector<bool> seen(g.size(), false);
  std::vector<VertexId> stack;
  std::size_t comps = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    ++comps;
    seen[s] = true;
    stack.push_back(static_cast<VertexId>(s));
    while (!stack.empty()) {
      const VertexId u = stack.back();
      stack.pop_back();
      g.for_each_neighbor(u, [&](VertexId v) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      });
    }
  }
  return comps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "geospan: embed balanced trees as spanning trees of random geometric graphs.\n"
      "Threshold r* = d^{1/p}/(2h). Practical mode relaxes the strict constants\n"
      "(rho applied to the cube-size bound, shortest admissible prefix for m')\n"
      "and certifies every output by verification."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  int d = 1;
  std::string p_text = "2";
  std::uint64_t seed = 0;
  TreeFlags tree_flags;

  // sample
  auto* sample = app.add_subcommand("sample", "Write a uniform point sample in [0,1]^d");
  std::size_t sample_n = 0;
  std::string sample_out = "-";
  sample->add_option("--d", d, "Dimension")->capture_default_str();
  sample->add_option("--n", sample_n, "Number of points (default: tree size)");
  sample->add_option("--seed", seed, "Seed")->capture_default_str();
  sample->add_option("--out", sample_out, "Output file, '-' for stdout")->capture_default_str();
  tree_flags.add(sample);

  // graph
  auto* graph = app.add_subcommand("graph", "Edge count and degree statistics of G(X, r)");
  std::string points_file;
  std::optional<double> radius;
  std::optional<double> r_mult;
  graph->add_option("--points", points_file, "Point-set file")->required();
  graph->add_option("--r", radius, "Radius");
  graph->add_option("--r-mult", r_mult, "Radius as a multiple of r* (needs --height)");
  graph->add_option("--height", tree_flags.height, "Tree height h for r*");
  graph->add_option("--p", p_text, "Metric exponent p or 'inf'")->capture_default_str();

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "Embed a balanced tree and verify the result");
  std::optional<double> eps;
  std::string mode_text = "practical";
  double relax = 4.0;
  std::string embedding_file = "embedding.txt";
  bool timings = false;
  embed_cmd->add_option("--d", d, "Dimension")->capture_default_str();
  embed_cmd->add_option("--p", p_text, "Metric exponent p or 'inf'")->capture_default_str();
  tree_flags.add(embed_cmd);
  embed_cmd->add_option("--eps", eps, "eps, r = (1+eps) r* (default 0.5, or r-mult - 1)");
  embed_cmd->add_option("--r-mult", r_mult, "Override r = r_mult * r*");
  embed_cmd->add_option("--mode", mode_text, "strict | practical")
      ->capture_default_str()
      ->check(CLI::IsMember({"strict", "practical"}));
  embed_cmd->add_option("--relax", relax, "rho: practical-mode factor on eps r*/8 (strict: 1)")
      ->capture_default_str();
  embed_cmd->add_option("--seed", seed, "Seed for sampling |T| points")->capture_default_str();
  embed_cmd->add_option("--points", points_file, "Point-set file instead of sampling");
  embed_cmd->add_option("--out,--embedding", embedding_file, "Embedding output file")
      ->capture_default_str();
  embed_cmd->add_flag("--timings", timings, "Print per-stage wall times");

  // verify
  auto* verify = app.add_subcommand("verify", "Re-check an embedding file against points");
  verify->add_option("--points", points_file, "Point-set file")->required();
  verify->add_option("--embedding", embedding_file, "Embedding file")->required();
  verify->add_option("--sary", tree_flags.sary, "Uniform branching factor s");
  verify->add_option("--height", tree_flags.height, "Tree height h");
  verify->add_option("--seq", tree_flags.seq_file, "Degree sequence file");
  verify->add_option("--r", radius, "Radius (default: the one recorded in the file)");
  verify->add_option("--p", p_text, "Metric exponent p or 'inf'")->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over radius multipliers");
  std::string r_mults_text = "0.5,0.8,1.0,2.0,4.0,8.0";
  int trials = 10;
  std::string sweep_out = "-";
  std::string summary_file;
  int workers = 0;
  sweep->add_option("--d", d, "Dimension")->capture_default_str();
  sweep->add_option("--p", p_text, "Metric exponent p or 'inf'")->capture_default_str();
  tree_flags.add(sweep);
  sweep->add_option("--r-mults", r_mults_text, "Comma-separated multipliers of r*")
      ->capture_default_str();
  sweep->add_option("--trials", trials, "Trials per multiplier")->capture_default_str();
  sweep->add_option("--seed", seed, "Base seed; trial seed = base XOR trial")->capture_default_str();
  sweep->add_option("--relax", relax, "rho for practical-mode embedding")->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV output, '-' for stdout")->capture_default_str();
  sweep->add_option("--summary", summary_file, "Summary JSON output");
  sweep->add_option("--workers", workers, "Worker threads (default: GEOSPAN_WORKERS or 1)");
  sweep->add_flag("--timings", timings, "Fill the runtime_ms column");

  // witness
  auto* witness = app.add_subcommand("witness", "Diameter certificate of non-containment");
  bool require_certificate = false;
  witness->add_option("--d", d, "Dimension")->capture_default_str();
  witness->add_option("--p", p_text, "Metric exponent p or 'inf'")->capture_default_str();
  tree_flags.add(witness);
  witness->add_option("--points", points_file, "Point-set file instead of sampling");
  witness->add_option("--seed", seed, "Seed for sampling |T| points")->capture_default_str();
  witness->add_option("--r-mult", r_mult, "r = r_mult * r*");
  witness->add_option("--r", radius, "Radius");
  witness->add_flag("--require-certificate", require_certificate,
                    "Exit 1 when the witness is inconclusive");

  // oracle-check
  auto* oracle = app.add_subcommand("oracle-check", "Exact spanning-tree containment (n <= 14)");
  bool any_balanced = false;
  oracle->add_option("--d", d, "Dimension")->capture_default_str();
  oracle->add_option("--p", p_text, "Metric exponent p or 'inf'")->capture_default_str();
  tree_flags.add(oracle);
  oracle->add_option("--points", points_file, "Point-set file instead of sampling");
  oracle->add_option("--seed", seed, "Seed for sampling |T| points")->capture_default_str();
  oracle->add_option("--r-mult", r_mult, "r = r_mult * r*");
  oracle->add_option("--r", radius, "Radius");
  oracle->add_flag("--any-balanced", any_balanced,
                   "Ask for any balanced tree of height --height instead of one sequence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Metric metric = parse_metric(p_text);

    if (*sample) {
      std::size_t n = sample_n;
      if (n == 0) {
        if (!tree_flags.given()) throw UsageError("give --n N or a tree (--sary/--height, --seq)");
        n = tree_size(tree_flags.sequence());
      }
      const PointSet ps = sample_uniform(n, d, seed);
      with_output(sample_out, [&](std::ostream& out) { write_points(out, ps); });
      return 0;
    }

    if (*graph) {
      const PointSet ps = load_points(points_file);
      double r = 0.0;
      if (radius) {
        r = *radius;
      } else if (r_mult) {
        if (tree_flags.height < 1) throw UsageError("--r-mult needs --height");
        r = *r_mult * threshold_radius(ps.dim(), tree_flags.height, metric);
      } else {
        throw UsageError("give --r or --r-mult with --height");
      }
      const GeometricGraph g = build_graph(ps, r, metric);
      std::size_t lo = g.size() ? std::numeric_limits<std::size_t>::max() : 0;
      std::size_t hi = 0;
      for (std::size_t u = 0; u < g.size(); ++u) {
        const std::size_t deg = g.degree(static_cast<VertexId>(u));
        lo = std::min(lo, deg);
        hi = std::max(hi, deg);
      }
      const std::uint64_t edges = g.edge_count();
      std::cout << "vertices " << g.size() << "\n"
                << "radius " << g17(r) << "\n"
                << "edges " << edges << "\n"
                << "min_degree " << lo << "\n"
                << "max_degree " << hi << "\n"
                << "mean_degree " << g17(g.size() ? 2.0 * edges / g.size() : 0.0) << "\n"
                << "components " << component_count(g) << "\n";
      return 0;
    }

    if (*embed_cmd) {
      const BalancedTree tree(tree_flags.sequence());
      const PointSet ps = points_file.empty() ? sample_uniform(tree.size(), d, seed)
                                              : load_points(points_file);
      if (ps.dim() != d) throw UsageError("point file dimension differs from --d");
      if (ps.size() != tree.size()) {
        throw UsageError("point file has " + std::to_string(ps.size()) + " points, tree has " +
                         std::to_string(tree.size()));
      }
      EmbedConfig cfg;
      cfg.d = d;
      cfg.metric = metric;
      cfg.mode = parse_mode(mode_text);
      cfg.relax = relax;
      cfg.eps = eps ? *eps : (r_mult ? *r_mult - 1.0 : 0.5);
      if (r_mult) cfg.r_override = *r_mult * threshold_radius(d, tree.height(), metric);
      const EmbedParams params = make_params(tree, cfg);
      const EmbedResult result = embed(tree, ps, params);
      const EmbedReport& rep = result.report;

      std::cout << "mode " << to_string(params.mode) << "\n"
                << "d " << params.d << " h " << params.h << " M " << params.M << " p "
                << (metric.is_infinity() ? std::string("inf") : g17(metric.p())) << "\n"
                << "r_star " << g17(params.r_star) << "\n"
                << "r " << g17(params.r) << "\n"
                << "eps " << g17(params.eps) << " relax " << g17(params.relax) << "\n"
                << "s " << params.s << " k " << params.k << " k2 " << params.k2 << " m_prime "
                << params.m_prime << "\n";
      for (const auto& c : rep.preconditions) {
        std::cout << "check " << c.id << ' ' << (c.holds ? "holds" : "fails") << " margin "
                  << g17(c.margin) << "\n";
      }
      std::cout << "m_steps " << rep.m_steps << " bound " << g17(rep.step_bound) << "\n";
      if (timings) {
        for (const auto& t : rep.timings) std::cout << "time_ms " << t.stage << ' ' << t.ms << "\n";
      }
      if (!rep.success) {
        std::cout << "result failure\n"
                  << "stage " << rep.failure_stage << "\n"
                  << "layer " << rep.failure_layer << "\n";
        if (rep.failure_cube) {
          std::cout << "cube level " << rep.failure_cube->level << " cell";
          for (auto c : rep.failure_cube->cell) std::cout << ' ' << c;
          std::cout << "\n";
        }
        std::cout << "message " << rep.message << "\n"
                  << "verified: false\n";
        return 1;
      }
      with_output(embedding_file, [&](std::ostream& out) {
        write_embedding(out, tree, result.embedding, params.r);
      });
      std::cout << "result success\n"
                << "max_edge " << g17(rep.max_edge) << "\n"
                << "embedding " << embedding_file << "\n"
                << "verified: true\n";
      return 0;
    }

    if (*verify) {
      const BalancedTree tree(tree_flags.sequence());
      const PointSet ps = load_points(points_file);
      std::ifstream in(embedding_file);
      if (!in) throw UsageError("cannot open " + embedding_file);
      EmbeddingFile file;
      std::vector<VertexId> map;
      try {
        file = read_embedding(in);
        map = embedding_positions(file, tree);
      } catch (const ParseError& e) {
        throw FileError(embedding_file + ":" + e.what());
      }
      const double r = radius ? *radius : file.r;
      const VerifyResult res = verify_embedding(tree, ps, map, r, metric);
      std::cout << "radius " << g17(r) << "\n"
                << "max_edge " << g17(res.max_edge) << "\n";
      if (!res.pass) std::cout << "reason " << res.reason << "\n";
      std::cout << "verified: " << (res.pass ? "true" : "false") << "\n";
      return res.pass ? 0 : 1;
    }

    if (*sweep) {
      SweepConfig cfg;
      cfg.d = d;
      cfg.metric = metric;
      cfg.sequence = tree_flags.sequence();
      cfg.s_spec = tree_flags.label();
      cfg.multipliers = parse_list(r_mults_text);
      cfg.trials = trials;
      cfg.base_seed = seed;
      cfg.relax = relax;
      cfg.workers = workers > 0 ? workers : workers_from_env(1);
      cfg.timings = timings;
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const SweepResult res = run_sweep(cfg);
      with_output(sweep_out, [&](std::ostream& out) { write_sweep_csv(out, res); });
      if (!summary_file.empty()) {
        with_output(summary_file, [&](std::ostream& out) { write_sweep_summary_json(out, res); });
      }
      return 0;
    }

    if (*witness || *oracle) {
      const bool for_oracle = oracle->parsed();
      std::optional<DegreeSequence> seq;
      int h = tree_flags.height;
      if (tree_flags.given()) {
        seq = tree_flags.sequence();
        h = seq->height();
      }
      if (h < 1) throw UsageError("give --height (with --sary or --seq, or alone)");
      PointSet ps;
      if (!points_file.empty()) {
        ps = load_points(points_file);
      } else {
        if (!seq) throw UsageError("sampling needs a tree (--sary/--height or --seq) for |T|");
        ps = sample_uniform(tree_size(*seq), d, seed);
      }
      double r = 0.0;
      if (radius) {
        r = *radius;
      } else if (r_mult) {
        r = *r_mult * threshold_radius(ps.dim(), h, metric);
      } else {
        throw UsageError("give --r or --r-mult");
      }
      if (!for_oracle) {
        const WitnessResult w = diameter_witness(ps, r, h, metric);
        std::cout << "radius " << g17(r) << "\n"
                  << "u " << w.u << " v " << w.v << "\n"
                  << "distance " << g17(w.distance) << "\n"
                  << "hop_limit " << 2 * h << "\n"
                  << "method " << w.method << "\n";
        if (w.hops) std::cout << "hops " << *w.hops << "\n";
        std::cout << "certified_absent: " << (w.certified ? "true" : "false") << "\n";
        return (!w.certified && require_certificate) ? 1 : 0;
      }
      if (ps.size() > kOracleMaxVertices) {
        throw UsageError("oracle-check accepts at most " + std::to_string(kOracleMaxVertices) +
                         " points");
      }
      const GeometricGraph g = build_graph(ps, r, metric);
      bool yes = false;
      if (any_balanced) {
        yes = contains_balanced_tree(g, h);
      } else {
        if (!seq) throw UsageError("give a tree (--sary/--height or --seq) or --any-balanced");
        yes = contains_spanning_tree(g, ExplicitTree::from_balanced(BalancedTree(*seq)));
      }
      std::cout << "vertices " << g.size() << "\n"
                << "radius " << g17(r) << "\n"
                << "edges " << g.edge_count() << "\n"
                << "contains: " << (yes ? "yes" : "no") << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
