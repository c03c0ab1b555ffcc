#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "geospan/embedder.hpp"
#include "geospan/experiments.hpp"
#include "geospan/matching.hpp"
#include "geospan/oracle.hpp"

namespace py = pybind11;
using namespace geospan;

namespace {

Metric metric_from(const py::object& p) {
  if (p.is_none()) return Metric();
  if (py::isinstance<py::str>(p)) {
    const auto text = p.cast<std::string>();
    if (text == "inf") return Metric::chebyshev();
    throw std::invalid_argument("p must be a number >= 1 or 'inf'");
  }
  return Metric(p.cast<double>());
}

PointSet points_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("points must be a 2-d array (n, d)");
  const auto n = static_cast<std::size_t>(arr.shape(0));
  const auto d = static_cast<int>(arr.shape(1));
  std::vector<double> coords(arr.data(), arr.data() + n * static_cast<std::size_t>(d));
  return PointSet(d, std::move(coords));
}

py::array_t<double> points_to(const PointSet& ps) {
  py::array_t<double> out({static_cast<py::ssize_t>(ps.size()), static_cast<py::ssize_t>(ps.dim())});
  std::copy(ps.coords().begin(), ps.coords().end(), out.mutable_data());
  return out;
}

DegreeSequence sequence_from(const py::object& tree, int height) {
  if (py::isinstance<py::int_>(tree)) return DegreeSequence::uniform(tree.cast<int>(), height);
  auto entries = tree.cast<std::vector<int>>();
  if (entries.empty()) throw std::invalid_argument("empty degree sequence");
  const int bound = *std::max_element(entries.begin(), entries.end());
  return DegreeSequence(std::move(entries), bound);
}

py::dict embed_py(const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
                  const py::object& tree, int height, double eps, const std::string& mode,
                  double relax, const py::object& p) {
  const BalancedTree t(sequence_from(tree, height));
  const PointSet ps = points_from(points);
  EmbedConfig cfg;
  cfg.d = ps.dim();
  cfg.metric = metric_from(p);
  cfg.eps = eps;
  cfg.mode = parse_mode(mode);
  cfg.relax = relax;
  const EmbedParams prm = make_params(t, cfg);
  EmbedResult res;
  {
    py::gil_scoped_release release;
    res = embed(t, ps, prm);
  }
  const EmbedReport& rep = res.report;
  py::dict out;
  out["success"] = rep.success;
  out["failure_stage"] = rep.failure_stage;
  out["message"] = rep.message;
  out["r"] = prm.r;
  out["r_star"] = prm.r_star;
  out["s"] = prm.s;
  out["k"] = prm.k;
  out["m_prime"] = prm.m_prime;
  out["m_steps"] = rep.m_steps;
  out["step_bound"] = rep.step_bound;
  out["max_edge"] = rep.max_edge;
  py::dict checks;
  for (const auto& c : rep.preconditions) checks[py::str(c.id)] = c.holds;
  out["checks"] = checks;
  out["embedding"] = res.embedding;
  return out;
}

}  // namespace

PYBIND11_MODULE(_geospan, m) {
  m.doc() = "Balanced-tree embeddings in random geometric graphs";

  m.def("threshold_radius", [](int d, int h, const py::object& p) {
    return threshold_radius(d, h, metric_from(p));
  }, py::arg("d"), py::arg("h"), py::arg("p") = py::none());

  m.def("sample_uniform", [](std::size_t n, int d, std::uint64_t seed) {
    return points_to(sample_uniform(n, d, seed));
  }, py::arg("n"), py::arg("d"), py::arg("seed"));

  m.def("tree_size", [](const py::object& tree, int height) {
    return tree_size(sequence_from(tree, height));
  }, py::arg("tree"), py::arg("height") = 0);

  m.def("compute_k", [](int s, int d, double eps, double r, double r_star, double relax) {
    return compute_k(s, d, eps, r, r_star, relax);
  }, py::arg("s"), py::arg("d"), py::arg("eps"), py::arg("r"), py::arg("r_star"),
     py::arg("relax") = 1.0);

  m.def("graph_stats", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
                          double r, const py::object& p) {
    const GeometricGraph g = build_graph(points_from(points), r, metric_from(p));
    py::dict out;
    out["vertices"] = g.size();
    out["edges"] = g.edge_count();
    return out;
  }, py::arg("points"), py::arg("r"), py::arg("p") = py::none());

  m.def("embed", &embed_py, py::arg("points"), py::arg("tree"), py::arg("height") = 0,
        py::arg("eps") = 0.5, py::arg("mode") = "practical", py::arg("relax") = 4.0,
        py::arg("p") = py::none(),
        "Embed a balanced tree (int s with height, or a list of degrees) into G(points, r).");

  m.def("verify", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
                     const py::object& tree, int height, const std::vector<VertexId>& embedding,
                     double r, const py::object& p) {
    const VerifyResult v = verify_embedding(BalancedTree(sequence_from(tree, height)),
                                            points_from(points), embedding, r, metric_from(p));
    return py::make_tuple(v.pass, v.max_edge, v.reason);
  }, py::arg("points"), py::arg("tree"), py::arg("height"), py::arg("embedding"), py::arg("r"),
     py::arg("p") = py::none());

  m.def("diameter_witness", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
                               double r, int h, const py::object& p) {
    const WitnessResult w = diameter_witness(points_from(points), r, h, metric_from(p));
    py::dict out;
    out["certified"] = w.certified;
    out["u"] = w.u;
    out["v"] = w.v;
    out["distance"] = w.distance;
    out["hops"] = w.hops ? py::cast(*w.hops) : py::none();
    out["method"] = w.method;
    return out;
  }, py::arg("points"), py::arg("r"), py::arg("h"), py::arg("p") = py::none());

  m.def("contains_balanced_tree", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
                                     double r, int h) {
    return contains_balanced_tree(build_graph(points_from(points), r), h);
  }, py::arg("points"), py::arg("r"), py::arg("h"));

  m.def("star_partition", [](int a_size, int b_size, const std::vector<std::vector<int>>& adjacency,
                             int a) -> py::object {
    const auto part = star_partition(BipartiteInstance{a_size, b_size, adjacency}, a);
    if (!part) return py::none();
    return py::cast(part->stars);
  }, py::arg("a_size"), py::arg("b_size"), py::arg("adjacency"), py::arg("a"));

  m.def("sweep_csv", [](int d, const py::object& tree, int height,
                        const std::vector<double>& multipliers, int trials, std::uint64_t seed,
                        double relax, int workers) {
    SweepConfig cfg;
    cfg.d = d;
    cfg.sequence = sequence_from(tree, height);
    cfg.s_spec = py::isinstance<py::int_>(tree) ? std::to_string(tree.cast<int>()) : "seq";
    cfg.multipliers = multipliers;
    cfg.trials = trials;
    cfg.base_seed = seed;
    cfg.relax = relax;
    cfg.workers = workers;
    cfg.validate();
    std::ostringstream out;
    {
      py::gil_scoped_release release;
      write_sweep_csv(out, run_sweep(cfg));
    }
    return out.str();
  }, py::arg("d"), py::arg("tree"), py::arg("height"), py::arg("multipliers"),
     py::arg("trials") = 1, py::arg("seed") = 0, py::arg("relax") = 4.0, py::arg("workers") = 1);

  m.def("wilson_interval", [](int successes, int trials) {
    const Interval i = wilson_interval(successes, trials);
    return py::make_tuple(i.lo, i.hi);
  }, py::arg("successes"), py::arg("trials"));
}
