#include "geospan/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace geospan {

void ExplicitTree::validate() const {
  const int n = static_cast<int>(parent.size());
  if (n == 0) throw std::invalid_argument("tree must have at least one vertex");
  if (parent[0] != -1) throw std::invalid_argument("vertex 0 must be the root");
  for (int v = 1; v < n; ++v) {
    if (parent[v] < 0 || parent[v] >= n || parent[v] == v) {
      throw std::invalid_argument("bad parent for vertex " + std::to_string(v));
    }
  }
  // Every vertex must reach the root within n steps.
  std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 unknown, 1 on stack, 2 rooted
  state[0] = 2;
  for (int v = 1; v < n; ++v) {
    std::vector<int> trail;
    int u = v;
    while (state[u] == 0) {
      state[u] = 1;
      trail.push_back(u);
      u = parent[u];
    }
    if (state[u] == 1) throw std::invalid_argument("parent array contains a cycle");
    for (int w : trail) state[w] = 2;
  }
}

ExplicitTree ExplicitTree::from_balanced(const BalancedTree& tree) {
  ExplicitTree out;
  out.parent.assign(tree.size(), -1);
  for (int layer = 1; layer <= tree.height(); ++layer) {
    const auto deg = static_cast<std::uint64_t>(tree.sequence().at(layer));
    for (std::uint64_t t = 0; t < tree.layer_size(layer); ++t) {
      out.parent[tree.layer_offset(layer) + t] =
          static_cast<int>(tree.layer_offset(layer - 1) + t / deg);
    }
  }
  return out;
}

namespace {

using Mask = std::uint32_t;

struct Search {
  int n = 0;
  std::vector<Mask> adj;          // graph adjacency bitmasks
  std::vector<int> graph_degree;
  std::vector<int> order;         // tree vertices, BFS order, isomorphic siblings adjacent
  std::vector<int> tparent;
  std::vector<int> tree_degree;
  std::vector<int> twin_before;   // previous sibling with the same shape, or -1
  std::vector<int> image;

  bool place(std::size_t pos, Mask used) {
    if (pos == order.size()) return true;
    const int v = order[pos];
    Mask candidates = adj[static_cast<std::size_t>(image[tparent[v]])] & ~used;
    if (twin_before[v] >= 0) {
      // Images of interchangeable siblings are kept increasing.
      const int floor = image[twin_before[v]];
      candidates &= ~((Mask{2} << floor) - 1);
    }
    while (candidates != 0) {
      const int x = __builtin_ctz(candidates);
      candidates &= candidates - 1;
      if (graph_degree[x] < tree_degree[v]) continue;
      image[v] = x;
      if (place(pos + 1, used | (Mask{1} << x))) return true;
    }
    image[v] = -1;
    return false;
  }
};

}  // namespace

bool contains_spanning_tree(const GeometricGraph& g, const ExplicitTree& t) {
  if (g.size() > kOracleMaxVertices) {
    throw std::invalid_argument("contains_spanning_tree: graph has " + std::to_string(g.size()) +
                                " vertices, limit is " + std::to_string(kOracleMaxVertices));
  }
  t.validate();
  if (g.size() != t.size()) return false;
  const int n = static_cast<int>(t.size());
  if (n == 1) return true;

  Search s;
  s.n = n;
  s.adj.assign(static_cast<std::size_t>(n), 0);
  s.graph_degree.assign(static_cast<std::size_t>(n), 0);
  for (int u = 0; u < n; ++u) {
    for (VertexId v : g.neighbors(static_cast<VertexId>(u))) s.adj[u] |= Mask{1} << v;
    s.graph_degree[u] = __builtin_popcount(s.adj[u]);
  }

  std::vector<std::vector<int>> kids(static_cast<std::size_t>(n));
  for (int v = 1; v < n; ++v) kids[t.parent[v]].push_back(v);
  s.tparent = t.parent;
  s.tree_degree.assign(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) s.tree_degree[v] = static_cast<int>(kids[v].size()) + (v == 0 ? 0 : 1);

  // Canonical subtree shapes, children first.
  std::vector<int> bfs{0};
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    for (int c : kids[bfs[i]]) bfs.push_back(c);
  }
  std::map<std::vector<int>, int> shape_ids;
  std::vector<int> shape(static_cast<std::size_t>(n), 0);
  for (auto it = bfs.rbegin(); it != bfs.rend(); ++it) {
    std::vector<int> key;
    for (int c : kids[*it]) key.push_back(shape[c]);
    std::sort(key.begin(), key.end());
    shape[*it] = shape_ids.emplace(std::move(key), static_cast<int>(shape_ids.size())).first->second;
  }
  s.twin_before.assign(static_cast<std::size_t>(n), -1);
  s.order.push_back(0);
  for (std::size_t i = 0; i < s.order.size(); ++i) {
    std::vector<int> ch = kids[s.order[i]];
    std::stable_sort(ch.begin(), ch.end(), [&](int a, int b) { return shape[a] < shape[b]; });
    for (std::size_t j = 0; j < ch.size(); ++j) {
      if (j > 0 && shape[ch[j]] == shape[ch[j - 1]]) s.twin_before[ch[j]] = ch[j - 1];
      s.order.push_back(ch[j]);
    }
  }

  s.image.assign(static_cast<std::size_t>(n), -1);
  for (int root = 0; root < n; ++root) {
    if (s.graph_degree[root] < s.tree_degree[0]) continue;
    s.image[0] = root;
    if (s.place(1, Mask{1} << root)) return true;
  }
  return false;
}

std::vector<DegreeSequence> balanced_sequences(std::size_t n, int h) {
  std::vector<DegreeSequence> out;
  if (h < 1) return out;
  std::vector<int> cur;
  std::function<void(std::uint64_t, std::uint64_t)> extend = [&](std::uint64_t layer,
                                                                  std::uint64_t total) {
    if (static_cast<int>(cur.size()) == h) {
      if (total == n) {
        const int bound = *std::max_element(cur.begin(), cur.end());
        out.emplace_back(cur, bound);
      }
      return;
    }
    for (int s = 2;; ++s) {
      // Remaining layers each add at least twice the previous one.
      std::uint64_t next = layer * static_cast<std::uint64_t>(s);
      std::uint64_t lowest = total;
      std::uint64_t l = next;
      for (int i = static_cast<int>(cur.size()); i < h; ++i) {
        lowest += l;
        l *= 2;
        if (lowest > n) break;
      }
      if (lowest > n) break;
      cur.push_back(s);
      extend(next, total + next);
      cur.pop_back();
    }
  };
  extend(1, 1);
  return out;
}

bool contains_balanced_tree(const GeometricGraph& g, int h) {
  for (const DegreeSequence& seq : balanced_sequences(g.size(), h)) {
    if (contains_spanning_tree(g, ExplicitTree::from_balanced(BalancedTree(seq)))) return true;
  }
  return false;
}

int smallest_k_scan(int s, int d, double eps, double r, double r_star, double relax, Metric metric) {
  if (s < 2 || d < 1) throw std::invalid_argument("smallest_k_scan: need s >= 2, d >= 1");
  if (!(eps > 0) || !(r > 0) || !(r_star > 0) || !(relax > 0)) {
    throw std::invalid_argument("smallest_k_scan: eps, r, r_star and relax must be positive");
  }
  const double factor = metric.dim_factor(d);
  // side = s^{1-k}, advanced by division.
  double side = 1.0;
  for (int k = 1; k < 100000; ++k) {
    const double finer = side / s;
    if (factor * side <= r && factor * finer < relax * eps * r_star / 8.0) return k;
    side = finer;
  }
  throw std::logic_error("smallest_k_scan: no k found");
}

}  // namespace geospan
