#include "geospan/matching.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace geospan {

namespace {

// Dinic max flow on int64 capacities. Augmentation follows edge insertion
// order, so results are reproducible for a fixed construction order.
class FlowNetwork {
 public:
  struct Edge {
    int to;
    std::int64_t cap;
  };

  explicit FlowNetwork(int n) : adj_(static_cast<std::size_t>(n)), level_(n), next_(n) {}

  int add_edge(int from, int to, std::int64_t cap) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, cap});
    edges_.push_back({from, 0});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  std::int64_t max_flow(int source, int sink) {
    std::int64_t total = 0;
    while (bfs(source, sink)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (std::int64_t pushed = dfs(source, sink, std::numeric_limits<std::int64_t>::max())) {
        total += pushed;
      }
    }
    return total;
  }

  /// Flow currently carried by forward edge id.
  [[nodiscard]] std::int64_t flow_on(int id) const { return edges_[id ^ 1].cap; }

 private:
  bool bfs(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> queue{source};
    level_[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int id : adj_[v]) {
        const Edge& e = edges_[id];
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          queue.push_back(e.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  std::int64_t dfs(int v, int sink, std::int64_t limit) {
    if (v == sink) return limit;
    for (int& i = next_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
      const int id = adj_[v][i];
      Edge& e = edges_[id];
      if (e.cap <= 0 || level_[e.to] != level_[v] + 1) continue;
      if (std::int64_t pushed = dfs(e.to, sink, std::min(limit, e.cap)); pushed > 0) {
        e.cap -= pushed;
        edges_[id ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_;
  std::vector<int> next_;
};

void check_sizes(const BipartiteInstance& inst, int a) {
  inst.validate();
  if (a < 1) throw std::invalid_argument("star size a must be >= 1");
  if (static_cast<std::int64_t>(a) * inst.a_size != inst.b_size) {
    throw std::invalid_argument("star partition requires a*|A| = |B|");
  }
}

struct StarFlow {
  std::int64_t value = 0;
  std::optional<StarPartition> partition;
};

StarFlow run_star_flow(const BipartiteInstance& inst, int a) {
  const int source = 0;
  const int sink = 1;
  const int a_base = 2;
  const int b_base = 2 + inst.a_size;
  FlowNetwork net(b_base + inst.b_size);
  for (int u = 0; u < inst.a_size; ++u) net.add_edge(source, a_base + u, a);
  std::vector<std::vector<int>> edge_ids(static_cast<std::size_t>(inst.a_size));
  for (int u = 0; u < inst.a_size; ++u) {
    for (int b : inst.adjacency[u]) edge_ids[u].push_back(net.add_edge(a_base + u, b_base + b, 1));
  }
  for (int b = 0; b < inst.b_size; ++b) net.add_edge(b_base + b, sink, 1);
  StarFlow out;
  out.value = net.max_flow(source, sink);
  if (out.value != inst.b_size) return out;
  StarPartition part;
  part.stars.resize(static_cast<std::size_t>(inst.a_size));
  for (int u = 0; u < inst.a_size; ++u) {
    for (std::size_t j = 0; j < inst.adjacency[u].size(); ++j) {
      if (net.flow_on(edge_ids[u][j]) > 0) part.stars[u].push_back(inst.adjacency[u][j]);
    }
  }
  out.partition = std::move(part);
  return out;
}

}  // namespace

void BipartiteInstance::validate() const {
  if (a_size < 0 || b_size < 0) throw std::invalid_argument("negative part size");
  if (adjacency.size() != static_cast<std::size_t>(a_size)) {
    throw std::invalid_argument("adjacency must have one list per A-vertex");
  }
  for (const auto& list : adjacency) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] < 0 || list[i] >= b_size) throw std::invalid_argument("B-neighbor id out of range");
      if (i > 0 && list[i] <= list[i - 1]) {
        throw std::invalid_argument("B-neighbor lists must be sorted without duplicates");
      }
    }
  }
}

std::optional<StarPartition> star_partition(const BipartiteInstance& inst, int a) {
  check_sizes(inst, a);
  return run_star_flow(inst, a).partition;
}

std::int64_t star_flow_value(const BipartiteInstance& inst, int a) {
  inst.validate();
  if (a < 1) throw std::invalid_argument("star size a must be >= 1");
  return run_star_flow(inst, a).value;
}

std::optional<StarPartition> star_partition_by_duplication(const BipartiteInstance& inst, int a) {
  check_sizes(inst, a);
  // Copy u_i of u for i in [0,a) is left vertex u*a + i, adjacent to N(u).
  const int left = inst.a_size * a;
  std::vector<int> match_of_b(static_cast<std::size_t>(inst.b_size), -1);
  std::vector<int> visited(static_cast<std::size_t>(inst.b_size), -1);

  auto augment = [&](auto& self, int x, int stamp) -> bool {
    for (int b : inst.adjacency[static_cast<std::size_t>(x / a)]) {
      if (visited[b] == stamp) continue;
      visited[b] = stamp;
      if (match_of_b[b] < 0 || self(self, match_of_b[b], stamp)) {
        match_of_b[b] = x;
        return true;
      }
    }
    return false;
  };
  for (int x = 0; x < left; ++x) {
    if (!augment(augment, x, x)) return std::nullopt;
  }
  StarPartition part;
  part.stars.resize(static_cast<std::size_t>(inst.a_size));
  for (int b = 0; b < inst.b_size; ++b) part.stars[match_of_b[b] / a].push_back(b);
  return part;
}

HallResult hall_check_exhaustive(const BipartiteInstance& inst, int a) {
  inst.validate();
  if (inst.a_size > 24) throw std::invalid_argument("hall_check_exhaustive: |A| must be <= 24");
  std::vector<std::vector<std::uint64_t>> masks(static_cast<std::size_t>(inst.a_size));
  const std::size_t words = (static_cast<std::size_t>(inst.b_size) + 63) / 64;
  for (int u = 0; u < inst.a_size; ++u) {
    masks[u].assign(words, 0);
    for (int b : inst.adjacency[u]) masks[u][b / 64] |= std::uint64_t{1} << (b % 64);
  }
  std::vector<std::uint64_t> acc(words);
  const std::uint32_t subsets = std::uint32_t{1} << inst.a_size;
  for (std::uint32_t set = 1; set < subsets; ++set) {
    std::fill(acc.begin(), acc.end(), 0);
    int members = 0;
    for (int u = 0; u < inst.a_size; ++u) {
      if (set >> u & 1u) {
        ++members;
        for (std::size_t w = 0; w < words; ++w) acc[w] |= masks[u][w];
      }
    }
    std::int64_t reach = 0;
    for (std::uint64_t w : acc) reach += __builtin_popcountll(w);
    if (reach < static_cast<std::int64_t>(a) * members) {
      HallResult out{false, {}};
      for (int u = 0; u < inst.a_size; ++u) {
        if (set >> u & 1u) out.violating.push_back(u);
      }
      return out;
    }
  }
  return {};
}

std::string validate_star_partition(const BipartiteInstance& inst, int a,
                                    const StarPartition& partition) {
  if (partition.stars.size() != static_cast<std::size_t>(inst.a_size)) return "wrong number of stars";
  std::vector<int> owner(static_cast<std::size_t>(inst.b_size), -1);
  for (int u = 0; u < inst.a_size; ++u) {
    const auto& star = partition.stars[u];
    if (star.size() != static_cast<std::size_t>(a)) {
      return "star " + std::to_string(u) + " has " + std::to_string(star.size()) + " leaves";
    }
    for (int b : star) {
      if (b < 0 || b >= inst.b_size) return "leaf id out of range";
      if (owner[b] >= 0) return "B-vertex " + std::to_string(b) + " used twice";
      owner[b] = u;
      if (!std::binary_search(inst.adjacency[u].begin(), inst.adjacency[u].end(), b)) {
        return "leaf " + std::to_string(b) + " not adjacent to center " + std::to_string(u);
      }
    }
  }
  for (int b = 0; b < inst.b_size; ++b) {
    if (owner[b] < 0) return "B-vertex " + std::to_string(b) + " uncovered";
  }
  return {};
}

std::optional<GroupedStarPartition> star_partition_grouped(const GroupedInstance& inst,
                                                           std::int64_t a) {
  if (a < 0) throw std::invalid_argument("star size must be nonnegative");
  if (inst.adjacency.size() != static_cast<std::size_t>(inst.a_size)) {
    throw std::invalid_argument("adjacency must have one list per A-vertex");
  }
  const int groups = static_cast<int>(inst.capacity.size());
  std::int64_t total = 0;
  for (std::int64_t c : inst.capacity) {
    if (c < 0) throw std::invalid_argument("negative group capacity");
    total += c;
  }
  if (a * inst.a_size != total) {
    throw std::invalid_argument("grouped star partition requires a*|A| = |B|");
  }
  const int source = 0;
  const int sink = 1;
  const int a_base = 2;
  const int g_base = 2 + inst.a_size;
  FlowNetwork net(g_base + groups);
  for (int u = 0; u < inst.a_size; ++u) net.add_edge(source, a_base + u, a);
  std::vector<std::vector<int>> edge_ids(static_cast<std::size_t>(inst.a_size));
  for (int u = 0; u < inst.a_size; ++u) {
    for (int g : inst.adjacency[u]) {
      if (g < 0 || g >= groups) throw std::invalid_argument("group id out of range");
      edge_ids[u].push_back(net.add_edge(a_base + u, g_base + g, a));
    }
  }
  for (int g = 0; g < groups; ++g) net.add_edge(g_base + g, sink, inst.capacity[g]);
  if (net.max_flow(source, sink) != total) return std::nullopt;
  GroupedStarPartition out;
  out.flow.resize(static_cast<std::size_t>(inst.a_size));
  for (int u = 0; u < inst.a_size; ++u) {
    for (std::size_t j = 0; j < inst.adjacency[u].size(); ++j) {
      if (const std::int64_t f = net.flow_on(edge_ids[u][j]); f > 0) {
        out.flow[u].emplace_back(inst.adjacency[u][j], f);
      }
    }
  }
  return out;
}

}  // namespace geospan
