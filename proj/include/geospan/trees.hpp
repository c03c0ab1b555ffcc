#pragma once

#include <cstdint>
#include <vector>

namespace geospan {

/// Degree sequence (s_1, ..., s_h) of a balanced M-tree: every vertex in
/// layer i-1 has exactly s_i children.
class DegreeSequence {
 public:
  DegreeSequence(std::vector<int> entries, int bound);

  static DegreeSequence uniform(int s, int height);

  [[nodiscard]] int height() const noexcept { return static_cast<int>(entries_.size()); }
  [[nodiscard]] int bound() const noexcept { return bound_; }
  /// s_i for 1 <= i <= h.
  [[nodiscard]] int at(int i) const { return entries_.at(static_cast<std::size_t>(i - 1)); }
  [[nodiscard]] const std::vector<int>& entries() const noexcept { return entries_; }
  [[nodiscard]] bool is_uniform() const noexcept;

  friend bool operator==(const DegreeSequence&, const DegreeSequence&) = default;

 private:
  std::vector<int> entries_;
  int bound_;
};

struct TreeVertex {
  int layer = 0;
  std::uint64_t index = 0;

  friend bool operator==(const TreeVertex&, const TreeVertex&) = default;
};

/// Contiguous children range of a vertex: layer, first index, count.
struct ChildRange {
  int layer = 0;
  std::uint64_t first = 0;
  std::uint64_t count = 0;
};

/// Implicit balanced tree. Vertices are (layer, index) pairs; positions
/// number them layer by layer, left to right, root = position 0.
class BalancedTree {
 public:
  explicit BalancedTree(DegreeSequence seq);

  [[nodiscard]] const DegreeSequence& sequence() const noexcept { return seq_; }
  [[nodiscard]] int height() const noexcept { return seq_.height(); }
  [[nodiscard]] std::uint64_t size() const noexcept { return prefix_totals_.back(); }
  /// L_i = prod_{j<=i} s_j.
  [[nodiscard]] std::uint64_t layer_size(int i) const { return layer_sizes_.at(static_cast<std::size_t>(i)); }
  /// N_i = sum_{j<=i} L_j.
  [[nodiscard]] std::uint64_t prefix_total(int i) const { return prefix_totals_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] std::uint64_t layer_offset(int i) const { return i == 0 ? 0 : prefix_totals_[static_cast<std::size_t>(i - 1)]; }

  [[nodiscard]] bool valid(TreeVertex v) const noexcept;
  [[nodiscard]] TreeVertex parent(TreeVertex v) const;
  [[nodiscard]] ChildRange children(TreeVertex v) const;
  [[nodiscard]] std::uint64_t position(TreeVertex v) const;
  [[nodiscard]] TreeVertex vertex_at(std::uint64_t position) const;
  [[nodiscard]] std::uint64_t edge_count() const noexcept { return size() - 1; }

 private:
  DegreeSequence seq_;
  std::vector<std::uint64_t> layer_sizes_;
  std::vector<std::uint64_t> prefix_totals_;
};

/// N_h; throws std::overflow_error when it exceeds uint64.
std::uint64_t tree_size(const DegreeSequence& seq);

/// Natural log of N_h, usable when N_h overflows.
double log_tree_size(const DegreeSequence& seq);

struct BaseSelection {
  int s = 0;
  int m_prime = 0;
};

/// Smallest value in {2..M} occurring >= d*k2 times among the first
/// m' = d*k2*M entries. Throws when m' > h.
BaseSelection select_s(const DegreeSequence& seq, int d, int k2);

/// Practical variant: the shortest prefix in which some s occurs at least
/// d*k_of_s[s] times; ties go to the smallest s. k_of_s is indexed by s.
/// Returns s = 0 when no prefix of the sequence qualifies.
BaseSelection select_s_shortest_prefix(const DegreeSequence& seq, int d,
                                       const std::vector<int>& k_of_s);

/// The unique h with sum_{i<h} s^i < n <= sum_{i<=h} s^i.
int height_from_order(std::uint64_t n, int s);

/// sqrt(d) log(s-1) / (2 log n).
double tsh_threshold(double n, int s, int d);

}  // namespace geospan
