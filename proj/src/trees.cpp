#include "geospan/trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace geospan {

DegreeSequence::DegreeSequence(std::vector<int> entries, int bound)
    : entries_(std::move(entries)), bound_(bound) {
  if (bound_ < 2) throw std::invalid_argument("degree bound M must be >= 2");
  if (entries_.empty()) throw std::invalid_argument("degree sequence must have h >= 1");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i] < 2 || entries_[i] > bound_) {
      throw std::invalid_argument("s_" + std::to_string(i + 1) + " = " +
                                  std::to_string(entries_[i]) + " outside {2..." +
                                  std::to_string(bound_) + "}");
    }
  }
}

DegreeSequence DegreeSequence::uniform(int s, int height) {
  if (height < 1) throw std::invalid_argument("height must be >= 1");
  return DegreeSequence(std::vector<int>(static_cast<std::size_t>(height), s), s);
}

bool DegreeSequence::is_uniform() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [&](int s) { return s == entries_.front(); });
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw std::overflow_error("balanced tree size exceeds the 64-bit range");
  }
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) {
    throw std::overflow_error("balanced tree size exceeds the 64-bit range");
  }
  return a + b;
}

}  // namespace

BalancedTree::BalancedTree(DegreeSequence seq) : seq_(std::move(seq)) {
  const int h = seq_.height();
  layer_sizes_.resize(static_cast<std::size_t>(h) + 1);
  prefix_totals_.resize(static_cast<std::size_t>(h) + 1);
  layer_sizes_[0] = 1;
  prefix_totals_[0] = 1;
  for (int i = 1; i <= h; ++i) {
    layer_sizes_[i] = checked_mul(layer_sizes_[i - 1], static_cast<std::uint64_t>(seq_.at(i)));
    prefix_totals_[i] = checked_add(prefix_totals_[i - 1], layer_sizes_[i]);
  }
}

bool BalancedTree::valid(TreeVertex v) const noexcept {
  return v.layer >= 0 && v.layer <= height() && v.index < layer_sizes_[static_cast<std::size_t>(v.layer)];
}

TreeVertex BalancedTree::parent(TreeVertex v) const {
  if (!valid(v)) throw std::out_of_range("parent: invalid tree vertex");
  if (v.layer == 0) throw std::invalid_argument("parent: the root has no parent");
  return {v.layer - 1, v.index / static_cast<std::uint64_t>(seq_.at(v.layer))};
}

ChildRange BalancedTree::children(TreeVertex v) const {
  if (!valid(v)) throw std::out_of_range("children: invalid tree vertex");
  if (v.layer == height()) return {v.layer + 1, 0, 0};
  const auto s = static_cast<std::uint64_t>(seq_.at(v.layer + 1));
  return {v.layer + 1, v.index * s, s};
}

std::uint64_t BalancedTree::position(TreeVertex v) const {
  if (!valid(v)) throw std::out_of_range("position: invalid tree vertex");
  return layer_offset(v.layer) + v.index;
}

TreeVertex BalancedTree::vertex_at(std::uint64_t position) const {
  if (position >= size()) throw std::out_of_range("vertex_at: position out of range");
  const auto it = std::upper_bound(prefix_totals_.begin(), prefix_totals_.end(), position);
  const int layer = static_cast<int>(it - prefix_totals_.begin());
  return {layer, position - layer_offset(layer)};
}

std::uint64_t tree_size(const DegreeSequence& seq) {
  std::uint64_t layer = 1;
  std::uint64_t total = 1;
  for (int s : seq.entries()) {
    layer = checked_mul(layer, static_cast<std::uint64_t>(s));
    total = checked_add(total, layer);
  }
  return total;
}

double log_tree_size(const DegreeSequence& seq) {
  // log N_h = log L_h + log(1 + 1/s_h + 1/(s_h s_{h-1}) + ...), evaluated
  // from the leaves up so nothing overflows.
  double log_layer = 0.0;
  for (int s : seq.entries()) log_layer += std::log(static_cast<double>(s));
  double tail = 1.0;
  double ratio = 1.0;
  for (int i = seq.height(); i >= 1; --i) {
    ratio /= static_cast<double>(seq.at(i));
    tail += ratio;
    if (ratio < 1e-18) break;
  }
  return log_layer + std::log(tail);
}

BaseSelection select_s(const DegreeSequence& seq, int d, int k2) {
  const std::int64_t m_prime = static_cast<std::int64_t>(d) * k2 * seq.bound();
  if (m_prime > seq.height()) {
    throw std::invalid_argument("select_s: m' = d*k2*M = " + std::to_string(m_prime) +
                                " exceeds h = " + std::to_string(seq.height()));
  }
  std::vector<int> count(static_cast<std::size_t>(seq.bound()) + 1, 0);
  for (int i = 1; i <= m_prime; ++i) ++count[static_cast<std::size_t>(seq.at(i))];
  for (int s = 2; s <= seq.bound(); ++s) {
    if (count[static_cast<std::size_t>(s)] >= static_cast<std::int64_t>(d) * k2) {
      return {s, static_cast<int>(m_prime)};
    }
  }
  // Unreachable by pigeonhole: M-1 values share d*k2*M slots.
  throw std::logic_error("select_s: pigeonhole violated");
}

BaseSelection select_s_shortest_prefix(const DegreeSequence& seq, int d,
                                       const std::vector<int>& k_of_s) {
  std::vector<int> count(static_cast<std::size_t>(seq.bound()) + 1, 0);
  for (int m = 1; m <= seq.height(); ++m) {
    ++count[static_cast<std::size_t>(seq.at(m))];
    for (int s = 2; s <= seq.bound(); ++s) {
      const auto idx = static_cast<std::size_t>(s);
      if (idx < k_of_s.size() && count[idx] >= static_cast<std::int64_t>(d) * k_of_s[idx]) {
        return {s, m};
      }
    }
  }
  return {0, 0};
}

int height_from_order(std::uint64_t n, int s) {
  if (n == 0) throw std::invalid_argument("height_from_order: n must be >= 1");
  if (s < 2) throw std::invalid_argument("height_from_order: s must be >= 2");
  int h = 0;
  std::uint64_t total = 1;  // sum_{i<=h} s^i
  std::uint64_t layer = 1;
  while (total < n) {
    layer *= static_cast<std::uint64_t>(s);
    total += layer;
    ++h;
  }
  return h;
}

double tsh_threshold(double n, int s, int d) {
  if (s < 3) throw std::invalid_argument("tsh_threshold: s must be >= 3");
  if (!(n >= 2)) throw std::invalid_argument("tsh_threshold: n must be >= 2");
  return std::sqrt(static_cast<double>(d)) * std::log(static_cast<double>(s - 1)) /
         (2.0 * std::log(n));
}

}  // namespace geospan
