#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "geospan/trees.hpp"

using namespace geospan;

TEST_CASE("degree sequence validation") {
  CHECK_THROWS_AS(DegreeSequence({2, 1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(DegreeSequence({2, 4}, 3), std::invalid_argument);
  CHECK_THROWS_AS(DegreeSequence({}, 3), std::invalid_argument);
  CHECK_THROWS_AS(DegreeSequence({2}, 1), std::invalid_argument);
  CHECK(DegreeSequence::uniform(3, 4).is_uniform());
  CHECK_FALSE(DegreeSequence({2, 3}, 3).is_uniform());
}

TEST_CASE("tree_size examples") {
  CHECK(tree_size(DegreeSequence::uniform(3, 2)) == 13);
  for (int h = 1; h <= 40; ++h) {
    CHECK(tree_size(DegreeSequence::uniform(2, h)) == (std::uint64_t{1} << (h + 1)) - 1);
  }
  CHECK(tree_size(DegreeSequence({2, 3}, 3)) == 9);
  CHECK_THROWS_AS(tree_size(DegreeSequence::uniform(2, 64)), std::overflow_error);
  CHECK_THROWS_AS(BalancedTree(DegreeSequence::uniform(2, 64)), std::overflow_error);
}

TEST_CASE("log_tree_size matches the exact size and survives overflow") {
  const DegreeSequence seq({2, 3, 5, 2, 4}, 5);
  CHECK(log_tree_size(seq) == doctest::Approx(std::log(static_cast<double>(tree_size(seq)))));
  const double big = log_tree_size(DegreeSequence::uniform(2, 6000));
  CHECK(big == doctest::Approx(6001 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("parent and children arithmetic") {
  const BalancedTree t(DegreeSequence({2, 3}, 3));
  CHECK(t.parent({2, 4}) == TreeVertex{1, 1});
  const ChildRange root_kids = t.children({0, 0});
  CHECK(root_kids.layer == 1);
  CHECK(root_kids.first == 0);
  CHECK(root_kids.count == 2);
  CHECK_THROWS_AS(static_cast<void>(t.parent({0, 0})), std::invalid_argument);
  CHECK(t.children({2, 5}).count == 0);
  CHECK_THROWS_AS(static_cast<void>(t.children({2, 6})), std::out_of_range);
}

TEST_CASE("child/parent round trip over every vertex of a (2,3,2) tree") {
  const BalancedTree t(DegreeSequence({2, 3, 2}, 3));
  REQUIRE(t.size() == 1 + 2 + 6 + 12);
  std::uint64_t edges = 0;
  std::uint64_t seen = 0;
  for (int layer = 0; layer <= t.height(); ++layer) {
    for (std::uint64_t i = 0; i < t.layer_size(layer); ++i) {
      const TreeVertex v{layer, i};
      CHECK(t.vertex_at(t.position(v)) == v);
      CHECK(t.position(v) == seen++);
      const ChildRange kids = t.children(v);
      for (std::uint64_t c = kids.first; c < kids.first + kids.count; ++c) {
        CHECK(t.parent({kids.layer, c}) == v);
        ++edges;
      }
    }
  }
  CHECK(edges == t.edge_count());
}

TEST_CASE("layer sizes on random sequences") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = 1 + static_cast<int>(rng() % 12);
    const int bound = 2 + static_cast<int>(rng() % 4);
    std::vector<int> e;
    for (int i = 0; i < h; ++i) e.push_back(2 + static_cast<int>(rng() % (bound - 1)));
    const BalancedTree t(DegreeSequence(e, bound));
    std::uint64_t total = 0;
    for (int i = 0; i <= h; ++i) {
      if (i > 0) CHECK(t.layer_size(i) == t.layer_size(i - 1) * e[i - 1]);
      total += t.layer_size(i);
      CHECK(t.prefix_total(i) == total);
    }
    CHECK(total == t.size());
    CHECK(h <= std::log2(static_cast<double>(t.size()) + 1));
  }
}

TEST_CASE("select_s examples") {
  const DegreeSequence mixed({2, 3, 3, 2, 3, 2, 2}, 3);
  const BaseSelection a = select_s(mixed, 1, 2);
  CHECK(a.s == 2);
  CHECK(a.m_prime == 6);
  CHECK(select_s(DegreeSequence::uniform(4, 40), 2, 3).s == 4);
  // d = 2, k2 = 3, M = 3: m' = 18, five 2s and thirteen 3s; only 3 reaches 6.
  std::vector<int> e = {2, 3, 2, 3, 2, 3, 2, 3, 2};
  e.resize(18, 3);
  const BaseSelection b = select_s(DegreeSequence(e, 3), 2, 3);
  CHECK(b.s == 3);
  CHECK(b.m_prime == 18);
  CHECK_THROWS_AS(select_s(DegreeSequence::uniform(2, 5), 1, 3), std::invalid_argument);
}

TEST_CASE("selected base power divides L_m' for every k <= k2") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const int k2 = 1 + static_cast<int>(rng() % 3);
    const int bound = 2 + static_cast<int>(rng() % 3);
    const int h = d * k2 * bound + static_cast<int>(rng() % 3);
    std::vector<int> e;
    for (int i = 0; i < h; ++i) e.push_back(2 + static_cast<int>(rng() % (bound - 1)));
    const DegreeSequence seq(e, bound);
    const BaseSelection sel = select_s(seq, d, k2);
    int count = 0;
    for (int i = 0; i < sel.m_prime; ++i) count += e[i] == sel.s ? 1 : 0;
    CHECK(count >= d * k2);
    for (int s = 2; s < sel.s; ++s) {
      int c = 0;
      for (int i = 0; i < sel.m_prime; ++i) c += e[i] == s ? 1 : 0;
      CHECK(c < d * k2);
    }
    // s^{dk} | prod s_i, checked by repeated division of the (small) product.
    long double prod = 1;
    for (int i = 0; i < sel.m_prime; ++i) prod *= e[i];
    for (int k = 1; k <= k2; ++k) {
      long double q = prod;
      for (int j = 0; j < d * k; ++j) q /= sel.s;
      CHECK(std::fabs(q - std::round(q)) < 1e-6L);
    }
  }
}

TEST_CASE("shortest-prefix selection") {
  const DegreeSequence seq({3, 2, 3, 2, 2, 3}, 3);
  std::vector<int> k_of_s = {0, 0, 3, 2};
  const BaseSelection sel = select_s_shortest_prefix(seq, 1, k_of_s);
  CHECK(sel.s == 3);
  CHECK(sel.m_prime == 3);
  CHECK(select_s_shortest_prefix(DegreeSequence::uniform(2, 3), 2, {0, 0, 2}).s == 0);
  CHECK(select_s_shortest_prefix(DegreeSequence::uniform(2, 8), 2, {0, 0, 4}).m_prime == 8);
}

TEST_CASE("height_from_order") {
  CHECK(height_from_order(15, 2) == 3);
  CHECK(height_from_order(16, 2) == 4);
  CHECK(height_from_order(1, 3) == 0);
  for (int h = 0; h < 20; ++h) {
    const std::uint64_t full = (std::uint64_t{1} << (h + 1)) - 1;
    CHECK(height_from_order(full, 2) == h);
    CHECK(height_from_order(full + 1, 2) == h + 1);
  }
}

TEST_CASE("tsh_threshold") {
  CHECK(tsh_threshold(std::exp(2.0), 3, 1) == doctest::Approx(std::log(2.0) / 4));
  CHECK(tsh_threshold(1e6, 3, 2) == doctest::Approx(std::sqrt(2.0) * tsh_threshold(1e6, 3, 1)));
  CHECK(tsh_threshold(1e6, 4, 4) == doctest::Approx(0.0795).epsilon(1e-3));
  CHECK_THROWS_AS(tsh_threshold(100, 2, 1), std::invalid_argument);
}
