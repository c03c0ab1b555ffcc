#include <doctest.h>

#include <stdexcept>

#include <sstream>

#include "geospan/io.hpp"

using namespace geospan;

namespace {

std::size_t error_line(const std::string& text, auto reader) {
  std::istringstream in(text);
  try {
    reader(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("points round trip exactly") {
  const PointSet ps = sample_uniform(50, 3, 4);
  std::stringstream buf;
  write_points(buf, ps);
  const PointSet back = read_points(buf);
  CHECK(back.coords() == ps.coords());
  CHECK(back.dim() == 3);
}

TEST_CASE("malformed point files report the offending line") {
  auto rd = [](std::istream& in) { read_points(in); };
  CHECK(error_line("2 2\n0.1 0.2\n0.3\n", rd) == 3);
  CHECK(error_line("2 2\n0.1 0.2\n0.3 x\n", rd) == 3);
  CHECK(error_line("2 2\n0.1 1.2\n0.3 0.4\n", rd) == 2);
  CHECK(error_line("2\n", rd) == 1);
  CHECK(error_line("1 3\n0.5\n0.5\n", rd) == 4);
  CHECK(error_line("1 1\n0.5\n0.5\n", rd) == 3);
}

TEST_CASE("sequence files") {
  const DegreeSequence seq({2, 3, 2}, 3);
  std::stringstream buf;
  write_sequence(buf, seq);
  CHECK(buf.str() == "3 3\n2\n3\n2\n");
  CHECK(read_sequence(buf) == seq);
  auto rd = [](std::istream& in) { read_sequence(in); };
  CHECK(error_line("2 2\n2\n3\n", rd) == 3);
  CHECK(error_line("2 2\n2\n", rd) == 3);
  CHECK(error_line("0 2\n", rd) == 1);
}

TEST_CASE("embedding files") {
  const BalancedTree tree(DegreeSequence::uniform(2, 2));
  const std::vector<VertexId> map = {6, 5, 4, 3, 2, 1, 0};
  std::stringstream buf;
  write_embedding(buf, tree, map, 0.25);
  CHECK(buf.str().rfind("2 7 0.25\n0 0 6\n1 0 5\n1 1 4\n2 0 3\n", 0) == 0);
  const EmbeddingFile file = read_embedding(buf);
  CHECK(file.r == 0.25);
  CHECK(embedding_positions(file, tree) == map);

  std::istringstream dup("1 3 0.5\n0 0 0\n1 0 1\n1 0 2\n");
  const EmbeddingFile bad = read_embedding(dup);
  CHECK_THROWS_AS(embedding_positions(bad, BalancedTree(DegreeSequence::uniform(2, 1))), ParseError);
  auto rd = [](std::istream& in) { read_embedding(in); };
  CHECK(error_line("1 3 0.5\n0 0 0\n1 0\n", rd) == 3);
  CHECK(error_line("1 3 -0.5\n", rd) == 1);
}
