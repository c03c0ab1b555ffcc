#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "geospan/pointcloud.hpp"
#include "geospan/trees.hpp"

namespace geospan {

/// Malformed input; line() is 1-based, 0 when the file ended early.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// "d n", then n lines of d coordinates with 17 significant digits.
void write_points(std::ostream& out, const PointSet& ps);
PointSet read_points(std::istream& in);

/// "h M", then s_1..s_h one per line.
void write_sequence(std::ostream& out, const DegreeSequence& seq);
DegreeSequence read_sequence(std::istream& in);

struct EmbeddingEntry {
  int layer = 0;
  std::uint64_t index = 0;
  VertexId vertex = 0;
};

struct EmbeddingFile {
  int h = 0;
  std::uint64_t n = 0;  // tree positions
  double r = 0.0;
  std::vector<EmbeddingEntry> entries;
};

/// "h n r", then one "layer index vertex" line per tree position.
void write_embedding(std::ostream& out, const BalancedTree& tree,
                     const std::vector<VertexId>& embedding, double r);
EmbeddingFile read_embedding(std::istream& in);

/// Position -> vertex map of the file for the given tree. Throws ParseError
/// when entries are missing, repeated, or outside the tree.
std::vector<VertexId> embedding_positions(const EmbeddingFile& file, const BalancedTree& tree);

}  // namespace geospan
