#include "geospan/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace geospan {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next line split on whitespace; blank lines are skipped.
  std::vector<std::string> next(const char* expecting) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    throw ParseError(line_no_ + 1, std::string("unexpected end of file, expected ") + expecting);
  }

  void expect_end() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw ParseError(line_no_, "unexpected trailing content");
      }
    }
  }

  [[nodiscard]] std::size_t line() const noexcept { return line_no_; }

  template <typename T>
  T integer(const std::string& tok, const char* what) const {
    T value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(line_no_, std::string("invalid ") + what + " '" + tok + "'");
    }
    return value;
  }

  double real(const std::string& tok, const char* what) const {
    // strtod accepts the full %.17g output, including exponents.
    char* end = nullptr;
    const double value = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty()) {
      throw ParseError(line_no_, std::string("invalid ") + what + " '" + tok + "'");
    }
    return value;
  }

  void arity(const std::vector<std::string>& tokens, std::size_t want, const char* what) const {
    if (tokens.size() != want) {
      throw ParseError(line_no_, std::string(what) + ": expected " + std::to_string(want) +
                                     " fields, found " + std::to_string(tokens.size()));
    }
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_points(std::ostream& out, const PointSet& ps) {
  out << ps.dim() << ' ' << ps.size() << '\n';
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const PointView p = ps.point(i);
    for (int a = 0; a < ps.dim(); ++a) out << (a ? " " : "") << g17(p[a]);
    out << '\n';
  }
}

PointSet read_points(std::istream& in) {
  LineReader rd(in);
  auto head = rd.next("header 'd n'");
  rd.arity(head, 2, "header");
  const int d = rd.integer<int>(head[0], "dimension");
  const auto n = rd.integer<std::size_t>(head[1], "point count");
  if (d < 1 || d > 16) throw ParseError(rd.line(), "dimension must be in 1..16");
  std::vector<double> coords;
  coords.reserve(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    auto row = rd.next("point coordinates");
    rd.arity(row, static_cast<std::size_t>(d), "point");
    for (const auto& tok : row) {
      const double x = rd.real(tok, "coordinate");
      if (!(x >= 0.0 && x <= 1.0)) throw ParseError(rd.line(), "coordinate outside [0,1]");
      coords.push_back(x);
    }
  }
  rd.expect_end();
  return PointSet(d, std::move(coords));
}

void write_sequence(std::ostream& out, const DegreeSequence& seq) {
  out << seq.height() << ' ' << seq.bound() << '\n';
  for (int s : seq.entries()) out << s << '\n';
}

DegreeSequence read_sequence(std::istream& in) {
  LineReader rd(in);
  auto head = rd.next("header 'h M'");
  rd.arity(head, 2, "header");
  const int h = rd.integer<int>(head[0], "height");
  const int bound = rd.integer<int>(head[1], "degree bound");
  if (h < 1) throw ParseError(rd.line(), "height must be >= 1");
  if (bound < 2) throw ParseError(rd.line(), "degree bound must be >= 2");
  std::vector<int> entries;
  for (int i = 0; i < h; ++i) {
    auto row = rd.next("degree entry");
    rd.arity(row, 1, "degree entry");
    const int s = rd.integer<int>(row[0], "degree");
    if (s < 2 || s > bound) {
      throw ParseError(rd.line(), "degree " + row[0] + " outside {2.." + std::to_string(bound) + "}");
    }
    entries.push_back(s);
  }
  rd.expect_end();
  return DegreeSequence(std::move(entries), bound);
}

void write_embedding(std::ostream& out, const BalancedTree& tree,
                     const std::vector<VertexId>& embedding, double r) {
  if (embedding.size() != tree.size()) {
    throw std::invalid_argument("write_embedding: embedding size differs from tree size");
  }
  out << tree.height() << ' ' << tree.size() << ' ' << g17(r) << '\n';
  std::string buf;
  for (int layer = 0; layer <= tree.height(); ++layer) {
    const std::uint64_t offset = tree.layer_offset(layer);
    for (std::uint64_t t = 0; t < tree.layer_size(layer); ++t) {
      buf.clear();
      buf += std::to_string(layer);
      buf += ' ';
      buf += std::to_string(t);
      buf += ' ';
      buf += std::to_string(embedding[offset + t]);
      buf += '\n';
      out << buf;
    }
  }
}

EmbeddingFile read_embedding(std::istream& in) {
  LineReader rd(in);
  auto head = rd.next("header 'h n r'");
  rd.arity(head, 3, "header");
  EmbeddingFile file;
  file.h = rd.integer<int>(head[0], "height");
  file.n = rd.integer<std::uint64_t>(head[1], "position count");
  file.r = rd.real(head[2], "radius");
  if (file.h < 0) throw ParseError(rd.line(), "height must be >= 0");
  if (!(file.r >= 0)) throw ParseError(rd.line(), "radius must be nonnegative");
  file.entries.reserve(file.n);
  for (std::uint64_t i = 0; i < file.n; ++i) {
    auto row = rd.next("embedding entry");
    rd.arity(row, 3, "embedding entry");
    EmbeddingEntry e;
    e.layer = rd.integer<int>(row[0], "layer");
    e.index = rd.integer<std::uint64_t>(row[1], "index");
    e.vertex = rd.integer<VertexId>(row[2], "vertex id");
    file.entries.push_back(e);
  }
  rd.expect_end();
  return file;
}

std::vector<VertexId> embedding_positions(const EmbeddingFile& file, const BalancedTree& tree) {
  if (file.h != tree.height()) {
    throw ParseError(1, "embedding height " + std::to_string(file.h) + " differs from tree height " +
                            std::to_string(tree.height()));
  }
  if (file.n != tree.size()) {
    throw ParseError(1, "embedding lists " + std::to_string(file.n) + " positions, tree has " +
                            std::to_string(tree.size()));
  }
  constexpr VertexId kHole = std::numeric_limits<VertexId>::max();
  std::vector<VertexId> out(tree.size(), kHole);
  std::vector<bool> seen(tree.size(), false);
  for (std::size_t i = 0; i < file.entries.size(); ++i) {
    const EmbeddingEntry& e = file.entries[i];
    const TreeVertex v{e.layer, e.index};
    if (!tree.valid(v)) throw ParseError(i + 2, "tree vertex outside the tree");
    const std::uint64_t pos = tree.position(v);
    if (seen[pos]) throw ParseError(i + 2, "tree vertex listed twice");
    seen[pos] = true;
    out[pos] = e.vertex;
  }
  return out;
}

}  // namespace geospan
