#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sg/common.hpp"

namespace sg {

/// Address of a level-n cell: a string over {'1','2','3'}. The empty word
/// addresses the whole gasket.
class Word {
 public:
  Word() = default;
  explicit Word(std::string letters) : letters_(std::move(letters)) {
    for (char c : letters_) {
      if (c < '1' || c > '3')
        throw ContractViolation("word letter out of {1,2,3}: '" +
                                std::string(1, c) + "'");
    }
  }

  int level() const { return static_cast<int>(letters_.size()); }
  const std::string& str() const { return letters_; }
  bool empty() const { return letters_.empty(); }

  /// k-th letter as 1, 2 or 3.
  int letter(int k) const { return letters_.at(k) - '0'; }

  Word child(int i) const {
    return Word(letters_ + static_cast<char>('0' + i));
  }

  friend bool operator==(const Word& a, const Word& b) {
    return a.letters_ == b.letters_;
  }
  friend bool operator<(const Word& a, const Word& b) {
    return a.letters_ < b.letters_;
  }

 private:
  std::string letters_;
};

/// Subdivision of a cell into its three children, in letter order.
inline std::array<Word, 3> refine_cell(const Word& w) {
  return {w.child(1), w.child(2), w.child(3)};
}

/// Exact dyadic-rational barycentric coordinates of a gasket vertex:
/// the point (c1*p1 + c2*p2 + c3*p3) / 2^k with c1+c2+c3 = 2^k. Kept in
/// lowest terms so the same geometric point compares equal at every level;
/// this is what makes junction identification exact.
struct DyadicPoint {
  std::int64_t c1 = 0, c2 = 0, c3 = 0;
  int k = 0;

  static DyadicPoint corner(int i) {
    DyadicPoint p;
    (i == 1 ? p.c1 : i == 2 ? p.c2 : p.c3) = 1;
    return p;
  }

  /// Image under the contraction toward corner i: x/2 + p_i/2.
  DyadicPoint mapped_into(int i) const {
    DyadicPoint r = *this;
    const std::int64_t w = std::int64_t(1) << k;
    (i == 1 ? r.c1 : i == 2 ? r.c2 : r.c3) += w;
    r.k = k + 1;
    r.reduce();
    return r;
  }

  static DyadicPoint midpoint(const DyadicPoint& a, const DyadicPoint& b) {
    const int k = std::max(a.k, b.k);
    const std::int64_t sa = std::int64_t(1) << (k - a.k);
    const std::int64_t sb = std::int64_t(1) << (k - b.k);
    DyadicPoint r;
    r.c1 = a.c1 * sa + b.c1 * sb;
    r.c2 = a.c2 * sa + b.c2 * sb;
    r.c3 = a.c3 * sa + b.c3 * sb;
    r.k = k + 1;
    r.reduce();
    return r;
  }

  void reduce() {
    while (k > 0 && (c1 % 2 == 0) && (c2 % 2 == 0) && (c3 % 2 == 0)) {
      c1 /= 2;
      c2 /= 2;
      c3 /= 2;
      --k;
    }
  }

  /// Euclidean position with p1=(0,0), p2=(1,0), p3=(1/2, sqrt(3)/2).
  Vec2 to_euclidean() const {
    const double scale = 1.0 / static_cast<double>(std::int64_t(1) << k);
    const double x = (static_cast<double>(c2) + 0.5 * static_cast<double>(c3)) * scale;
    const double y = 0.5 * std::sqrt(3.0) * static_cast<double>(c3) * scale;
    return {x, y};
  }

  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(c1) << 42) |
           (static_cast<std::uint64_t>(c2) << 21) |
           static_cast<std::uint64_t>(c3);
  }

  friend bool operator==(const DyadicPoint& a, const DyadicPoint& b) {
    return a.k == b.k && a.c1 == b.c1 && a.c2 == b.c2 && a.c3 == b.c3;
  }
};

/// Exact corner points of cell w, images of (p1,p2,p3) under the word map.
inline std::array<DyadicPoint, 3> cell_vertex_points(const Word& w) {
  std::array<DyadicPoint, 3> pts = {DyadicPoint::corner(1),
                                    DyadicPoint::corner(2),
                                    DyadicPoint::corner(3)};
  // Innermost contraction first: the word map is phi_{w1} o ... o phi_{wn}.
  for (int k = w.level() - 1; k >= 0; --k)
    for (auto& p : pts) p = p.mapped_into(w.letter(k));
  return pts;
}

inline std::array<Vec2, 3> cell_vertex_coordinates(const Word& w) {
  const auto pts = cell_vertex_points(w);
  return {pts[0].to_euclidean(), pts[1].to_euclidean(), pts[2].to_euclidean()};
}

struct VertexRecord {
  int id;
  DyadicPoint point;
  Vec2 xy;
};

/// Oriented edge; `cell` indexes the owning cell (each edge has exactly one).
struct EdgeRecord {
  int tail;
  int head;
  int cell;
};

struct CellRecord {
  Word word;
  std::array<int, 3> v;  // corner vertex ids, images of p1,p2,p3 in order
};

/// Level-n approximating graph of the gasket. Edges are oriented
/// (v1->v2), (v2->v3), (v3->v1) within each cell, and carry conductance
/// (5/3)^n. Immutable after construction.
class LevelGraph {
 public:
  int level() const { return level_; }
  double conductance() const { return conductance_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  const std::vector<VertexRecord>& vertices() const { return vertices_; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  const std::vector<CellRecord>& cells() const { return cells_; }

  /// Ids of the boundary vertices p1, p2, p3 (present at every level).
  const std::array<int, 3>& boundary() const { return boundary_; }

  /// Id of the vertex at an exact point, or -1 if absent at this level.
  int vertex_id(const DyadicPoint& p) const {
    const auto it = index_.find(p.key());
    return it == index_.end() ? -1 : it->second;
  }

  int degree(int vid) const { return degree_[vid]; }

  friend LevelGraph build_level_graph(int level, int max_level);

 private:
  int level_ = 0;
  double conductance_ = 1.0;
  std::vector<VertexRecord> vertices_;
  std::vector<EdgeRecord> edges_;
  std::vector<CellRecord> cells_;
  std::array<int, 3> boundary_ = {-1, -1, -1};
  std::vector<int> degree_;
  std::unordered_map<std::uint64_t, int> index_;
};

/// Builds the canonical level-n graph. Cells are enumerated in lexicographic
/// word order and vertex ids are assigned in order of first appearance, so
/// ids are stable across calls.
inline LevelGraph build_level_graph(int level, int max_level = kDefaultMaxLevel) {
  if (level < 0) throw ContractViolation("negative level");
  if (level > max_level)
    throw ResourceLimitError("level " + std::to_string(level) +
                             " above configured maximum " +
                             std::to_string(max_level));

  LevelGraph g;
  g.level_ = level;
  g.conductance_ = 1.0;
  for (int i = 0; i < level; ++i) g.conductance_ *= 5.0 / 3.0;

  const int ncells = static_cast<int>(std::llround(std::pow(3.0, level)));
  g.cells_.reserve(ncells);
  g.edges_.reserve(3 * ncells);

  // Lexicographic enumeration of words of the given length.
  std::string letters(static_cast<size_t>(level), '1');
  auto intern = [&g](const DyadicPoint& p) {
    const auto it = g.index_.find(p.key());
    if (it != g.index_.end()) return it->second;
    const int id = static_cast<int>(g.vertices_.size());
    g.vertices_.push_back({id, p, p.to_euclidean()});
    g.index_.emplace(p.key(), id);
    return id;
  };

  for (int c = 0; c < ncells; ++c) {
    const Word w(letters);
    const auto pts = cell_vertex_points(w);
    CellRecord cell;
    cell.word = w;
    for (int i = 0; i < 3; ++i) cell.v[i] = intern(pts[i]);
    const int cell_index = static_cast<int>(g.cells_.size());
    for (int i = 0; i < 3; ++i)
      g.edges_.push_back({cell.v[i], cell.v[(i + 1) % 3], cell_index});
    g.cells_.push_back(cell);
    // increment the word odometer
    for (int i = level - 1; i >= 0; --i) {
      if (letters[i] < '3') {
        ++letters[i];
        break;
      }
      letters[i] = '1';
    }
  }

  for (int i = 0; i < 3; ++i) {
    g.boundary_[i] = g.vertex_id(DyadicPoint::corner(i + 1));
  }

  g.degree_.assign(g.vertices_.size(), 0);
  for (const auto& e : g.edges_) {
    ++g.degree_[e.tail];
    ++g.degree_[e.head];
  }
  return g;
}

}  // namespace sg
