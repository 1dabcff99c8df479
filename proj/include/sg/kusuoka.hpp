#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sg/energy.hpp"

namespace sg {

/// The three 3x3 matrices mapping a harmonic function's boundary triple to
/// the boundary triple of its restriction to child cell i.
struct ExtensionMatrixSet {
  std::array<Eigen::Matrix3d, 3> A;
};

/// Derived by running the harmonic extension on the three unit boundary
/// triples and reading off the corner values of each child cell.
inline ExtensionMatrixSet extension_matrices() {
  const LevelGraph g0 = build_level_graph(0);
  const LevelGraph g1 = build_level_graph(1);
  ExtensionMatrixSet s;
  for (int unit = 0; unit < 3; ++unit) {
    BoundaryTriple t = BoundaryTriple::Zero();
    t[unit] = 1.0;
    const VertexFunction h =
        harmonic_extend_one(g0, boundary_function(g0, t), g1);
    for (int i = 0; i < 3; ++i) {
      const CellRecord& cell = g1.cells()[i];  // words "1","2","3" in order
      for (int r = 0; r < 3; ++r) s.A[i](r, unit) = h.values[cell.v[r]].real();
    }
  }
  return s;
}

namespace detail {

template <class S>
using Mat3T = std::array<std::array<S, 3>, 3>;
template <class S>
using Vec3T = std::array<S, 3>;

/// Exact rational extension matrices, assembled from the derived stencil:
/// row r of A_i is the unit row e_i when r = i and otherwise the stencil row
/// of the midpoint opposite corner 3-i-r.
inline const std::array<Mat3T<Rational>, 3>& extension_matrices_exact() {
  static const std::array<Mat3T<Rational>, 3> mats = [] {
    const ExtensionStencil& st = extension_stencil();
    std::array<Mat3T<Rational>, 3> a{};
    for (int i = 0; i < 3; ++i)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          a[i][r][c] = (r == i) ? Rational(c == i ? 1 : 0)
                                : st.rows[3 - i - r][c];
    return a;
  }();
  return mats;
}

inline std::array<Mat3T<double>, 3> extension_matrices_double() {
  const auto& ex = extension_matrices_exact();
  std::array<Mat3T<double>, 3> a{};
  for (int i = 0; i < 3; ++i)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a[i][r][c] = ex[i][r][c].to_double();
  return a;
}

template <class S>
Vec3T<S> apply3(const Mat3T<S>& A, const Vec3T<S>& v) {
  Vec3T<S> r{};
  for (int i = 0; i < 3; ++i)
    r[i] = A[i][0] * v[0] + A[i][1] * v[1] + A[i][2] * v[2];
  return r;
}

/// Level-0 energy pairing of two boundary triples (unit conductances).
template <class S>
S triple_pairing(const Vec3T<S>& s, const Vec3T<S>& t) {
  S acc = (s[1] - s[0]) * (t[1] - t[0]);
  acc += (s[2] - s[1]) * (t[2] - t[1]);
  acc += (s[0] - s[2]) * (t[0] - t[2]);
  return acc;
}

}  // namespace detail

/// Per-cell data of the Kusuoka measure: the Gram matrix of the basis energy
/// measures on the cell, the cell mass, and the normalized Z-matrix
/// gram/mass (symmetric, PSD, unit trace).
struct CellData {
  Word word;
  Mat2 gram;
  double mass = 0.0;
  Mat2 z;
};

struct KusuokaOptions {
  Mat2 rotation = Mat2::Identity();  // orthogonal change of harmonic basis
  bool probability = false;          // renormalize total mass 2 -> 1
  int exact_level_cap = 8;           // exact rationals up to here, then floats
  int max_level = kDefaultMaxLevel;
};

/// Eigenvalues of a symmetric 2x2 matrix, (min, max).
inline std::pair<double, double> symmetric_eigenvalues(const Mat2& s) {
  const double half_tr = 0.5 * (s(0, 0) + s(1, 1));
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - det));
  return {half_tr - disc, half_tr + disc};
}

namespace detail {

/// Materializes CellData from the unnormalized pairings of the restricted
/// basis triples. n1, n2 are the root pairings of the raw triples (the
/// squared normalizations); pow53 = (5/3)^|w|.
inline CellData make_cell_data(Word word, double b11, double b12, double b22,
                               double pow53, double n1, double n2,
                               const KusuokaOptions& opt) {
  CellData cd;
  cd.word = std::move(word);
  Mat2 gram;
  gram(0, 0) = pow53 * b11 / n1;
  gram(1, 1) = pow53 * b22 / n2;
  gram(0, 1) = gram(1, 0) = pow53 * b12 / std::sqrt(n1 * n2);
  gram = opt.rotation * gram * opt.rotation.transpose();
  double mass = gram(0, 0) + gram(1, 1);
  if (opt.probability) {
    gram /= 2.0;
    mass /= 2.0;
  }
  cd.gram = gram;
  cd.mass = mass;
  cd.z = gram / mass;
  return cd;
}

template <class S>
struct CellWalkState {
  Vec3T<S> v1, v2;
};

/// Depth-first enumeration in lexicographic word order; calls the sink with
/// the restricted raw triples at the target depth.
template <class S, class Sink>
void walk_cells(const std::array<Mat3T<S>, 3>& A, const CellWalkState<S>& st,
                std::string& word, int depth, int target, Sink&& sink) {
  if (depth == target) {
    sink(word, st);
    return;
  }
  for (int i = 0; i < 3; ++i) {
    word.push_back(static_cast<char>('1' + i));
    walk_cells(A, CellWalkState<S>{apply3(A[i], st.v1), apply3(A[i], st.v2)},
               word, depth + 1, target, sink);
    word.pop_back();
  }
}

}  // namespace detail

/// All 3^n cells of level n in lexicographic order.
inline std::vector<CellData> level_cell_table(int level,
                                              const KusuokaOptions& opt = {}) {
  if (level < 0) throw ContractViolation("negative level");
  if (level > opt.max_level)
    throw ResourceLimitError("cell table level " + std::to_string(level) +
                             " above configured maximum " +
                             std::to_string(opt.max_level));
  std::vector<CellData> out;
  out.reserve(static_cast<size_t>(std::pow(3.0, level)));
  std::string word;

  if (level <= opt.exact_level_cap) {
    using R = Rational;
    const auto& A = detail::extension_matrices_exact();
    const detail::Vec3T<R> t1{R(0), R(1), R(-1)};
    const detail::Vec3T<R> t2{R(2), R(-1), R(-1)};
    const R n1 = detail::triple_pairing(t1, t1);
    const R n2 = detail::triple_pairing(t2, t2);
    const R pow53 = Rational::pow(R(5, 3), level);
    detail::walk_cells(
        A, detail::CellWalkState<R>{t1, t2}, word, 0, level,
        [&](const std::string& w, const detail::CellWalkState<R>& st) {
          const R b11 = detail::triple_pairing(st.v1, st.v1) * pow53;
          const R b12 = detail::triple_pairing(st.v1, st.v2) * pow53;
          const R b22 = detail::triple_pairing(st.v2, st.v2) * pow53;
          out.push_back(detail::make_cell_data(
              Word(w), b11.to_double(), b12.to_double(), b22.to_double(), 1.0,
              n1.to_double(), n2.to_double(), opt));
        });
  } else {
    const auto A = detail::extension_matrices_double();
    const detail::Vec3T<double> t1{0.0, 1.0, -1.0};
    const detail::Vec3T<double> t2{2.0, -1.0, -1.0};
    const double n1 = detail::triple_pairing(t1, t1);
    const double n2 = detail::triple_pairing(t2, t2);
    double pow53 = 1.0;
    for (int i = 0; i < level; ++i) pow53 *= 5.0 / 3.0;
    detail::walk_cells(
        A, detail::CellWalkState<double>{t1, t2}, word, 0, level,
        [&](const std::string& w, const detail::CellWalkState<double>& st) {
          out.push_back(detail::make_cell_data(
              Word(w), detail::triple_pairing(st.v1, st.v1),
              detail::triple_pairing(st.v1, st.v2),
              detail::triple_pairing(st.v2, st.v2), pow53, n1, n2, opt));
        });
  }
  return out;
}

/// Gram matrix, mass and Z-matrix of a single cell.
inline CellData cell_data(const Word& w, const KusuokaOptions& opt = {}) {
  const int n = w.level();
  if (n > opt.max_level)
    throw ResourceLimitError("cell word longer than configured maximum");

  if (n <= opt.exact_level_cap) {
    using R = Rational;
    const auto& A = detail::extension_matrices_exact();
    detail::Vec3T<R> v1{R(0), R(1), R(-1)};
    detail::Vec3T<R> v2{R(2), R(-1), R(-1)};
    const R n1 = detail::triple_pairing(v1, v1);
    const R n2 = detail::triple_pairing(v2, v2);
    for (int k = 0; k < n; ++k) {
      v1 = detail::apply3(A[w.letter(k) - 1], v1);
      v2 = detail::apply3(A[w.letter(k) - 1], v2);
    }
    const R pow53 = Rational::pow(R(5, 3), n);
    const R b11 = detail::triple_pairing(v1, v1) * pow53;
    const R b12 = detail::triple_pairing(v1, v2) * pow53;
    const R b22 = detail::triple_pairing(v2, v2) * pow53;
    return detail::make_cell_data(w, b11.to_double(), b12.to_double(),
                                  b22.to_double(), 1.0, n1.to_double(),
                                  n2.to_double(), opt);
  }
  const auto A = detail::extension_matrices_double();
  detail::Vec3T<double> v1{0.0, 1.0, -1.0};
  detail::Vec3T<double> v2{2.0, -1.0, -1.0};
  const double n1 = detail::triple_pairing(v1, v1);
  const double n2 = detail::triple_pairing(v2, v2);
  for (int k = 0; k < n; ++k) {
    v1 = detail::apply3(A[w.letter(k) - 1], v1);
    v2 = detail::apply3(A[w.letter(k) - 1], v2);
  }
  double pow53 = 1.0;
  for (int i = 0; i < n; ++i) pow53 *= 5.0 / 3.0;
  return detail::make_cell_data(w, detail::triple_pairing(v1, v1),
                                detail::triple_pairing(v1, v2),
                                detail::triple_pairing(v2, v2), pow53, n1, n2,
                                opt);
}

/// Positive vertex weights discretizing L2 of the Kusuoka measure: each cell
/// splits its mass equally among its three corners.
struct MassVector {
  int level = 0;
  Eigen::VectorXd m;
};

inline MassVector vertex_masses(const LevelGraph& g,
                                const KusuokaOptions& opt = {}) {
  const auto table = level_cell_table(g.level(), opt);
  MassVector mv{g.level(), Eigen::VectorXd::Zero(g.num_vertices())};
  for (size_t c = 0; c < table.size(); ++c) {
    const auto& cell = g.cells()[c];
    for (int i = 0; i < 3; ++i) mv.m[cell.v[i]] += table[c].mass / 3.0;
  }
  return mv;
}

}  // namespace sg
