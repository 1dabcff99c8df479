#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "sg/rational.hpp"
#include "sg/structure.hpp"

namespace sg {

/// Complex values on the vertices of a LevelGraph, indexed by vertex id.
struct VertexFunction {
  int level = 0;
  Eigen::VectorXcd values;
};

using BoundaryTriple = Eigen::Vector3cd;

inline void require_same_level(const LevelGraph& g, const VertexFunction& u,
                               const char* what) {
  if (u.level != g.level() || u.values.size() != g.num_vertices())
    throw ContractViolation(std::string(what) + ": level mismatch");
}

/// Sesquilinear graph energy (5/3)^n sum_e (u(head)-u(tail)) conj(v(head)-v(tail)).
/// Linear in the first argument, conjugate linear in the second.
inline Complex discrete_energy(const LevelGraph& g, const VertexFunction& u,
                               const VertexFunction& v) {
  require_same_level(g, u, "discrete_energy(u)");
  require_same_level(g, v, "discrete_energy(v)");
  Complex s = 0.0;
  for (const auto& e : g.edges()) {
    const Complex du = u.values[e.head] - u.values[e.tail];
    const Complex dv = v.values[e.head] - v.values[e.tail];
    s += du * std::conj(dv);
  }
  return g.conductance() * s;
}

inline double discrete_energy(const LevelGraph& g, const VertexFunction& u) {
  return discrete_energy(g, u, u).real();
}

/// Coefficients of the one-cell harmonic extension: the value at the midpoint
/// opposite corner k is row k applied to the corner values. Derived by
/// minimizing the energy of a single subdivided cell, not hard-coded.
struct ExtensionStencil {
  std::array<std::array<Rational, 3>, 3> rows;  // rows[k][c]

  Eigen::Matrix3d as_matrix() const {
    Eigen::Matrix3d m;
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 3; ++c) m(k, c) = rows[k][c].to_double();
    return m;
  }
};

namespace detail {

/// Solves a 3x3 rational linear system by Gaussian elimination.
inline std::array<Rational, 3> solve3(std::array<std::array<Rational, 4>, 3> m) {
  for (int col = 0; col < 3; ++col) {
    int piv = -1;
    for (int r = col; r < 3; ++r)
      if (m[r][col].num() != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw Error("singular extension system");
    std::swap(m[col], m[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col || m[r][col].num() == 0) continue;
      const Rational f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

}  // namespace detail

/// Derives the extension stencil from the subdivided single cell: fix the
/// three corner values, minimize the refined graph energy over the three
/// midpoint values. Stationarity gives a 3x3 integer system solved exactly.
inline const ExtensionStencil& extension_stencil() {
  static const ExtensionStencil stencil = [] {
    const LevelGraph g1 = build_level_graph(1);

    // Slot numbering for the three interior (midpoint) vertices.
    std::vector<int> interior;
    std::vector<int> slot_of_vertex(g1.num_vertices(), -1);
    const auto& bd = g1.boundary();
    const std::array<DyadicPoint, 3> corners = {DyadicPoint::corner(1),
                                                DyadicPoint::corner(2),
                                                DyadicPoint::corner(3)};
    for (const auto& v : g1.vertices()) {
      if (v.id == bd[0] || v.id == bd[1] || v.id == bd[2]) continue;
      slot_of_vertex[v.id] = static_cast<int>(interior.size());
      interior.push_back(v.id);
    }

    // opposite[k] = vertex id of the midpoint of the pair {i,j}, i,j != k.
    std::array<int, 3> opposite{};
    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      const DyadicPoint mid = DyadicPoint::midpoint(corners[i], corners[j]);
      opposite[k] = -1;
      for (int vid : interior)
        if (g1.vertices()[vid].point == mid) opposite[k] = vid;
      if (opposite[k] < 0) throw Error("midpoint vertex not found");
    }

    ExtensionStencil st;
    // One solve per unit corner datum.
    for (int unit = 0; unit < 3; ++unit) {
      std::array<std::array<Rational, 4>, 3> sys{};
      for (int slot = 0; slot < 3; ++slot) {
        const int vid = interior[slot];
        sys[slot][slot] = Rational(g1.degree(vid));
        for (const auto& e : g1.edges()) {
          int other = -1;
          if (e.tail == vid) other = e.head;
          if (e.head == vid) other = e.tail;
          if (other < 0) continue;
          const int oslot = slot_of_vertex[other];
          if (oslot >= 0) {
            sys[slot][oslot] -= Rational(1);
          } else {
            // boundary neighbor contributes to the right-hand side
            for (int c = 0; c < 3; ++c)
              if (other == bd[c] && c == unit) sys[slot][3] += Rational(1);
          }
        }
      }
      const auto sol = detail::solve3(sys);
      for (int k = 0; k < 3; ++k)
        st.rows[k][unit] = sol[slot_of_vertex[opposite[k]]];
    }
    return st;
  }();
  return stencil;
}

/// One-step harmonic extension from `from` to the graph one level finer.
/// New midpoint values minimize the refined energy given the coarse values;
/// the minimizer is cell-local.
inline VertexFunction harmonic_extend_one(const LevelGraph& from,
                                          const VertexFunction& u,
                                          const LevelGraph& to) {
  require_same_level(from, u, "harmonic_extend");
  if (to.level() != from.level() + 1)
    throw ContractViolation("harmonic_extend_one: target must be one level finer");

  const ExtensionStencil& st = extension_stencil();
  const Eigen::Matrix3d S = st.as_matrix();

  VertexFunction r{to.level(), Eigen::VectorXcd::Zero(to.num_vertices())};
  for (const auto& v : from.vertices()) {
    const int id2 = to.vertex_id(v.point);
    r.values[id2] = u.values[v.id];
  }
  for (const auto& cell : from.cells()) {
    Eigen::Vector3cd cv;
    std::array<DyadicPoint, 3> pts;
    for (int i = 0; i < 3; ++i) {
      cv[i] = u.values[cell.v[i]];
      pts[i] = from.vertices()[cell.v[i]].point;
    }
    const Eigen::Vector3cd mids = S.cast<Complex>() * cv;
    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      const int id2 = to.vertex_id(DyadicPoint::midpoint(pts[i], pts[j]));
      r.values[id2] = mids[k];
    }
  }
  return r;
}

/// Harmonic extension to `target_level >= u.level`. Values at coarse vertices
/// are kept; each refinement step minimizes energy cell by cell.
inline VertexFunction harmonic_extend(const LevelGraph& from,
                                      const VertexFunction& u, int target_level,
                                      int max_level = kDefaultMaxLevel) {
  require_same_level(from, u, "harmonic_extend");
  if (target_level < from.level())
    throw ContractViolation("harmonic_extend: target coarser than source");
  VertexFunction cur = u;
  LevelGraph g = from;
  for (int lev = from.level(); lev < target_level; ++lev) {
    LevelGraph finer = build_level_graph(lev + 1, max_level);
    cur = harmonic_extend_one(g, cur, finer);
    g = std::move(finer);
  }
  return cur;
}

/// Vertex function on the level-0 graph holding a boundary triple.
inline VertexFunction boundary_function(const LevelGraph& g0,
                                        const BoundaryTriple& t) {
  if (g0.level() != 0) throw ContractViolation("boundary_function: level-0 graph expected");
  VertexFunction u{0, Eigen::VectorXcd::Zero(3)};
  for (int i = 0; i < 3; ++i) u.values[g0.boundary()[i]] = t[i];
  return u;
}

/// Energy-orthonormal pair of nonconstant harmonic boundary triples.
/// Canonical choice: the antisymmetric triple (0,1,-1) and the symmetric
/// triple (2,-1,-1), each divided by the square root of its level-0 energy.
struct HarmonicBasis {
  Eigen::Vector3d h1;
  Eigen::Vector3d h2;
};

inline HarmonicBasis harmonic_basis() {
  const LevelGraph g0 = build_level_graph(0);
  const Eigen::Vector3d t1(0.0, 1.0, -1.0);
  const Eigen::Vector3d t2(2.0, -1.0, -1.0);
  const double e1 =
      discrete_energy(g0, boundary_function(g0, t1.cast<Complex>()));
  const double e2 =
      discrete_energy(g0, boundary_function(g0, t2.cast<Complex>()));
  return {t1 / std::sqrt(e1), t2 / std::sqrt(e2)};
}

/// Basis-rotation hook: replaces (h1,h2) by the orthogonal mixture
/// (O00 h1 + O01 h2, O10 h1 + O11 h2). O must be orthogonal.
inline HarmonicBasis rotate_basis(const HarmonicBasis& b, const Mat2& O) {
  if (((O * O.transpose()) - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw ContractViolation("rotate_basis: matrix is not orthogonal");
  HarmonicBasis r;
  r.h1 = O(0, 0) * b.h1 + O(0, 1) * b.h2;
  r.h2 = O(1, 0) * b.h1 + O(1, 1) * b.h2;
  return r;
}

/// Harmonic coordinates y(x) = (h1(x), h2(x)) on the vertices of g, obtained
/// by harmonically extending the basis triples.
inline std::vector<Vec2> harmonic_coordinates(
    const LevelGraph& g, const HarmonicBasis& basis = harmonic_basis()) {
  const LevelGraph g0 = build_level_graph(0);
  const VertexFunction h1 = harmonic_extend(
      g0, boundary_function(g0, basis.h1.cast<Complex>()), g.level());
  const VertexFunction h2 = harmonic_extend(
      g0, boundary_function(g0, basis.h2.cast<Complex>()), g.level());
  std::vector<Vec2> y(g.num_vertices());
  for (int i = 0; i < g.num_vertices(); ++i)
    y[i] = Vec2(h1.values[i].real(), h2.values[i].real());
  return y;
}

}  // namespace sg
