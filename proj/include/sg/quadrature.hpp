#pragma once

#include <vector>

#include "sg/kusuoka.hpp"

namespace sg {

/// Per-cell quadrature node: mass and Z-matrix of the cell together with the
/// harmonic-coordinate barycenter of its three corners.
struct QuadratureCell {
  Word word;
  double mass = 0.0;
  Mat2 z;
  Vec2 y;
};

struct QuadratureGrid {
  int level = 0;
  std::vector<QuadratureCell> cells;
};

/// Builds the quadrature grid at a level. A basis rotation O rotates both
/// the Z-matrices (O z O^T) and the coordinates (O y).
inline QuadratureGrid quadrature_grid(int level,
                                      const KusuokaOptions& opt = {}) {
  const LevelGraph g = build_level_graph(level, opt.max_level);
  HarmonicBasis basis = harmonic_basis();
  basis = rotate_basis(basis, opt.rotation);
  const std::vector<Vec2> y = harmonic_coordinates(g, basis);
  const std::vector<CellData> table = level_cell_table(level, opt);

  QuadratureGrid grid;
  grid.level = level;
  grid.cells.reserve(table.size());
  for (size_t c = 0; c < table.size(); ++c) {
    const auto& cell = g.cells()[c];
    Vec2 bary = Vec2::Zero();
    for (int i = 0; i < 3; ++i) bary += y[cell.v[i]];
    bary /= 3.0;
    grid.cells.push_back({table[c].word, table[c].mass, table[c].z, bary});
  }
  return grid;
}

/// Quadrature for the energy of F composed with the harmonic coordinates:
/// sum over cells of mass * |z grad F(y)|^2. Exactly the energy in the
/// refinement limit; the level-n value is a lower bound for smooth F.
template <class GradF>
double kigami_quadrature(const QuadratureGrid& grid, GradF&& grad) {
  double s = 0.0;
  for (const auto& c : grid.cells) {
    const Vec2 zg = c.z * Vec2(grad(c.y));
    s += c.mass * zg.squaredNorm();
  }
  return s;
}

template <class GradF>
double kigami_quadrature(int level, GradF&& grad,
                         const KusuokaOptions& opt = {}) {
  return kigami_quadrature(quadrature_grid(level, opt),
                           std::forward<GradF>(grad));
}

/// Pointwise Laplacian surrogate on one cell: trace(z_w * Hess F(y_w)).
template <class HessF>
double laplacian_quadrature(const QuadratureCell& cell, HessF&& hess) {
  const Mat2 h = hess(cell.y);
  return (cell.z * h).trace();
}

template <class HessF>
double laplacian_quadrature(const Word& w, HessF&& hess,
                            const KusuokaOptions& opt = {}) {
  const QuadratureGrid grid = quadrature_grid(w.level(), opt);
  for (const auto& c : grid.cells)
    if (c.word == w) return laplacian_quadrature(c, std::forward<HessF>(hess));
  throw ContractViolation("laplacian_quadrature: word not found at its level");
}

/// Quadrature for the divergence functional: the value of div_Z(G grad F)
/// tested against U,
///   sum over cells of mass * ( - sum_ij z_ij (G grad F)_j dU/dy_i )
/// evaluated at the cell barycenters.
template <class GFn, class GradF, class GradU>
double divergence_quadrature(const QuadratureGrid& grid, GFn&& gval,
                             GradF&& grad_f, GradU&& grad_u) {
  double s = 0.0;
  for (const auto& c : grid.cells) {
    const Vec2 gf = gval(c.y) * Vec2(grad_f(c.y));
    const Vec2 gu = grad_u(c.y);
    s += c.mass * (-(gu.transpose() * (c.z * gf))(0, 0));
  }
  return s;
}

template <class GFn, class GradF, class GradU>
double divergence_quadrature(int level, GFn&& gval, GradF&& grad_f,
                             GradU&& grad_u, const KusuokaOptions& opt = {}) {
  return divergence_quadrature(quadrature_grid(level, opt),
                               std::forward<GFn>(gval),
                               std::forward<GradF>(grad_f),
                               std::forward<GradU>(grad_u));
}

}  // namespace sg
