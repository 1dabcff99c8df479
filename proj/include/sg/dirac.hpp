#pragma once

#include <vector>

#include "sg/forms.hpp"
#include "sg/spectral.hpp"

namespace sg {

/// Dirac block operator on functions (+) forms, vertex block first:
///
///   D = [ 0      -i d* ]
///       [ -i d    0    ]
///
/// expressed in the flat bases (mass weights absorbed on the vertex side,
/// conductance on the edge side), where the two off-diagonal blocks are
/// exact adjoints of each other and the assembled matrix is Hermitian with
/// zero diagonal blocks.
struct DiracOperator {
  OperatorMatrix op;
  int level = 0;
  Eigen::Index nv = 0;  // vertex block size
  Eigen::Index ne = 0;  // edge block size
};

inline BasisLabel dirac_basis(const LevelGraph& g) {
  return {g.level(), BasisKind::VertexPlusEdge, "sqrt-mass|sqrt-conductance",
          static_cast<Eigen::Index>(g.num_vertices() + g.num_edges())};
}

inline DiracOperator assemble_dirac(const LevelGraph& g, const MassVector& m) {
  const SparseD d = derivation_flat(g, m);
  const Eigen::Index nv = g.num_vertices(), ne = g.num_edges();
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(2 * d.nonZeros());
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseD::InnerIterator it(d, k); it; ++it) {
      // bottom-left block -i d, top-right block (-i d)^H = i d^T
      t.emplace_back(nv + it.row(), it.col(), Complex(0.0, -it.value()));
      t.emplace_back(it.col(), nv + it.row(), Complex(0.0, it.value()));
    }
  SparseC mat(nv + ne, nv + ne);
  mat.setFromTriplets(t.begin(), t.end());
  DiracOperator dop;
  dop.op = make_operator(std::move(mat), dirac_basis(g));
  dop.level = g.level();
  dop.nv = nv;
  dop.ne = ne;
  return dop;
}

/// Form Laplacian d d* on the edge space, flat basis: -(dbar dbar^T).
/// Hermitian, negative semidefinite; its kernel is ker d*, the harmonic
/// forms.
inline OperatorMatrix form_laplacian(const LevelGraph& g,
                                     const MassVector& m) {
  const SparseD d = derivation_flat(g, m);
  SparseD p = SparseD(d * d.transpose());
  p = SparseD(0.5 * (p + SparseD(p.transpose())));
  return make_operator(SparseC((-p).cast<Complex>()), edge_basis(g));
}

struct DiracSquareReport {
  double max_offdiag = 0.0;     // off-diagonal blocks of D^2
  double max_vertex_dev = 0.0;  // vertex block vs d^T d
  double max_edge_dev = 0.0;    // edge block vs d d^T
  double tol = 1e-12;
  bool pass = false;
  double max_deviation() const {
    return std::max({max_offdiag, max_vertex_dev, max_edge_dev});
  }
};

/// Verifies that D^2 is block diagonal with the two (sign-flipped) Laplacians
/// on the diagonal: vertex block d^T d = -energy Laplacian, edge block
/// d d^T = -form Laplacian, both positive semidefinite.
inline DiracSquareReport dirac_square_check(const DiracOperator& dop,
                                            const LevelGraph& g,
                                            const MassVector& m,
                                            double tol = 1e-12) {
  DiracSquareReport rep;
  rep.tol = tol;
  const SparseC sq = SparseC(dop.op.mat * dop.op.mat);
  const SparseD d = derivation_flat(g, m);
  const SparseD vertex_expected = SparseD(d.transpose() * d);
  const SparseD edge_expected = SparseD(d * d.transpose());

  SparseC expected(dop.nv + dop.ne, dop.nv + dop.ne);
  {
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(vertex_expected.nonZeros() + edge_expected.nonZeros());
    for (int k = 0; k < vertex_expected.outerSize(); ++k)
      for (SparseD::InnerIterator it(vertex_expected, k); it; ++it)
        t.emplace_back(it.row(), it.col(), Complex(it.value(), 0.0));
    for (int k = 0; k < edge_expected.outerSize(); ++k)
      for (SparseD::InnerIterator it(edge_expected, k); it; ++it)
        t.emplace_back(dop.nv + it.row(), dop.nv + it.col(),
                       Complex(it.value(), 0.0));
    expected.setFromTriplets(t.begin(), t.end());
  }

  const SparseC diff = SparseC(sq - expected);
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseC::InnerIterator it(diff, k); it; ++it) {
      const double dev = std::abs(it.value());
      const bool row_vertex = it.row() < dop.nv;
      const bool col_vertex = it.col() < dop.nv;
      if (row_vertex != col_vertex)
        rep.max_offdiag = std::max(rep.max_offdiag, dev);
      else if (row_vertex)
        rep.max_vertex_dev = std::max(rep.max_vertex_dev, dev);
      else
        rep.max_edge_dev = std::max(rep.max_edge_dev, dev);
    }
  rep.pass = rep.max_deviation() <= tol;
  return rep;
}

}  // namespace sg
