#pragma once

#include <string>
#include <utility>

#include "sg/common.hpp"

namespace sg {

enum class BasisKind { Vertex, Edge, VertexPlusEdge };

inline const char* to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Vertex: return "vertex";
    case BasisKind::Edge: return "edge";
    case BasisKind::VertexPlusEdge: return "vertex+edge";
  }
  return "?";
}

/// Identifies the (flat) basis an operator is expressed in. The weighted
/// inner products are absorbed by symmetrizing with the square roots of the
/// vertex masses and of the edge conductance, so stored matrices are
/// Hermitian in the plain inner product; the label records those weights.
struct BasisLabel {
  int level = 0;
  BasisKind kind = BasisKind::Vertex;
  std::string weights;  // e.g. "sqrt-mass", "sqrt-conductance"
  Eigen::Index dim = 0;

  bool compatible(const BasisLabel& o) const {
    return level == o.level && kind == o.kind && weights == o.weights &&
           dim == o.dim;
  }
  std::string describe() const {
    return std::string(to_string(kind)) + "@level" + std::to_string(level) +
           "[" + weights + "]";
  }
};

/// Hermitian sparse operator with its basis label. Hermiticity is enforced
/// at assembly; `hermiticity_residual` reports the max elementwise deviation.
struct OperatorMatrix {
  SparseC mat;
  BasisLabel basis;

  Eigen::Index dim() const { return mat.rows(); }

  double hermiticity_residual() const {
    const SparseC d = SparseC(mat - SparseC(mat.adjoint()));
    double r = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
      for (SparseC::InnerIterator it(d, k); it; ++it)
        r = std::max(r, std::abs(it.value()));
    return r;
  }
};

/// Exact Hermitian symmetrization (A + A^H)/2, applied at assembly time.
inline SparseC hermitize(const SparseC& a) {
  SparseC h = SparseC(Complex(0.5, 0.0) * (a + SparseC(a.adjoint())));
  h.makeCompressed();
  return h;
}

inline OperatorMatrix make_operator(SparseC mat, BasisLabel label) {
  OperatorMatrix op{std::move(mat), std::move(label)};
  op.basis.dim = op.mat.rows();
  if (op.mat.rows() != op.mat.cols())
    throw ContractViolation("operator matrix must be square");
  return op;
}

}  // namespace sg
