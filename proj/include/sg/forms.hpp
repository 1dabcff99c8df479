#pragma once

#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "sg/energy.hpp"
#include "sg/kusuoka.hpp"
#include "sg/operators.hpp"

namespace sg {

/// Discrete 1-form: one complex value per canonically oriented edge. The
/// value on a reversed edge is the negative of the stored one.
struct EdgeForm {
  int level = 0;
  Eigen::VectorXcd values;
};

inline void require_same_level(const LevelGraph& g, const EdgeForm& w,
                               const char* what) {
  if (w.level != g.level() || w.values.size() != g.num_edges())
    throw ContractViolation(std::string(what) + ": level mismatch");
}

inline void require_same_level(const LevelGraph& g, const MassVector& m,
                               const char* what) {
  if (m.level != g.level() || m.m.size() != g.num_vertices())
    throw ContractViolation(std::string(what) + ": mass vector level mismatch");
}

/// Derivation: (du)(x->y) = u(y) - u(x). Its squared norm equals the graph
/// energy of u.
inline EdgeForm derivation(const LevelGraph& g, const VertexFunction& u) {
  require_same_level(g, u, "derivation");
  EdgeForm w{g.level(), Eigen::VectorXcd(g.num_edges())};
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& er = g.edges()[e];
    w.values[e] = u.values[er.head] - u.values[er.tail];
  }
  return w;
}

/// Conductance-weighted inner product of 1-forms; linear in the first
/// argument, conjugate linear in the second.
inline Complex form_inner(const LevelGraph& g, const EdgeForm& w,
                          const EdgeForm& e) {
  require_same_level(g, w, "form_inner(w)");
  require_same_level(g, e, "form_inner(e)");
  // Eigen's dot conjugates its first argument.
  return g.conductance() * e.values.dot(w.values);
}

inline double form_norm2(const LevelGraph& g, const EdgeForm& w) {
  return form_inner(g, w, w).real();
}

/// Module action of a function on a 1-form through the endpoint mean:
/// (f.w)(x->y) = (f(x)+f(y))/2 * w(x->y). The mean rule is what makes the
/// product identities below exact.
inline EdgeForm pointwise_product(const LevelGraph& g, const VertexFunction& f,
                                  const EdgeForm& w) {
  require_same_level(g, f, "pointwise_product(f)");
  require_same_level(g, w, "pointwise_product(w)");
  EdgeForm r{g.level(), Eigen::VectorXcd(g.num_edges())};
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& er = g.edges()[e];
    r.values[e] = 0.5 * (f.values[er.tail] + f.values[er.head]) * w.values[e];
  }
  return r;
}

/// Codifferential against the mass-weighted vertex inner product: the unique
/// vertex function with <d*w, phi>_m = -<w, d phi> for all phi. Explicitly
/// minus the net conductance-weighted flux into each vertex, divided by the
/// vertex mass.
inline VertexFunction codifferential(const LevelGraph& g, const MassVector& m,
                                     const EdgeForm& w) {
  require_same_level(g, w, "codifferential");
  require_same_level(g, m, "codifferential");
  VertexFunction r{g.level(), Eigen::VectorXcd::Zero(g.num_vertices())};
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& er = g.edges()[e];
    r.values[er.head] -= w.values[e];
    r.values[er.tail] += w.values[e];
  }
  for (int v = 0; v < g.num_vertices(); ++v)
    r.values[v] *= g.conductance() / m.m[v];
  return r;
}

/// Pointwise pairing density of two 1-forms: at a vertex, half the
/// conductance-weighted sum over incident edges of w(e) conj(eta(e)), divided
/// by the vertex mass. Its mass-weighted sum is the form inner product.
inline VertexFunction pairing_density(const LevelGraph& g, const MassVector& m,
                                      const EdgeForm& w, const EdgeForm& eta) {
  require_same_level(g, w, "pairing_density(w)");
  require_same_level(g, eta, "pairing_density(eta)");
  require_same_level(g, m, "pairing_density");
  VertexFunction r{g.level(), Eigen::VectorXcd::Zero(g.num_vertices())};
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& er = g.edges()[e];
    const Complex c = w.values[e] * std::conj(eta.values[e]);
    r.values[er.head] += c;
    r.values[er.tail] += c;
  }
  for (int v = 0; v < g.num_vertices(); ++v)
    r.values[v] *= g.conductance() / (2.0 * m.m[v]);
  return r;
}

// ---------------------------------------------------------------------------
// Flat-basis building blocks
// ---------------------------------------------------------------------------

/// Oriented incidence matrix: (Bu)(e) = u(head) - u(tail).
inline SparseD incidence_matrix(const LevelGraph& g) {
  SparseD b(g.num_edges(), g.num_vertices());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& er = g.edges()[e];
    t.emplace_back(e, er.head, 1.0);
    t.emplace_back(e, er.tail, -1.0);
  }
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

/// Endpoint averaging matrix: (Au)(e) = (u(head) + u(tail))/2.
inline SparseD averaging_matrix(const LevelGraph& g) {
  SparseD a(g.num_edges(), g.num_vertices());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& er = g.edges()[e];
    t.emplace_back(e, er.head, 0.5);
    t.emplace_back(e, er.tail, 0.5);
  }
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

/// Derivation in the flat bases: sqrt(c_n) B M^{-1/2}, where B is the
/// incidence matrix. Composing with its transpose gives the two Laplacians.
inline SparseD derivation_flat(const LevelGraph& g, const MassVector& m) {
  require_same_level(g, m, "derivation_flat");
  const double sc = std::sqrt(g.conductance());
  SparseD d = incidence_matrix(g);
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseD::InnerIterator it(d, k); it; ++it)
      it.valueRef() *= sc / std::sqrt(m.m[it.col()]);
  return d;
}

inline BasisLabel vertex_basis(const LevelGraph& g) {
  return {g.level(), BasisKind::Vertex, "sqrt-mass",
          static_cast<Eigen::Index>(g.num_vertices())};
}

inline BasisLabel edge_basis(const LevelGraph& g) {
  return {g.level(), BasisKind::Edge, "sqrt-conductance",
          static_cast<Eigen::Index>(g.num_edges())};
}

/// Energy Laplacian d*d on the mass-weighted vertex space, stored in the
/// flat basis: -(dbar^T dbar). Hermitian, negative semidefinite, kernel the
/// constants.
inline OperatorMatrix energy_laplacian(const LevelGraph& g,
                                       const MassVector& m) {
  const SparseD d = derivation_flat(g, m);
  SparseD p = SparseD(d.transpose() * d);
  p = SparseD(0.5 * (p + SparseD(p.transpose())));
  return make_operator(SparseC((-p).cast<Complex>()), vertex_basis(g));
}

// ---------------------------------------------------------------------------
// Hodge decomposition
// ---------------------------------------------------------------------------

struct HodgeParts {
  EdgeForm exact;          // d(potential)
  EdgeForm harmonic_part;  // in ker d*
  VertexFunction potential;  // mass-weighted mean zero
  double residual = 0.0;
};

/// Splits w = d f + h with d*h = 0 and <d f, h> = 0. The potential solves
/// the normal equations of -Laplacian with one vertex pinned; below
/// `direct_threshold` unknowns a sparse Cholesky is used, above it a Jacobi
/// preconditioned CG.
inline HodgeParts hodge_decompose(const LevelGraph& g, const MassVector& m,
                                  const EdgeForm& w, double tol = 1e-10,
                                  Eigen::Index direct_threshold = 50000) {
  require_same_level(g, w, "hodge_decompose");
  require_same_level(g, m, "hodge_decompose");
  const SparseD d = derivation_flat(g, m);
  const int nv = g.num_vertices();
  const double sc = std::sqrt(g.conductance());

  // Flat right-hand side dbar^T (sqrt(c) w).
  Eigen::VectorXcd wflat = sc * w.values;
  Eigen::VectorXcd rhs = d.transpose() * wflat;

  // Pin vertex 0 to fix the constant mode.
  SparseD lap = SparseD(d.transpose() * d);
  const int nred = nv - 1;
  SparseD lred(nred, nred);
  {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(lap.nonZeros());
    for (int k = 0; k < lap.outerSize(); ++k)
      for (SparseD::InnerIterator it(lap, k); it; ++it)
        if (it.row() > 0 && it.col() > 0)
          t.emplace_back(static_cast<int>(it.row()) - 1,
                         static_cast<int>(it.col()) - 1, it.value());
    lred.setFromTriplets(t.begin(), t.end());
  }
  Eigen::VectorXd rr = rhs.real().tail(nred);
  Eigen::VectorXd ri = rhs.imag().tail(nred);

  Eigen::VectorXd sr, si;
  if (nred <= direct_threshold) {
    Eigen::SimplicialLDLT<SparseD> solver(lred);
    if (solver.info() != Eigen::Success)
      throw NumericalError("hodge_decompose: factorization failed");
    sr = solver.solve(rr);
    si = solver.solve(ri);
  } else {
    Eigen::ConjugateGradient<SparseD, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tol * 1e-2);
    cg.setMaxIterations(20000);
    cg.compute(lred);
    sr = cg.solve(rr);
    si = cg.solve(ri);
    if (cg.info() != Eigen::Success)
      throw NumericalError("hodge_decompose: CG did not converge, error " +
                           std::to_string(cg.error()));
  }

  Eigen::VectorXcd fflat = Eigen::VectorXcd::Zero(nv);
  for (int i = 0; i < nred; ++i) fflat[i + 1] = Complex(sr[i], si[i]);

  HodgeParts parts;
  Eigen::VectorXcd exact_flat = d * fflat;
  Eigen::VectorXcd harm_flat = wflat - exact_flat;

  // Residual: the harmonic part must be flux-free.
  const double scale = std::max(1.0, wflat.norm());
  parts.residual = (d.transpose() * harm_flat).norm() / scale;
  if (parts.residual > tol)
    throw NumericalError("hodge_decompose: residual " +
                         std::to_string(parts.residual) +
                         " above tolerance " + std::to_string(tol));

  parts.exact = EdgeForm{g.level(), exact_flat / sc};
  parts.harmonic_part = EdgeForm{g.level(), harm_flat / sc};

  // Unweighted potential, centered to mass-weighted mean zero.
  Eigen::VectorXcd f(nv);
  for (int i = 0; i < nv; ++i) f[i] = fflat[i] / std::sqrt(m.m[i]);
  Complex mean = 0.0;
  double tot = 0.0;
  for (int i = 0; i < nv; ++i) {
    mean += m.m[i] * f[i];
    tot += m.m[i];
  }
  f.array() -= mean / tot;
  parts.potential = VertexFunction{g.level(), f};
  return parts;
}

}  // namespace sg
