#pragma once

#include <cmath>
#include <vector>

#include "sg/dirac.hpp"
#include "sg/forms.hpp"

namespace sg {

/// Magnetic vector potential (real, antisymmetric edge values) and electric
/// potential (real vertex values). Realness is built into the storage.
struct PotentialPair {
  int level = 0;
  Eigen::VectorXd a;  // per canonical edge
  Eigen::VectorXd V;  // per vertex
};

inline PotentialPair zero_potential(const LevelGraph& g) {
  return {g.level(), Eigen::VectorXd::Zero(g.num_edges()),
          Eigen::VectorXd::Zero(g.num_vertices())};
}

inline EdgeForm as_edge_form(const LevelGraph& g, const Eigen::VectorXd& a) {
  if (a.size() != g.num_edges())
    throw ContractViolation("edge potential size mismatch");
  return EdgeForm{g.level(), a.cast<Complex>()};
}

/// Magnetic Hamiltonian in the linearized model: H = (-i d - a.)^H (-i d - a.) + V
/// with the mean-rule action (a.f)(x->y) = a(e) (f(x)+f(y))/2. Hermitian by
/// construction; positive semidefinite for V >= 0.
inline OperatorMatrix linear_hamiltonian(const LevelGraph& g,
                                         const MassVector& m,
                                         const PotentialPair& p) {
  require_same_level(g, m, "linear_hamiltonian");
  if (p.level != g.level() || p.a.size() != g.num_edges() ||
      p.V.size() != g.num_vertices())
    throw ContractViolation("linear_hamiltonian: potential level mismatch");

  const SparseD d = derivation_flat(g, m);
  // a-action in flat bases: sqrt(c) diag(a) Avg M^{-1/2}
  SparseD act = averaging_matrix(g);
  const double sc = std::sqrt(g.conductance());
  for (int k = 0; k < act.outerSize(); ++k)
    for (SparseD::InnerIterator it(act, k); it; ++it)
      it.valueRef() *= sc * p.a[it.row()] / std::sqrt(m.m[it.col()]);

  SparseC t = SparseC(Complex(0.0, -1.0) * d.cast<Complex>()) -
              SparseC(act.cast<Complex>());
  SparseC h = SparseC(t.adjoint() * t);
  // electric term is diagonal in the flat basis
  for (int v = 0; v < g.num_vertices(); ++v)
    h.coeffRef(v, v) += Complex(p.V[v], 0.0);
  return make_operator(hermitize(h), vertex_basis(g));
}

/// Magnetic Hamiltonian with Peierls phases. The hop from y into x along a
/// canonically oriented edge x->y carries the phase factor e^{-i theta(e)}
/// (and e^{+i theta(e)} in the reverse direction):
///
///   H u(x) = (c_n / m(x)) sum_{y ~ x} (u(x) - e^{-i theta(x->y)} u(y)) + V(x) u(x).
///
/// With this orientation convention, conjugation by diag(e^{i lambda}) shifts
/// theta by the derivation of lambda exactly, and the operator agrees with
/// the linearized model to first order in the potential when theta = a.
inline OperatorMatrix peierls_hamiltonian(const LevelGraph& g,
                                          const MassVector& m,
                                          const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& V) {
  require_same_level(g, m, "peierls_hamiltonian");
  if (theta.size() != g.num_edges() || V.size() != g.num_vertices())
    throw ContractViolation("peierls_hamiltonian: potential size mismatch");

  const double c = g.conductance();
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(g.num_vertices() + 2 * g.num_edges());
  for (int v = 0; v < g.num_vertices(); ++v)
    t.emplace_back(v, v, Complex(c * g.degree(v) / m.m[v] + V[v], 0.0));
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& er = g.edges()[e];
    const double w = c / std::sqrt(m.m[er.tail] * m.m[er.head]);
    // row = tail x, column = head y: phase e^{-i theta}
    const Complex hop = std::polar(w, -theta[e]);
    t.emplace_back(er.tail, er.head, -hop);
    t.emplace_back(er.head, er.tail, -std::conj(hop));
  }
  SparseC h(g.num_vertices(), g.num_vertices());
  h.setFromTriplets(t.begin(), t.end());
  return make_operator(std::move(h), vertex_basis(g));
}

inline OperatorMatrix peierls_hamiltonian(const LevelGraph& g,
                                          const MassVector& m,
                                          const PotentialPair& p) {
  return peierls_hamiltonian(g, m, p.a, p.V);
}

/// Gauge shift of a vector potential (or of Peierls phases): a + d lambda,
/// with lambda a real vertex function.
inline Eigen::VectorXd gauge_transform(const LevelGraph& g,
                                       const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& lambda) {
  if (a.size() != g.num_edges() || lambda.size() != g.num_vertices())
    throw ContractViolation("gauge_transform: size mismatch");
  Eigen::VectorXd b = a;
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& er = g.edges()[e];
    b[e] += lambda[er.head] - lambda[er.tail];
  }
  return b;
}

/// Diagonal gauge unitary U = diag(e^{i lambda}); identical in the flat and
/// the mass-weighted basis since it is diagonal.
inline Eigen::VectorXcd gauge_unitary(const Eigen::VectorXd& lambda) {
  Eigen::VectorXcd u(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    u[i] = std::polar(1.0, lambda[i]);
  return u;
}

/// U H U^H for a diagonal unitary given by its diagonal.
inline OperatorMatrix unitary_conjugate(const OperatorMatrix& h,
                                        const Eigen::VectorXcd& u) {
  if (u.size() != h.dim())
    throw ContractViolation("unitary_conjugate: size mismatch");
  SparseC r = h.mat;
  for (int k = 0; k < r.outerSize(); ++k)
    for (SparseC::InnerIterator it(r, k); it; ++it)
      it.valueRef() *= u[it.row()] * std::conj(u[it.col()]);
  return make_operator(std::move(r), h.basis);
}

/// Divergence-free representative of a gauge class: the ker d* component of
/// the Hodge decomposition. Idempotent; preserves the Peierls spectrum up to
/// the gauge unitary built from the removed exact part.
inline Eigen::VectorXd coulomb_project(const LevelGraph& g,
                                       const MassVector& m,
                                       const Eigen::VectorXd& a,
                                       double tol = 1e-10) {
  const HodgeParts parts =
      hodge_decompose(g, m, as_edge_form(g, a), tol);
  return parts.harmonic_part.values.real();
}

struct KlmnReport {
  double lhs = 0.0;        // |M(f,f)| including the electric term
  double rhs = 0.0;        // eps^2 E(f) + C ||f||_m^2
  double energy = 0.0;     // E(f)
  double norm2 = 0.0;      // ||f||_m^2
  double max_gamma = 0.0;  // sup of the squared length density of a
  double vmax = 0.0;       // ||V||_inf
  double eps = 0.0;
  bool pass = false;
};

/// Form-boundedness check of the magnetic perturbation: the cross and square
/// terms of the magnetic form, measured against eps^2 E(f) + C ||f||^2 with
/// C = ||V||_inf + (1 + eps^-2) sup Gamma(a,a). The mean-rule inequality
/// ||a.f||^2 <= sup Gamma ||f||^2 holds exactly on the graph, so this is an
/// identity-backed bound, not a statistical one.
inline KlmnReport klmn_check(const LevelGraph& g, const MassVector& m,
                             const PotentialPair& p, const VertexFunction& f,
                             double eps) {
  if (eps <= 0.0) throw ContractViolation("klmn_check: eps must be positive");
  require_same_level(g, f, "klmn_check");

  const EdgeForm a = as_edge_form(g, p.a);
  const EdgeForm df = derivation(g, f);
  const EdgeForm af = pointwise_product(g, f, a);

  const Complex cross = form_inner(g, df, af);
  const double m_cross = 2.0 * (Complex(0.0, 1.0) * cross).real();
  const double m_square = form_norm2(g, af);
  double m_electric = 0.0;
  double norm2 = 0.0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const double w = m.m[v] * std::norm(f.values[v]);
    m_electric += p.V[v] * w;
    norm2 += w;
  }

  const VertexFunction gamma = pairing_density(g, m, a, a);
  KlmnReport rep;
  rep.max_gamma = gamma.values.real().maxCoeff();
  rep.vmax = p.V.size() > 0 ? p.V.cwiseAbs().maxCoeff() : 0.0;
  rep.energy = discrete_energy(g, f);
  rep.norm2 = norm2;
  rep.eps = eps;
  rep.lhs = std::abs(m_cross + m_square + m_electric);
  const double c = rep.vmax + (1.0 + 1.0 / (eps * eps)) * rep.max_gamma;
  rep.rhs = eps * eps * rep.energy + c * norm2;
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-14) + 1e-300;
  return rep;
}

struct CellHolonomy {
  Word word;
  double flux = 0.0;  // oriented sum of theta around the cell
};

/// Angle reduced to (-pi, pi].
inline double reduce_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  double r = std::fmod(a, two_pi);
  if (r <= -M_PI) r += two_pi;
  if (r > M_PI) r -= two_pi;
  return r;
}

/// Oriented sum of the edge phases around each cell. The cell edges are
/// stored as a consistently oriented cycle, so this is a plain sum.
inline std::vector<CellHolonomy> cycle_holonomies(const LevelGraph& g,
                                                  const Eigen::VectorXd& theta) {
  if (theta.size() != g.num_edges())
    throw ContractViolation("cycle_holonomies: size mismatch");
  std::vector<CellHolonomy> h(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) h[c].word = g.cells()[c].word;
  for (int e = 0; e < g.num_edges(); ++e)
    h[g.edges()[e].cell].flux += theta[e];
  return h;
}

/// Phases giving every cell the same holonomy `flux`: each edge belongs to
/// exactly one cell, so a third of the flux per edge does it.
inline Eigen::VectorXd uniform_flux_phases(const LevelGraph& g, double flux) {
  return Eigen::VectorXd::Constant(g.num_edges(), flux / 3.0);
}

}  // namespace sg
