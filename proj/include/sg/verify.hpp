#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sg/dirac.hpp"
#include "sg/forms.hpp"
#include "sg/io.hpp"
#include "sg/kusuoka.hpp"
#include "sg/magnetic.hpp"
#include "sg/quadrature.hpp"
#include "sg/spectral.hpp"

namespace sg {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured deviation / quantity
  double threshold = 0.0;  // bound it is held against
  std::string note;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct VerifyOptions {
  int level = 3;
  std::uint64_t seed = 7;
  double solver_tol = 1e-10;
  int max_level = kDefaultMaxLevel;
};

namespace detail {

inline VertexFunction random_vertex_function(const LevelGraph& g, Rng& rng) {
  VertexFunction u{g.level(), Eigen::VectorXcd(g.num_vertices())};
  for (int i = 0; i < g.num_vertices(); ++i) u.values[i] = rng.complex_normal();
  return u;
}

inline Eigen::VectorXd random_real_vertex(const LevelGraph& g, Rng& rng) {
  Eigen::VectorXd v(g.num_vertices());
  for (int i = 0; i < g.num_vertices(); ++i) v[i] = rng.normal();
  return v;
}

inline Eigen::VectorXd random_real_edge(const LevelGraph& g, Rng& rng) {
  Eigen::VectorXd v(g.num_edges());
  for (int i = 0; i < g.num_edges(); ++i) v[i] = rng.normal();
  return v;
}

inline CheckResult bound_check(std::string name, double value,
                               double threshold, std::string note = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.threshold = threshold;
  c.pass = value <= threshold;
  c.note = std::move(note);
  return c;
}

inline CheckResult bracket_check(std::string name, double value, double lo,
                                 double hi) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.threshold = hi;
  c.pass = value >= lo && value <= hi;
  c.note = "expected in [" + fmt17(lo) + ", " + fmt17(hi) + "]";
  return c;
}

/// Kernel dimension of a Hermitian operator by counting eigenvalues below a
/// scale-relative cut.
inline int kernel_dimension(const OperatorMatrix& op) {
  const SpectrumReport rep = hermitian_eigen(op);
  double scale = 0.0;
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
    scale = std::max(scale, std::abs(rep.eigenvalues[i]));
  const double cut = std::max(scale, 1.0) * 1e-8;
  int k = 0;
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
    if (std::abs(rep.eigenvalues[i]) < cut) ++k;
  return k;
}

}  // namespace detail

/// Deviation of a spectrum from being symmetric under negation (with
/// multiplicity): compares the sorted list against its negated reverse.
inline double spectrum_negation_defect(const Eigen::VectorXd& sorted) {
  double d = 0.0;
  const Eigen::Index n = sorted.size();
  for (Eigen::Index i = 0; i < n; ++i)
    d = std::max(d, std::abs(sorted[i] + sorted[n - 1 - i]));
  return d;
}

/// Gauge covariance and flux checks; subset used by the `gauge-check`
/// command and included in the full verification battery.
inline void append_gauge_checks(VerifyReport& rep, const VerifyOptions& opt) {
  Rng rng(opt.seed ^ 0x9a6eULL);

  // Exact Peierls covariance on random pairs at the requested level.
  {
    const int lev = std::min(opt.level, 4);
    const LevelGraph g = build_level_graph(lev, opt.max_level);
    const MassVector m = vertex_masses(g);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd theta = detail::random_real_edge(g, rng);
      const Eigen::VectorXd lambda = detail::random_real_vertex(g, rng);
      const Eigen::VectorXd v = detail::random_real_vertex(g, rng);
      const OperatorMatrix ha = peierls_hamiltonian(g, m, theta, v);
      const OperatorMatrix hb =
          peierls_hamiltonian(g, m, gauge_transform(g, theta, lambda), v);
      const OperatorMatrix conj =
          unitary_conjugate(ha, gauge_unitary(lambda));
      worst = std::max(worst, operator_norm_diff(hb, conj));
    }
    rep.checks.push_back(detail::bound_check(
        "peierls-gauge-covariance", worst, 1e-12,
        "level " + std::to_string(lev) + ", 5 random (theta,lambda) pairs"));
  }

  // Level-0 spectrum at total flux pi.
  {
    const LevelGraph g0 = build_level_graph(0);
    const MassVector m0 = vertex_masses(g0);
    const OperatorMatrix h = peierls_hamiltonian(
        g0, m0, uniform_flux_phases(g0, M_PI), Eigen::VectorXd::Zero(3));
    const SpectrumReport sp = hermitian_eigen(h);
    const double dev = std::max({std::abs(sp.eigenvalues[0] - 1.5),
                                 std::abs(sp.eigenvalues[1] - 1.5),
                                 std::abs(sp.eigenvalues[2] - 6.0)});
    rep.checks.push_back(
        detail::bound_check("flux-pi-level0-spectrum", dev, 1e-10));
  }

  // Zero-potential reduction of both models to the (negated) Laplacian.
  {
    const int lev = std::min(opt.level, 4);
    const LevelGraph g = build_level_graph(lev, opt.max_level);
    const MassVector m = vertex_masses(g);
    const OperatorMatrix lap = energy_laplacian(g, m);
    const OperatorMatrix neg =
        make_operator(SparseC(Complex(-1.0, 0.0) * lap.mat), lap.basis);
    const OperatorMatrix hp = peierls_hamiltonian(
        g, m, Eigen::VectorXd::Zero(g.num_edges()),
        Eigen::VectorXd::Zero(g.num_vertices()));
    const OperatorMatrix hl = linear_hamiltonian(g, m, zero_potential(g));
    const double dev =
        std::max(operator_norm_diff(hp, neg), operator_norm_diff(hl, neg));
    rep.checks.push_back(
        detail::bound_check("zero-potential-reduction", dev, 1e-12));
  }

  // Gauge residual of the linearized model shrinks at second order.
  {
    const int lev = std::min(opt.level, 3);
    const LevelGraph g = build_level_graph(lev, opt.max_level);
    const MassVector m = vertex_masses(g);
    const Eigen::VectorXd a = detail::random_real_edge(g, rng);
    const Eigen::VectorXd lambda = detail::random_real_vertex(g, rng);
    auto residual = [&](double t) {
      PotentialPair pa = zero_potential(g);
      pa.a = t * a;
      PotentialPair pb = zero_potential(g);
      pb.a = gauge_transform(g, pa.a, t * lambda);
      const OperatorMatrix hb = linear_hamiltonian(g, m, pb);
      const OperatorMatrix conj = unitary_conjugate(
          linear_hamiltonian(g, m, pa), gauge_unitary(t * lambda));
      return operator_norm_diff(hb, conj);
    };
    const double ratio = residual(1e-2) / residual(5e-3);
    rep.checks.push_back(
        detail::bracket_check("linear-gauge-halving-ratio", ratio, 3.5, 4.5));
  }

  // First-order agreement of the two discretizations.
  {
    const int lev = std::min(opt.level, 3);
    const LevelGraph g = build_level_graph(lev, opt.max_level);
    const MassVector m = vertex_masses(g);
    const Eigen::VectorXd a = detail::random_real_edge(g, rng);
    auto gap = [&](double t) {
      PotentialPair p = zero_potential(g);
      p.a = t * a;
      return operator_norm_diff(linear_hamiltonian(g, m, p),
                                peierls_hamiltonian(g, m, p.a, p.V));
    };
    const double ratio = gap(1e-2) / gap(5e-3);
    rep.checks.push_back(detail::bracket_check("linear-vs-peierls-halving",
                                               ratio, 3.5, 4.5));
  }

  // Holonomies telescope away for pure gauges and are gauge invariant.
  {
    const int lev = std::min(opt.level, 4);
    const LevelGraph g = build_level_graph(lev, opt.max_level);
    const Eigen::VectorXd lambda = detail::random_real_vertex(g, rng);
    const Eigen::VectorXd theta = detail::random_real_edge(g, rng);
    const Eigen::VectorXd pure =
        gauge_transform(g, Eigen::VectorXd::Zero(g.num_edges()), lambda);
    double worst = 0.0;
    for (const auto& h : cycle_holonomies(g, pure))
      worst = std::max(worst, std::abs(reduce_angle(h.flux)));
    const auto h1 = cycle_holonomies(g, theta);
    const auto h2 = cycle_holonomies(g, gauge_transform(g, theta, lambda));
    for (size_t i = 0; i < h1.size(); ++i)
      worst = std::max(worst, std::abs(h1[i].flux - h2[i].flux));
    rep.checks.push_back(
        detail::bound_check("holonomy-gauge-invariance", worst, 1e-12));
  }

  // Equal holonomies (constructed through a gauge) give equal spectra.
  {
    const int lev = std::min(opt.level, 3);
    const LevelGraph g = build_level_graph(lev, opt.max_level);
    const MassVector m = vertex_masses(g);
    const Eigen::VectorXd theta = detail::random_real_edge(g, rng);
    const Eigen::VectorXd lambda = detail::random_real_vertex(g, rng);
    const Eigen::VectorXd v = detail::random_real_vertex(g, rng);
    const SpectrumReport s1 = hermitian_eigen(peierls_hamiltonian(g, m, theta, v));
    const SpectrumReport s2 = hermitian_eigen(
        peierls_hamiltonian(g, m, gauge_transform(g, theta, lambda), v));
    const double dev =
        (s1.eigenvalues - s2.eigenvalues).cwiseAbs().maxCoeff();
    rep.checks.push_back(
        detail::bound_check("equal-holonomy-isospectrality", dev, 1e-9));
  }
}

/// Full invariant battery at one level. Deterministic for fixed options.
inline VerifyReport run_verification(const VerifyOptions& opt) {
  VerifyReport rep;
  Rng rng(opt.seed);
  const int n = opt.level;
  const LevelGraph g = build_level_graph(n, opt.max_level);
  const MassVector m = vertex_masses(g);

  // -- structure ------------------------------------------------------------
  {
    const long expect_e = static_cast<long>(std::llround(std::pow(3.0, n + 1)));
    const long expect_v = (expect_e + 3) / 2;
    const bool ok = g.num_edges() == expect_e && g.num_vertices() == expect_v &&
                    g.num_cells() == expect_e / 3;
    CheckResult c;
    c.name = "graph-counts";
    c.pass = ok;
    c.value = ok ? 0.0 : 1.0;
    c.threshold = 0.0;
    c.note = "|V|=" + std::to_string(g.num_vertices()) +
             " |E|=" + std::to_string(g.num_edges()) +
             " cells=" + std::to_string(g.num_cells());
    rep.checks.push_back(c);
  }
  {
    bool ok = true;
    for (const auto& v : g.vertices()) {
      const bool boundary = v.id == g.boundary()[0] || v.id == g.boundary()[1] ||
                            v.id == g.boundary()[2];
      ok = ok && g.degree(v.id) == (boundary ? 2 : 4);
    }
    CheckResult c;
    c.name = "vertex-degrees";
    c.pass = ok;
    c.value = ok ? 0.0 : 1.0;
    c.threshold = 0.0;
    rep.checks.push_back(c);
  }

  // -- energy ---------------------------------------------------------------
  {
    const LevelGraph finer = build_level_graph(n + 1, std::max(opt.max_level, n + 1));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const VertexFunction u = detail::random_vertex_function(g, rng);
      const VertexFunction e = harmonic_extend_one(g, u, finer);
      const double e0 = discrete_energy(g, u);
      const double e1 = discrete_energy(finer, e);
      worst = std::max(worst, std::abs(e1 - e0) / std::max(1.0, e0));
    }
    rep.checks.push_back(
        detail::bound_check("energy-conservation", worst, 1e-12));
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const VertexFunction u = detail::random_vertex_function(g, rng);
      const double e = discrete_energy(g, u);
      const double ndu = form_norm2(g, derivation(g, u));
      worst = std::max(worst, std::abs(e - ndu) / std::max(1.0, e));
    }
    rep.checks.push_back(
        detail::bound_check("derivation-isometry", worst, 1e-14));
  }
  {
    const HarmonicBasis basis = harmonic_basis();
    const LevelGraph g0 = build_level_graph(0);
    const VertexFunction h1 =
        boundary_function(g0, basis.h1.cast<Complex>());
    const VertexFunction h2 =
        boundary_function(g0, basis.h2.cast<Complex>());
    const double dev = std::max(
        {std::abs(discrete_energy(g0, h1) - 1.0),
         std::abs(discrete_energy(g0, h2) - 1.0),
         std::abs(discrete_energy(g0, h1, h2))});
    rep.checks.push_back(
        detail::bound_check("harmonic-basis-orthonormal", dev, 1e-14));
  }

  // -- kusuoka ----------------------------------------------------------------
  {
    const auto parents = level_cell_table(std::max(0, n - 1));
    const auto children = level_cell_table(std::max(1, n));
    double worst = 0.0;
    for (size_t i = 0; i < parents.size(); ++i) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += children[3 * i + j].mass;
      worst = std::max(worst, std::abs(s - parents[i].mass));
    }
    rep.checks.push_back(
        detail::bound_check("kusuoka-mass-additivity", worst, 1e-12));
  }
  {
    const auto table = level_cell_table(n);
    Mat2 total = Mat2::Zero();
    double worst_trace = 0.0, worst_psd = 0.0, total_mass = 0.0;
    for (const auto& c : table) {
      total += c.mass * c.z;
      total_mass += c.mass;
      worst_trace = std::max(worst_trace, std::abs(c.z.trace() - 1.0));
      worst_psd = std::max(worst_psd, -symmetric_eigenvalues(c.z).first);
    }
    const double partition_dev =
        (total - Mat2::Identity()).cwiseAbs().maxCoeff();
    rep.checks.push_back(
        detail::bound_check("kusuoka-partition-identity", partition_dev, 1e-12));
    rep.checks.push_back(
        detail::bound_check("kusuoka-unit-trace", worst_trace, 1e-12));
    rep.checks.push_back(detail::bound_check("kusuoka-psd", worst_psd, 1e-12));
    rep.checks.push_back(detail::bound_check(
        "kusuoka-total-mass", std::abs(total_mass - 2.0), 1e-12));
  }
  {
    const Word w(std::string(static_cast<size_t>(n), '1'));
    const CellData cd = cell_data(w);
    const double expect = 1.0 / (std::pow(9.0, n) + 1.0);
    rep.checks.push_back(detail::bound_check(
        "kusuoka-repeated-letter-eigenvalue",
        std::abs(symmetric_eigenvalues(cd.z).first - expect), 1e-10));
  }
  {
    rep.checks.push_back(detail::bound_check(
        "vertex-mass-total", std::abs(m.m.sum() - 2.0), 1e-12));
  }

  // -- forms ------------------------------------------------------------------
  {
    EdgeForm w{g.level(), Eigen::VectorXcd(g.num_edges())};
    for (int e = 0; e < g.num_edges(); ++e) w.values[e] = rng.complex_normal();
    const VertexFunction dw = codifferential(g, m, w);
    double worst = 0.0;
    // adjointness against the full vertex basis
    for (int v = 0; v < g.num_vertices(); ++v) {
      Complex lhs = m.m[v] * dw.values[v];
      Complex rhs = 0.0;
      for (int e = 0; e < g.num_edges(); ++e) {
        const auto& er = g.edges()[e];
        if (er.head == v) rhs += g.conductance() * w.values[e];
        if (er.tail == v) rhs -= g.conductance() * w.values[e];
      }
      worst = std::max(worst, std::abs(lhs + rhs));
    }
    rep.checks.push_back(detail::bound_check("adjointness", worst, 1e-13));

    const VertexFunction gamma = pairing_density(g, m, w, w);
    double sum = 0.0;
    for (int v = 0; v < g.num_vertices(); ++v)
      sum += m.m[v] * gamma.values[v].real();
    rep.checks.push_back(detail::bound_check(
        "density-mass-sum", std::abs(sum - form_norm2(g, w)) /
                                std::max(1.0, form_norm2(g, w)),
        1e-13));
  }
  {
    const VertexFunction f = detail::random_vertex_function(g, rng);
    const VertexFunction h = detail::random_vertex_function(g, rng);
    VertexFunction fh{g.level(), f.values.cwiseProduct(h.values)};
    const EdgeForm lhs = derivation(g, fh);
    const EdgeForm t1 = pointwise_product(g, f, derivation(g, h));
    const EdgeForm t2 = pointwise_product(g, h, derivation(g, f));
    const double dev =
        (lhs.values - t1.values - t2.values).cwiseAbs().maxCoeff();
    rep.checks.push_back(detail::bound_check("derivation-leibniz", dev, 1e-13));
  }
  {
    // product rule for the codifferential with a real vector field
    const Eigen::VectorXd a = detail::random_real_edge(g, rng);
    const EdgeForm af = as_edge_form(g, a);
    const VertexFunction f = detail::random_vertex_function(g, rng);
    const VertexFunction lhs =
        codifferential(g, m, pointwise_product(g, f, af));
    const VertexFunction da = codifferential(g, m, af);
    VertexFunction fconj{g.level(), f.values.conjugate()};
    const VertexFunction pairing =
        pairing_density(g, m, af, derivation(g, fconj));
    double dev = 0.0;
    for (int v = 0; v < g.num_vertices(); ++v)
      dev = std::max(dev,
                     std::abs(lhs.values[v] - f.values[v] * da.values[v] -
                              pairing.values[v]));
    rep.checks.push_back(
        detail::bound_check("codifferential-leibniz", dev, 1e-13));
  }
  {
    const OperatorMatrix lap = energy_laplacian(g, m);
    const VertexFunction u = detail::random_vertex_function(g, rng);
    Eigen::VectorXcd uflat(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v)
      uflat[v] = u.values[v] * std::sqrt(m.m[v]);
    const double quad = -std::real(uflat.dot(lap.mat * uflat));
    const double e = discrete_energy(g, u);
    rep.checks.push_back(detail::bound_check(
        "energy-laplacian-form", std::abs(quad - e) / std::max(1.0, e), 1e-13));
  }
  {
    EdgeForm w{g.level(), Eigen::VectorXcd(g.num_edges())};
    for (int e = 0; e < g.num_edges(); ++e) w.values[e] = rng.complex_normal();
    const HodgeParts parts = hodge_decompose(g, m, w, opt.solver_tol);
    const double ortho =
        std::abs(form_inner(g, parts.exact, parts.harmonic_part)) /
        std::max(1.0, form_norm2(g, w));
    rep.checks.push_back(
        detail::bound_check("hodge-orthogonality", ortho, 1e-10));
    rep.checks.push_back(
        detail::bound_check("hodge-residual", parts.residual, opt.solver_tol));
  }

  // -- dirac ------------------------------------------------------------------
  {
    const DiracOperator d = assemble_dirac(g, m);
    rep.checks.push_back(detail::bound_check(
        "dirac-hermiticity", d.op.hermiticity_residual(), 1e-15));
    const DiracSquareReport sq = dirac_square_check(d, g, m);
    rep.checks.push_back(detail::bound_check("dirac-square-blocks",
                                             sq.max_deviation(), sq.tol));
    if (d.op.dim() <= 4000) {
      const SpectrumReport sp = hermitian_eigen(d.op);
      rep.checks.push_back(detail::bound_check(
          "dirac-spectrum-symmetry", spectrum_negation_defect(sp.eigenvalues),
          1e-9));
      const int cycles = g.num_edges() - g.num_vertices() + 1;
      const int kd = detail::kernel_dimension(d.op);
      CheckResult c;
      c.name = "dirac-kernel-dimension";
      c.value = kd;
      c.threshold = 1 + cycles;
      c.pass = kd == 1 + cycles;
      c.note = "expected 1+" + std::to_string(cycles);
      rep.checks.push_back(c);
    }
  }

  // -- quadratures --------------------------------------------------------------
  {
    const double q =
        kigami_quadrature(1, [](const Vec2&) { return Vec2(1.0, 0.0); });
    rep.checks.push_back(detail::bound_check("kigami-linear-level1",
                                             std::abs(q - 0.82), 1e-10));
  }
  {
    const Vec2 c(rng.normal(), rng.normal());
    const Vec2 d(rng.normal(), rng.normal());
    const double q = divergence_quadrature(
        n, [](const Vec2&) { return 1.0; }, [&](const Vec2&) { return c; },
        [&](const Vec2&) { return d; });
    rep.checks.push_back(detail::bound_check(
        "divergence-linear-identity", std::abs(q + c.dot(d)), 1e-12));
  }
  {
    const QuadratureGrid grid = quadrature_grid(n);
    double worst = 0.0;
    for (const auto& cell : grid.cells) {
      const double v = laplacian_quadrature(
          cell, [](const Vec2&) { return Mat2(2.0 * Mat2::Identity()); });
      worst = std::max(worst, std::abs(v - 2.0));
    }
    rep.checks.push_back(
        detail::bound_check("laplacian-quadrature-unit", worst, 1e-12));
  }

  // -- magnetic / klmn -----------------------------------------------------------
  {
    const int lev = std::min(n, 3);
    const LevelGraph gk = build_level_graph(lev, opt.max_level);
    const MassVector mk = vertex_masses(gk);
    int failures = 0;
    double margin = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      PotentialPair p = zero_potential(gk);
      p.a = detail::random_real_edge(gk, rng);
      p.V = detail::random_real_vertex(gk, rng);
      const VertexFunction f = detail::random_vertex_function(gk, rng);
      for (double eps : {0.1, 1.0}) {
        const KlmnReport r = klmn_check(gk, mk, p, f, eps);
        if (!r.pass) ++failures;
        margin = std::max(margin, r.lhs / r.rhs);
      }
    }
    CheckResult c;
    c.name = "klmn-bound";
    c.value = failures;
    c.threshold = 0.0;
    c.pass = failures == 0;
    c.note = "worst lhs/rhs = " + fmt17(margin);
    rep.checks.push_back(c);
  }

  append_gauge_checks(rep, opt);
  return rep;
}

inline VerifyReport run_gauge_checks(const VerifyOptions& opt) {
  VerifyReport rep;
  append_gauge_checks(rep, opt);
  return rep;
}

/// Plain-text report; all numbers printed with full precision so repeated
/// runs are byte-identical.
inline std::string format_report(const VerifyReport& rep,
                                 const std::string& title,
                                 const VerifyOptions& opt) {
  std::ostringstream os;
  os << title << "\n";
  os << "level=" << opt.level << " seed=" << opt.seed
     << " solver_tol=" << fmt17(opt.solver_tol) << "\n";
  for (const auto& c : rep.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << fmt17(c.value)
       << " threshold=" << fmt17(c.threshold);
    if (!c.note.empty()) os << " (" << c.note << ")";
    os << "\n";
  }
  os << "RESULT " << (rep.all_pass() ? "PASS" : "FAIL") << " checks="
     << rep.checks.size() << "\n";
  return os.str();
}

}  // namespace sg
