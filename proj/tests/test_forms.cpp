#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sg/forms.hpp"
#include "sg/spectral.hpp"

using namespace sg;

namespace {

VertexFunction random_function(const LevelGraph& g, Rng& rng) {
  VertexFunction u{g.level(), Eigen::VectorXcd(g.num_vertices())};
  for (int i = 0; i < g.num_vertices(); ++i) u.values[i] = rng.complex_normal();
  return u;
}

EdgeForm random_form(const LevelGraph& g, Rng& rng) {
  EdgeForm w{g.level(), Eigen::VectorXcd(g.num_edges())};
  for (int e = 0; e < g.num_edges(); ++e) w.values[e] = rng.complex_normal();
  return w;
}

}  // namespace

TEST_CASE("derivation at level 0") {
  const LevelGraph g0 = build_level_graph(0);
  const VertexFunction u = boundary_function(g0, BoundaryTriple(1.0, 0.0, 0.0));
  const EdgeForm du = derivation(g0, u);
  // cyclic orientations (v1->v2),(v2->v3),(v3->v1)
  CHECK(du.values[0] == Complex(-1.0, 0.0));
  CHECK(du.values[1] == Complex(0.0, 0.0));
  CHECK(du.values[2] == Complex(1.0, 0.0));

  const VertexFunction c = boundary_function(g0, BoundaryTriple(2.0, 2.0, 2.0));
  CHECK(derivation(g0, c).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("derivation isometry onto the energy") {
  Rng rng(7);
  for (int n = 0; n <= 5; ++n) {
    const LevelGraph g = build_level_graph(n);
    for (int t = 0; t < 5; ++t) {
      const VertexFunction u = random_function(g, rng);
      const double e = discrete_energy(g, u);
      const double nn = form_norm2(g, derivation(g, u));
      CHECK(std::abs(e - nn) <= 1e-14 * std::max(1.0, e));
    }
  }
}

TEST_CASE("form inner product: harmonic differentials stay orthonormal") {
  const LevelGraph g0 = build_level_graph(0);
  const HarmonicBasis b = harmonic_basis();
  for (int n = 0; n <= 4; ++n) {
    const LevelGraph g = build_level_graph(n);
    const VertexFunction h1 =
        harmonic_extend(g0, boundary_function(g0, b.h1.cast<Complex>()), n);
    const VertexFunction h2 =
        harmonic_extend(g0, boundary_function(g0, b.h2.cast<Complex>()), n);
    const EdgeForm d1 = derivation(g, h1);
    const EdgeForm d2 = derivation(g, h2);
    CHECK(std::abs(form_inner(g, d1, d2)) < 1e-13);
    CHECK(std::abs(form_inner(g, d1, d1).real() - 1.0) < 1e-13);
  }
}

TEST_CASE("form inner product is positive definite and sesquilinear") {
  const LevelGraph g = build_level_graph(2);
  Rng rng(11);
  const EdgeForm w = random_form(g, rng);
  const EdgeForm e = random_form(g, rng);
  CHECK(form_inner(g, w, w).real() > 0.0);
  CHECK(std::abs(form_inner(g, w, w).imag()) < 1e-14);
  // conjugate symmetry
  const Complex a = form_inner(g, w, e), b = form_inner(g, e, w);
  CHECK(std::abs(a - std::conj(b)) < 1e-13);
  // zero form
  EdgeForm z{g.level(), Eigen::VectorXcd::Zero(g.num_edges())};
  CHECK(form_inner(g, z, z) == Complex(0.0, 0.0));
  // level mismatch
  EdgeForm bad{1, Eigen::VectorXcd::Zero(9)};
  CHECK_THROWS_AS(form_inner(g, w, bad), ContractViolation);
}

TEST_CASE("mean action: constants, Leibniz, contraction") {
  const LevelGraph g = build_level_graph(3);
  Rng rng(13);
  const EdgeForm w = random_form(g, rng);
  VertexFunction cst{
      g.level(),
      Eigen::VectorXcd::Constant(g.num_vertices(), Complex(2.5, -1.0))};
  const EdgeForm cw = pointwise_product(g, cst, w);
  CHECK((cw.values - Complex(2.5, -1.0) * w.values).cwiseAbs().maxCoeff() <
        1e-14);

  const VertexFunction f = random_function(g, rng);
  const VertexFunction h = random_function(g, rng);
  VertexFunction fh{g.level(), f.values.cwiseProduct(h.values)};
  const EdgeForm lhs = derivation(g, fh);
  const EdgeForm rhs1 = pointwise_product(g, f, derivation(g, h));
  const EdgeForm rhs2 = pointwise_product(g, h, derivation(g, f));
  CHECK((lhs.values - rhs1.values - rhs2.values).cwiseAbs().maxCoeff() < 1e-13);

  const EdgeForm fw = pointwise_product(g, f, w);
  CHECK(std::sqrt(form_norm2(g, fw)) <=
        f.values.cwiseAbs().maxCoeff() * std::sqrt(form_norm2(g, w)) *
            (1.0 + 1e-12));
}

TEST_CASE("codifferential of the level-0 circulation vanishes") {
  const LevelGraph g0 = build_level_graph(0);
  const MassVector m0 = vertex_masses(g0);
  // the cell cycle (v1->v2),(v2->v3),(v3->v1) with unit values circulates
  EdgeForm circ{0, Eigen::VectorXcd::Constant(3, Complex(1.0, 0.0))};
  const VertexFunction d = codifferential(g0, m0, circ);
  CHECK(d.values.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("codifferential is minus the adjoint of the derivation") {
  Rng rng(19);
  for (int n = 0; n <= 3; ++n) {
    const LevelGraph g = build_level_graph(n);
    const MassVector m = vertex_masses(g);
    const EdgeForm w = random_form(g, rng);
    const VertexFunction dw = codifferential(g, m, w);
    // test against the full vertex delta basis
    for (int v = 0; v < g.num_vertices(); ++v) {
      VertexFunction phi{g.level(), Eigen::VectorXcd::Zero(g.num_vertices())};
      phi.values[v] = 1.0;
      const Complex lhs = m.m[v] * dw.values[v];  // <d*w, phi>_m
      const Complex rhs = -form_inner(g, w, derivation(g, phi));
      CHECK(std::abs(lhs - rhs) < 1e-13);
    }
  }
}

TEST_CASE("level-0 energy Laplacian is 3/2 of the triangle Laplacian") {
  const LevelGraph g0 = build_level_graph(0);
  const MassVector m0 = vertex_masses(g0);
  Rng rng(23);
  const VertexFunction u = random_function(g0, rng);
  const VertexFunction lap = codifferential(g0, m0, derivation(g0, u));
  for (int v = 0; v < 3; ++v) {
    Complex graph_lap = -2.0 * u.values[v];
    for (int o = 0; o < 3; ++o)
      if (o != v) graph_lap += u.values[o];
    CHECK(std::abs(lap.values[v] - 1.5 * graph_lap) < 1e-14);
  }
}

TEST_CASE("pairing density: support, mass sum, product rule") {
  const LevelGraph g = build_level_graph(2);
  const MassVector m = vertex_masses(g);
  Rng rng(29);

  // single-edge form
  EdgeForm sngl{g.level(), Eigen::VectorXcd::Zero(g.num_edges())};
  sngl.values[4] = 1.0;
  const VertexFunction dens = pairing_density(g, m, sngl, sngl);
  const auto& er = g.edges()[4];
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (v == er.tail || v == er.head)
      CHECK(std::abs(dens.values[v] - g.conductance() / (2.0 * m.m[v])) <
            1e-13);
    else
      CHECK(std::abs(dens.values[v]) == 0.0);
  }

  const EdgeForm w = random_form(g, rng);
  const VertexFunction gamma = pairing_density(g, m, w, w);
  double sum = 0.0;
  for (int v = 0; v < g.num_vertices(); ++v)
    sum += m.m[v] * gamma.values[v].real();
  CHECK(std::abs(sum - form_norm2(g, w)) < 1e-12);

  // product rule for the codifferential: d*(f a) = f d*a + <a, d conj(f)>
  const VertexFunction f = random_function(g, rng);
  EdgeForm a{g.level(), Eigen::VectorXcd(g.num_edges())};
  for (int e = 0; e < g.num_edges(); ++e) a.values[e] = rng.normal();
  const VertexFunction lhs = codifferential(g, m, pointwise_product(g, f, a));
  const VertexFunction da = codifferential(g, m, a);
  VertexFunction fc{g.level(), f.values.conjugate()};
  const VertexFunction pair = pairing_density(g, m, a, derivation(g, fc));
  for (int v = 0; v < g.num_vertices(); ++v)
    CHECK(std::abs(lhs.values[v] - f.values[v] * da.values[v] -
                   pair.values[v]) < 1e-13);
}

TEST_CASE("energy Laplacian: spectrum, kernel, quadratic form") {
  const LevelGraph g0 = build_level_graph(0);
  const MassVector m0 = vertex_masses(g0);
  const OperatorMatrix lap0 = energy_laplacian(g0, m0);
  CHECK(lap0.hermiticity_residual() == 0.0);
  const SpectrumReport sp = hermitian_eigen(lap0);
  CHECK(std::abs(sp.eigenvalues[0] + 4.5) < 1e-10);
  CHECK(std::abs(sp.eigenvalues[1] + 4.5) < 1e-10);
  CHECK(std::abs(sp.eigenvalues[2]) < 1e-10);

  Rng rng(31);
  for (int n : {1, 2, 3}) {
    const LevelGraph g = build_level_graph(n);
    const MassVector m = vertex_masses(g);
    const OperatorMatrix lap = energy_laplacian(g, m);

    // constants are in the kernel (flat basis: sqrt(m))
    Eigen::VectorXcd ones(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) ones[v] = std::sqrt(m.m[v]);
    CHECK((lap.mat * ones).cwiseAbs().maxCoeff() < 1e-12);

    // quadratic form equals the energy
    const VertexFunction u = random_function(g, rng);
    Eigen::VectorXcd uflat(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v)
      uflat[v] = u.values[v] * std::sqrt(m.m[v]);
    const double quad = -std::real(uflat.dot(lap.mat * uflat));
    const double e = discrete_energy(g, u);
    CHECK(std::abs(quad - e) <= 1e-13 * std::max(1.0, e));
  }
}

TEST_CASE("hodge decomposition of an exact form has no harmonic part") {
  const LevelGraph g = build_level_graph(3);
  const MassVector m = vertex_masses(g);
  Rng rng(37);
  const VertexFunction u = random_function(g, rng);
  const EdgeForm du = derivation(g, u);
  const HodgeParts parts = hodge_decompose(g, m, du);
  CHECK(std::sqrt(form_norm2(g, parts.harmonic_part)) < 1e-10);
  CHECK((parts.exact.values - du.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hodge decomposition: orthogonality, recomposition, dimensions") {
  Rng rng(41);
  for (int n = 0; n <= 4; ++n) {
    const LevelGraph g = build_level_graph(n);
    const MassVector m = vertex_masses(g);
    const EdgeForm w = random_form(g, rng);
    const HodgeParts parts = hodge_decompose(g, m, w);

    CHECK(std::abs(form_inner(g, parts.exact, parts.harmonic_part)) <
          1e-10 * std::max(1.0, form_norm2(g, w)));
    CHECK((parts.exact.values + parts.harmonic_part.values - w.values)
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    // harmonic-form dimension by rank of the derivation
    const Eigen::MatrixXd dbar(derivation_flat(g, m));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dbar);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    CHECK(rank == g.num_vertices() - 1);
    const int harmonic_dim = g.num_edges() - rank;
    CHECK(harmonic_dim == g.num_edges() - g.num_vertices() + 1);
  }
}

TEST_CASE("level-0 harmonic forms are the circulations") {
  const LevelGraph g0 = build_level_graph(0);
  const MassVector m0 = vertex_masses(g0);
  Rng rng(43);
  const EdgeForm w = random_form(g0, rng);
  const HodgeParts parts = hodge_decompose(g0, m0, w);
  // dim ker d* = 3 - 3 + 1 = 1, spanned by (1,1,1) on the cycle
  const Complex c = parts.harmonic_part.values[0];
  CHECK(std::abs(parts.harmonic_part.values[1] - c) < 1e-12);
  CHECK(std::abs(parts.harmonic_part.values[2] - c) < 1e-12);
  CHECK(codifferential(g0, m0, parts.harmonic_part)
            .values.cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("hodge solver reports failure on an impossible tolerance") {
  const LevelGraph g = build_level_graph(2);
  const MassVector m = vertex_masses(g);
  Rng rng(47);
  const EdgeForm w = random_form(g, rng);
  CHECK_THROWS_AS(hodge_decompose(g, m, w, 1e-30), NumericalError);
}

TEST_CASE("iterative hodge path matches the direct one") {
  const LevelGraph g = build_level_graph(3);
  const MassVector m = vertex_masses(g);
  Rng rng(53);
  const EdgeForm w = random_form(g, rng);
  const HodgeParts direct = hodge_decompose(g, m, w);
  const HodgeParts iterative =
      hodge_decompose(g, m, w, 1e-10, /*direct_threshold=*/4);
  CHECK((direct.exact.values - iterative.exact.values).cwiseAbs().maxCoeff() <
        1e-8);
}
