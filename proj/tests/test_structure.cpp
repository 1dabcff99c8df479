#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "sg/structure.hpp"

using namespace sg;

TEST_CASE("word refinement") {
  const auto r0 = refine_cell(Word(""));
  CHECK(r0[0].str() == "1");
  CHECK(r0[1].str() == "2");
  CHECK(r0[2].str() == "3");
  const auto r1 = refine_cell(Word("2"));
  CHECK(r1[0].str() == "21");
  CHECK(r1[1].str() == "22");
  CHECK(r1[2].str() == "23");
  const auto r2 = refine_cell(Word("13"));
  CHECK(r2[0].str() == "131");
  CHECK(r2[1].str() == "132");
  CHECK(r2[2].str() == "133");
  CHECK_THROWS_AS(Word("14"), ContractViolation);
}

TEST_CASE("cell vertex coordinates") {
  const auto root = cell_vertex_coordinates(Word(""));
  CHECK(root[0].isApprox(Vec2(0.0, 0.0)));
  CHECK(root[1].isApprox(Vec2(1.0, 0.0)));
  CHECK(root[2].isApprox(Vec2(0.5, std::sqrt(3.0) / 2.0)));

  const auto c1 = cell_vertex_coordinates(Word("1"));
  CHECK(c1[0].isApprox(Vec2(0.0, 0.0)));
  CHECK(c1[1].isApprox(Vec2(0.5, 0.0)));
  CHECK(c1[2].isApprox(Vec2(0.25, std::sqrt(3.0) / 4.0)));

  const auto c12 = cell_vertex_coordinates(Word("12"));
  CHECK(c12[0].isApprox(Vec2(0.25, 0.0)));
  CHECK(c12[1].isApprox(Vec2(0.5, 0.0)));
  CHECK(c12[2].isApprox(Vec2(0.375, std::sqrt(3.0) / 8.0)));
}

TEST_CASE("graph sizes at small levels") {
  const LevelGraph g0 = build_level_graph(0);
  CHECK(g0.num_vertices() == 3);
  CHECK(g0.num_edges() == 3);
  CHECK(g0.num_cells() == 1);

  const LevelGraph g1 = build_level_graph(1);
  CHECK(g1.num_vertices() == 6);
  CHECK(g1.num_edges() == 9);
  CHECK(g1.num_cells() == 3);

  const LevelGraph g4 = build_level_graph(4);
  CHECK(g4.num_vertices() == 123);
  CHECK(g4.num_edges() == 243);
}

TEST_CASE("size formulas and euler count up to level 5") {
  for (int n = 0; n <= 5; ++n) {
    const LevelGraph g = build_level_graph(n);
    const long e = static_cast<long>(std::llround(std::pow(3.0, n + 1)));
    CHECK(g.num_edges() == e);
    CHECK(g.num_vertices() == (e + 3) / 2);
    CHECK(g.num_cells() == e / 3);
    // independent cycles
    CHECK(g.num_edges() - g.num_vertices() + 1 == (e - 1) / 2);
    // connectivity via union-find would be overkill: every cell shares a
    // vertex with its siblings by construction; check each edge is in one cell
    for (const auto& cell : g.cells()) {
      int count = 0;
      for (const auto& ed : g.edges())
        if (&g.cells()[ed.cell] == &cell) ++count;
      CHECK(count == 3);
    }
  }
}

TEST_CASE("degrees: boundary 2, interior 4") {
  for (int n : {0, 1, 2, 3, 4}) {
    const LevelGraph g = build_level_graph(n);
    const auto& bd = g.boundary();
    for (const auto& v : g.vertices()) {
      const bool is_bd = v.id == bd[0] || v.id == bd[1] || v.id == bd[2];
      CHECK(g.degree(v.id) == (is_bd ? 2 : 4));
    }
  }
}

TEST_CASE("vertex nesting across levels") {
  for (int n = 0; n <= 4; ++n) {
    const LevelGraph g = build_level_graph(n);
    const LevelGraph finer = build_level_graph(n + 1);
    for (const auto& v : g.vertices()) CHECK(finer.vertex_id(v.point) >= 0);
  }
}

TEST_CASE("edges belong to exactly one cell; each cell borders 3 vertices") {
  const LevelGraph g = build_level_graph(3);
  for (const auto& cell : g.cells()) {
    const std::set<int> ids(cell.v.begin(), cell.v.end());
    CHECK(ids.size() == 3);
  }
  // shared vertices join exactly two cells (except boundary corners)
  std::vector<int> cell_count(g.num_vertices(), 0);
  for (const auto& cell : g.cells())
    for (int vid : cell.v) ++cell_count[vid];
  for (const auto& v : g.vertices()) {
    const auto& bd = g.boundary();
    const bool is_bd = v.id == bd[0] || v.id == bd[1] || v.id == bd[2];
    CHECK(cell_count[v.id] == (is_bd ? 1 : 2));
  }
}

TEST_CASE("ids stable across calls") {
  const LevelGraph a = build_level_graph(3);
  const LevelGraph b = build_level_graph(3);
  for (int i = 0; i < a.num_vertices(); ++i)
    CHECK(a.vertices()[i].point == b.vertices()[i].point);
  for (int i = 0; i < a.num_edges(); ++i) {
    CHECK(a.edges()[i].tail == b.edges()[i].tail);
    CHECK(a.edges()[i].head == b.edges()[i].head);
  }
}

TEST_CASE("level cap") {
  CHECK_THROWS_AS(build_level_graph(11), ResourceLimitError);
  CHECK_THROWS_AS(build_level_graph(3, 2), ResourceLimitError);
  CHECK_NOTHROW(build_level_graph(2, 2));
}

TEST_CASE("conductance is the renormalized weight") {
  const LevelGraph g = build_level_graph(3);
  CHECK(g.conductance() == Catch::Approx(std::pow(5.0 / 3.0, 3)).epsilon(1e-15));
}
