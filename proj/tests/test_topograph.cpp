#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bds/invariants.hpp"
#include "bds/topograph.hpp"
#include "oracles.hpp"

using namespace bds;
using namespace bds::testing;

TEST_CASE("build_graph on S1") {
  System sys = s1();
  TopoGraph g = build_graph(sys);
  REQUIRE(g.vertices.size() == 2);
  REQUIRE(g.edges.size() == 2);
  int u = g.vertex_index(Ultrafilter::at_atom(0));
  int v = g.vertex_index(Ultrafilter::at_atom(1));
  // a: d=u, r=u ; b: d=v, r=u
  for (const auto& e : g.edges) {
    if (g.labels[e.label] == "a") {
      CHECK(e.src == u);
      CHECK(e.dst == u);
    } else {
      CHECK(e.src == v);
      CHECK(e.dst == u);
    }
  }
}

TEST_CASE("build_graph on the one-point-compactified example") {
  // N u {w} encoded over Z with w = -1: the single action sends {w} to the
  // cofinite copy of N and kills everything else.
  Algebra alg = Algebra::finite_cofinite(Universe::Integers);
  std::map<std::int64_t, BoolElem> exc;
  exc[-1] = BoolElem::cofinite({-1});
  System sys = make_system(alg, {"a"}, {ActionSpec::kill_tail(exc)});
  REQUIRE(validate_system(sys).ok());
  TopoGraph g = build_graph(sys);
  int w = g.vertex_index(Ultrafilter::at_index(-1));
  REQUIRE(w >= 0);
  // every edge, including the one at infinity, points to v_w
  CHECK_FALSE(g.edges.empty());
  bool saw_infinity_edge = false;
  for (const auto& e : g.edges) {
    CHECK(e.dst == w);
    if (g.vertices[e.src] == Ultrafilter::at_infinity()) saw_infinity_edge = true;
  }
  CHECK(saw_infinity_edge);
  // v_w itself carries no edge: R_a does not contain {w}
  for (const auto& e : g.edges) CHECK(e.src != w);
}

TEST_CASE("build_graph on S4 reproduces the edge data at infinity") {
  System sys = s4();
  TopoGraph g = build_graph(sys);
  int inf = g.vertex_index(Ultrafilter::at_infinity());
  REQUIRE(inf >= 0);
  int n_inf_edges = 0;
  for (const auto& e : g.edges)
    if (e.src == inf) {
      ++n_inf_edges;
      CHECK(e.dst == inf);
      CHECK(g.labels[e.label] != "a");  // R_a = {0} is finite
    }
  CHECK(n_inf_edges == 2);  // b and c

  int v0 = g.vertex_index(Ultrafilter::at_index(0));
  int v1 = g.vertex_index(Ultrafilter::at_index(1));
  int vm1 = g.vertex_index(Ultrafilter::at_index(-1));
  bool a_loop = false;
  for (const auto& e : g.edges) {
    if (g.labels[e.label] == "a") {
      CHECK(e.src == v0);
      CHECK(e.dst == v0);
      a_loop = true;
    }
    if (g.labels[e.label] == "b" && e.src == v1) CHECK(e.dst == v0);
    if (g.labels[e.label] == "c" && e.src == vm1) CHECK(e.dst == v0);
  }
  CHECK(a_loop);
}

TEST_CASE("edge coherence: r(e) in N_A iff d(e) in N_theta(A)") {
  std::mt19937_64 rng(401);
  std::vector<System> corpus = {s1(), s2(), s3()};
  for (int i = 0; i < 40; ++i) corpus.push_back(random_system(rng));
  for (const auto& sys : corpus) {
    TopoGraph g = build_graph(sys);
    std::uint64_t top = sys.algebra.top().mask();
    for (const auto& e : g.edges)
      for (std::uint64_t m = 0; m <= top; ++m) {
        if ((m & ~top) != 0) continue;
        BoolElem a = sys.algebra.of_mask(m);
        BoolElem img = apply_label(sys, e.label, a);
        CHECK(sys.algebra.uf_contains(g.vertices[e.dst], a) ==
              sys.algebra.uf_contains(g.vertices[e.src], img));
      }
  }
}

TEST_CASE("vertex classification") {
  System sys = s1();
  TopoGraph g = build_graph(sys);
  auto cls = classify_vertices(sys, g);
  CHECK(cls[g.vertex_index(Ultrafilter::at_atom(0))] == VertexClass::Rg);   // u
  CHECK(cls[g.vertex_index(Ultrafilter::at_atom(1))] == VertexClass::Sce);  // v

  System two = s2();
  TopoGraph g2 = build_graph(two);
  CHECK(classify_vertices(two, g2)[0] == VertexClass::Rg);

  // single atom, no labels: a source
  Algebra alg = Algebra::finite_atoms({"z"});
  System empty = make_system(alg, {}, {});
  TopoGraph g3 = build_graph(empty);
  CHECK(classify_vertices(empty, g3)[0] == VertexClass::Sce);

  // classification against regularity, atom by atom
  std::mt19937_64 rng(402);
  for (int i = 0; i < 60; ++i) {
    System r = random_system(rng);
    TopoGraph gr = build_graph(r);
    auto c = classify_vertices(r, gr);
    for (std::size_t v = 0; v < gr.vertices.size(); ++v)
      CHECK((c[v] == VertexClass::Rg) ==
            is_regular(r, r.algebra.atom(gr.vertices[v].atom)));
  }

  // at infinity: shifts make it regular, kill-only tails make it a source
  TopoGraph g4 = build_graph(s4());
  auto c4 = classify_vertices(s4(), g4);
  CHECK(c4[g4.vertex_index(Ultrafilter::at_infinity())] == VertexClass::Rg);
}

TEST_CASE("quotient graphs are the surviving-vertex subgraphs") {
  std::mt19937_64 rng(403);
  for (int trial = 0; trial < 60; ++trial) {
    System sys = random_system(rng);
    TopoGraph g = build_graph(sys);
    for (const auto& h : enumerate_hs_ideals(sys).ideals) {
      if (ideal_is_everything(sys.algebra, h)) continue;
      QuotientSystem q = quotient_system(sys, h);
      TopoGraph gq = build_graph(q.system);
      // edges of the original with a surviving d-vertex
      std::vector<std::tuple<int, int, int>> expected, got;
      for (const auto& e : g.edges) {
        int src = q.map.atom_target[g.vertices[e.src].atom];
        if (src < 0) continue;
        int dst = q.map.atom_target[g.vertices[e.dst].atom];
        REQUIRE(dst >= 0);  // hereditary ideals keep ranges inside
        expected.push_back({e.label, src, dst});
      }
      for (const auto& e : gq.edges)
        got.push_back({e.label, static_cast<int>(gq.vertices[e.src].atom),
                       static_cast<int>(gq.vertices[e.dst].atom)});
      std::sort(expected.begin(), expected.end());
      std::sort(got.begin(), got.end());
      CHECK(expected == got);
    }
  }
}

TEST_CASE("boundary paths of the fixtures") {
  BoundaryPathResult r3 = boundary_paths(s3());
  REQUIRE_FALSE(r3.infinite);
  REQUIRE(r3.paths.size() == 1);
  CHECK(r3.paths[0].kind == BoundaryPath::Kind::EventuallyPeriodic);
  CHECK(r3.paths[0].prefix.empty());
  CHECK(r3.paths[0].period == Word{0});
  CHECK(r3.paths[0].anchor == 0);

  CHECK(boundary_paths(s2(), 100).infinite);  // binary branching
  // S1 pumps its a-loop before exiting through b: the total count is infinite.
  CHECK(boundary_paths(s1()).infinite);
}

TEST_CASE("boundary paths of a finite path space") {
  // u --l--> v, v dead: continuations run v -> u, so paths end at the
  // singular vertex v.
  Algebra alg = Algebra::finite_atoms({"u", "v"});
  std::vector<BoolElem> img = {alg.of_atom_names({"v"}), alg.empty_elem()};
  System sys = make_system(alg, {"l"}, {ActionSpec::finite(img)});
  BoundaryPathResult r = boundary_paths(sys);
  REQUIRE_FALSE(r.infinite);
  // empty path at v, plus the one-step path anchored at u
  REQUIRE(r.paths.size() == 2);
  CHECK(r.paths[0].kind == BoundaryPath::Kind::Finite);
  CHECK(r.paths[0].prefix.empty());
  CHECK(r.paths[1].prefix == Word{0});
  for (const auto& p : r.paths) CHECK(p.terminal == 1);
}

TEST_CASE("independent K-theory oracle on single-vertex graphs") {
  // one vertex, one loop -> K0 = Z, K1 = Z
  TopoGraph g1;
  g1.vertices = {Ultrafilter::at_atom(0)};
  g1.vertex_names = {"x"};
  g1.labels = {"a"};
  g1.edges = {{0, 0, 0}};
  KGroups k1 = graph_ktheory_oracle(g1);
  CHECK(k1.k0.rank == 1);
  CHECK(k1.k0.torsion.empty());
  CHECK(k1.k1.rank == 1);

  // one vertex, two loops -> K0 = 0, K1 = 0
  TopoGraph g2 = g1;
  g2.labels = {"a", "b"};
  g2.edges = {{0, 0, 0}, {1, 0, 0}};
  KGroups k2 = graph_ktheory_oracle(g2);
  CHECK(k2.k0.rank == 0);
  CHECK(k2.k0.torsion.empty());
  CHECK(k2.k1.rank == 0);

  // one vertex, no edges: singular vertex, empty domain into Z
  TopoGraph g3 = g1;
  g3.labels = {};
  g3.edges = {};
  KGroups k3 = graph_ktheory_oracle(g3);
  CHECK(k3.k0.rank == 1);
  CHECK(k3.k1.rank == 0);
}

TEST_CASE("dot export is deterministic and matches the d->r convention") {
  System sys = s3();
  std::string d1 = to_dot(sys);
  std::string d2 = to_dot(sys);
  CHECK(d1 == d2);
  CHECK(d1.find("v0 -> v0 [label=\"a\"]") != std::string::npos);

  std::string s = to_dot(s1());
  // b: d=v, r=u so the arrow runs v -> u; u is v0, v is v1 in atom order
  CHECK(s.find("v1 -> v0 [label=\"b\"]") != std::string::npos);
  CHECK(s.find("v0 -> v0 [label=\"a\"]") != std::string::npos);
  CHECK(s.find("shape=box") != std::string::npos);      // the singular v
  CHECK(s.find("shape=ellipse") != std::string::npos);  // the regular u

  Algebra alg = Algebra::finite_atoms(std::vector<std::string>{});
  System empty = make_system(alg, {}, {});
  CHECK(to_dot(empty) == "digraph bds {\n}\n");
}
