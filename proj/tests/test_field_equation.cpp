#include <stdexcept>
#include <string>
#include <vector>

#include "bphz/field_equation.hpp"
#include "bphz/sampling.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bphz;
using namespace testutil;

namespace {

// Wave vertex v0 and partner A each tied to their own spectator; after the
// fused edge goes the graph splits into disjoint fishes {v0,C} and {A,D},
// the overlap-correction scenario of the merge decomposition.
Graph wave_join() {
  Graph g;
  g.verts.push_back(make_vertex(g, "v0", 3));
  g.verts.push_back(make_vertex(g, "A", 3));
  g.verts.push_back(make_vertex(g, "C", 2));
  g.verts.push_back(make_vertex(g, "D", 2));
  g.verts[0].wave_slot = 0;
  add_edge(g, "v0", "A");  // the fused edge, slot 0 at both ends
  add_edge(g, "v0", "C");
  add_edge(g, "v0", "C");
  add_edge(g, "A", "D");
  add_edge(g, "A", "D");
  g.check_valid();
  g.verts[2].test_factor = parse_polynomial("x_C_0", g, 2);
  g.verts[3].test_factor = parse_polynomial("x_D_0^2", g, 3);
  return g;
}

// Wave vertex and partner both tied to the same spectator; the reduced graph
// is a chain of two fishes whose union part raises its degree 0 -> 4 under
// fusion.
Graph wave_raise() {
  Graph g;
  g.verts.push_back(make_vertex(g, "v0", 3));
  g.verts.push_back(make_vertex(g, "A", 3));
  g.verts.push_back(make_vertex(g, "C", 4));
  g.verts[0].wave_slot = 0;
  add_edge(g, "v0", "A");
  add_edge(g, "v0", "C");
  add_edge(g, "v0", "C");
  add_edge(g, "A", "C");
  add_edge(g, "A", "C");
  g.check_valid();
  g.verts[2].test_factor = parse_polynomial("x_C_0^5", g, 2);
  return g;
}

// A lone smeared wave field: after fusion the wave vertex carries nothing
// but its test factor, so no part ever changes.
Graph wave_linear() {
  Graph g;
  g.verts.push_back(make_vertex(g, "v0", 1));
  g.verts.push_back(make_vertex(g, "A", 4));
  g.verts.push_back(make_vertex(g, "B", 2));
  g.verts[0].wave_slot = 0;
  add_edge(g, "v0", "A");
  add_edge(g, "A", "B");
  add_edge(g, "A", "B");
  g.check_valid();
  g.verts[0].test_factor = parse_polynomial("x_v0_0^2", g, 0);
  g.verts[2].test_factor = parse_polynomial("x_B_0^2", g, 2);
  return g;
}

// Fish with a wave slot at one end; fusing it closes the other edge into a
// self-loop.
Graph wave_fish() {
  Graph g;
  g.verts.push_back(make_vertex(g, "a", 2));
  g.verts.push_back(make_vertex(g, "b", 2));
  g.verts[0].wave_slot = 0;
  add_edge(g, "a", "b");
  add_edge(g, "a", "b");
  g.check_valid();
  g.verts[0].test_factor = parse_polynomial("x_a_0", g, 0);
  return g;
}

}  // namespace

TEST_CASE("fusing consumes the edge and the two contracted slots") {
  Graph g = wave_join();
  FusionRecord rec = fuse_wave_edge(g, 0, 0);

  CHECK(rec.wave_vertex == 0);
  CHECK(rec.wave_slot == 0);
  CHECK(rec.wave_edge == 0);
  CHECK(rec.partner == 1);
  CHECK(rec.partner_slot == 0);

  CHECK(rec.reduced.edges.size() == 4);
  CHECK(rec.reduced.verts[0].fields == 2);
  CHECK(rec.reduced.verts[1].fields == 2);
  CHECK_FALSE(rec.reduced.verts[0].wave_slot.has_value());
  CHECK(rec.reduced.edges[0].src_slot == 0);  // was slot 1 before the shift
  CHECK(rec.reduced.limit_set == std::set<int>{0, 1});

  CHECK(rec.fused.n() == 3);
  CHECK(rec.merged == 2);
  CHECK(rec.fused.verts[rec.merged].fields == 4);
  CHECK(rec.fused.limit_set.empty());
  CHECK(rec.vm.kind == VertexMap::Kind::Fusion);
  CHECK(rec.vm.forward.at("v0") == rec.vm.merged_id);
  CHECK(rec.vm.forward.at("A") == rec.vm.merged_id);
  CHECK(rec.vm.forward.at("C") == "C");
}

TEST_CASE("the degree ledger matches the merged monomial dimension") {
  struct Row {
    Graph g;
    int fused_delta;
  };
  std::vector<Row> rows;
  rows.push_back({wave_join(), 4});    // (3+2) + 3 - 4
  rows.push_back({wave_raise(), 4});
  rows.push_back({wave_linear(), 3});  // (1+2) + 4 - 4
  rows.push_back({wave_fish(), 2});
  for (const Row& row : rows) {
    FusionRecord rec = fuse_wave_edge(row.g, 0, 0);
    CHECK(rec.fused_delta() == row.fused_delta);
    CHECK(rec.fused.dim_phi(rec.merged) == rec.fused_delta());
  }

  // Explicit vertex degrees transfer through: the wave end loses 3, the
  // partner loses 1, and the merged vertex carries their sum.
  Graph g = wave_join();
  g.verts[0].delta = 7;
  g.verts[1].delta = 5;
  FusionRecord rec = fuse_wave_edge(g, 0, 0);
  CHECK(rec.delta_wave == 7);
  CHECK(rec.delta_partner == 5);
  CHECK(rec.fused_delta() == 8);
  CHECK(rec.reduced.verts[0].delta == 4);
  CHECK(rec.reduced.verts[1].delta == 4);
  REQUIRE(rec.fused.verts[rec.merged].delta.has_value());
  CHECK(*rec.fused.verts[rec.merged].delta == 8);
  CHECK(Assignment::graph_default(rec.fused).delta(rec.merged) == 8);
}

TEST_CASE("fusing a fish closes a self-loop handled by the tadpole rule") {
  Graph g = wave_fish();
  FusionRecord rec = fuse_wave_edge(g, 0, 0);
  CHECK(rec.fused.n() == 1);
  REQUIRE(rec.fused.edges.size() == 1);
  CHECK(rec.fused.edges[0].src == rec.fused.edges[0].dst);
  CHECK(rec.fused.self_loop_edges().size() == 1);

  RPlan plan(rec.fused, Assignment::minimal(rec.fused));
  CHECK(plan.tadpole());
  Config c;
  c[rec.fused.verts[0].pos] = pt(Rational(1, 3), Rational(1, 2));
  CHECK(plan.evaluate(c) == 0);

  // The surviving edge sits between the two limit vertices, so the merge
  // decomposition itself reports the propagator pole.
  CHECK_THROWS_WITH_AS(
      field_eq_decomposition(g, 0, Assignment::minimal(g), {}),
      "coincidence: an edge joins two limit vertices; the limit meets a "
      "propagator pole",
      std::invalid_argument);
}

TEST_CASE("fusion rejects anything but a contracted plain-field partner") {
  Graph g = wave_join();
  CHECK_THROWS_WITH_AS(fuse_wave_edge(g, 0, 1),
                       "fuse: slot 1 of \"v0\" is not its wave slot",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(fuse_wave_edge(g, 2, 0),
                       "fuse: slot 0 of \"C\" is not its wave slot",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(fuse_wave_edge(g, 9, 0), "fuse: vertex index out of range",
                       std::invalid_argument);

  Graph ext;
  ext.verts.push_back(make_vertex(ext, "v0", 1));
  ext.verts.push_back(make_vertex(ext, "A", 2));
  ext.verts.push_back(make_vertex(ext, "B", 2));
  ext.verts[0].wave_slot = 0;
  add_edge(ext, "A", "B");
  add_edge(ext, "A", "B");
  ext.check_valid();
  CHECK_THROWS_WITH_AS(
      fuse_wave_edge(ext, 0, 0),
      "fuse: the wave slot is external; the term contributes no fusion",
      std::invalid_argument);

  Graph loop;
  loop.verts.push_back(make_vertex(loop, "s", 2));
  loop.verts[0].wave_slot = 0;
  add_edge(loop, "s", "s");
  loop.check_valid();
  CHECK_THROWS_WITH_AS(fuse_wave_edge(loop, 0, 0),
                       "fuse: the wave edge is a self-loop", std::invalid_argument);

  Graph derived;
  derived.verts.push_back(make_vertex(derived, "v0", 1));
  derived.verts.push_back(make_vertex(derived, "A", 2));
  derived.verts[0].wave_slot = 0;
  add_edge(derived, "v0", "A");
  derived.verts[1].slot_derivs[0] = 1;
  derived.check_valid();
  CHECK_THROWS_WITH_AS(
      fuse_wave_edge(derived, 0, 0),
      "fuse: the partner slot carries derivatives; only a plain field fuses",
      std::invalid_argument);

  Graph twowave;
  twowave.verts.push_back(make_vertex(twowave, "v0", 1));
  twowave.verts.push_back(make_vertex(twowave, "A", 2));
  twowave.verts[0].wave_slot = 0;
  twowave.verts[1].wave_slot = 0;
  add_edge(twowave, "v0", "A");
  twowave.check_valid();
  CHECK_THROWS_WITH_AS(
      fuse_wave_edge(twowave, 0, 0),
      "fuse: the partner slot carries a wave operator; only a plain field fuses",
      std::invalid_argument);

  Graph nowave = nest();
  CHECK_THROWS_WITH_AS(
      field_eq_decomposition(nowave, 0, Assignment::minimal(nowave), {}),
      "fuse: vertex \"a\" carries no wave slot", std::invalid_argument);
}

TEST_CASE("disjoint coverage of the fused pair gives overlap corrections") {
  Graph g = wave_join();
  FusionRecord rec = fuse_wave_edge(g, 0, 0);
  std::vector<Config> configs = random_configurations(rec.reduced, 41, 10);
  FieldEqReport rep = field_eq_decomposition(g, 0, Assignment::minimal(g), configs);

  CHECK(rep.reduced_assignment.delta(0) == 2);
  CHECK(rep.reduced_assignment.delta(1) == 2);
  CHECK(rep.plan.a_delta.delta(rep.plan.v0) == 4);
  CHECK(rep.plan.v0 == rec.merged);
  CHECK(rep.plan.delta.n() == rec.fused.n());
  CHECK(rep.plan.delta.edges.size() == rec.fused.edges.size());
  CHECK(rep.plan.delta.verts[rep.plan.v0].fields == 4);

  CHECK(rep.plan.gamma_parts.size() == 2);
  REQUIRE(rep.plan.taus.size() == 3);
  int specials = 0, news = 0;
  for (const TauInfo& t : rep.plan.taus) {
    if (t.special()) ++specials;
    if (t.is_new) ++news;
  }
  CHECK(specials == 1);
  CHECK(news == 1);
  CHECK(rep.plan.delta_forests.size() == 6);
  REQUIRE(rep.plan.bad_forests.size() == 1);
  CHECK(rep.plan.bad_forests[0].reason.find("disjoint") != std::string::npos);
  CHECK(rep.plan.good_forest_count == 3);
  CHECK(rep.plan.overlap_families.size() == 1);

  REQUIRE(rep.report.checks.size() == 10);
  CHECK(rep.ok());
  bool overlap_active = false, special_active = false;
  for (const CoincidenceCheck& chk : rep.report.checks) {
    if (!(chk.x_gamma == 0)) overlap_active = true;
    if (!(chk.x_delta == 0)) special_active = true;
  }
  CHECK(overlap_active);
  CHECK(special_active);
}

TEST_CASE("a part covering both endpoints raises its fused degree") {
  Graph g = wave_raise();
  FusionRecord rec = fuse_wave_edge(g, 0, 0);
  std::vector<Config> configs = random_configurations(rec.reduced, 42, 6);
  FieldEqReport rep = field_eq_decomposition(g, 0, Assignment::minimal(g), configs);

  CHECK(rep.plan.gamma_parts.size() == 3);
  REQUIRE(rep.plan.taus.size() == 1);
  const TauInfo& t = rep.plan.taus[0];
  CHECK_FALSE(t.is_new);
  CHECK(t.raised);
  CHECK(t.d_gamma == 0);
  CHECK(t.d_delta == 4);
  CHECK(t.op.lo == 1);
  CHECK(t.op.hi == 4);
  CHECK(rep.plan.bad_forests.size() == 4);
  CHECK(rep.plan.good_forest_count == 2);
  CHECK(rep.plan.overlap_families.empty());

  CHECK(rep.ok());
  bool raise_active = false;
  for (const CoincidenceCheck& chk : rep.report.checks)
    if (!(chk.x_delta == 0)) raise_active = true;
  CHECK(raise_active);
}

TEST_CASE("a linear wave insertion fuses without corrections") {
  Graph g = wave_linear();
  FusionRecord rec = fuse_wave_edge(g, 0, 0);
  CHECK(rec.reduced.verts[0].fields == 0);
  CHECK(rec.reduced.verts[0].test_factor.has_value());

  std::vector<Config> configs = random_configurations(rec.reduced, 43, 5);
  FieldEqReport rep = field_eq_decomposition(g, 0, Assignment::minimal(g), configs);
  REQUIRE(rep.plan.taus.size() == 1);
  CHECK_FALSE(rep.plan.taus[0].special());
  CHECK(rep.plan.bad_forests.empty());
  CHECK(rep.plan.overlap_families.empty());
  CHECK(rep.plan.good_forest_count == 2);

  CHECK(rep.ok());
  for (const CoincidenceCheck& chk : rep.report.checks) {
    CHECK(chk.x_gamma == 0);
    CHECK(chk.x_delta == 0);
    CHECK(chk.r_delta == chk.r_gamma);
  }
}

TEST_CASE("fusion is insensitive to the declaration order") {
  Graph h;
  h.verts.push_back(make_vertex(h, "D", 2));
  h.verts.push_back(make_vertex(h, "A", 3));
  h.verts.push_back(make_vertex(h, "C", 2));
  h.verts.push_back(make_vertex(h, "v0", 3));
  h.verts[3].wave_slot = 0;
  add_edge(h, "v0", "A");
  add_edge(h, "A", "D");
  add_edge(h, "A", "D");
  add_edge(h, "v0", "C");
  add_edge(h, "v0", "C");
  h.check_valid();
  h.verts[0].test_factor = parse_polynomial("x_D_0^2", h, 0);
  h.verts[2].test_factor = parse_polynomial("x_C_0", h, 2);

  FusionRecord rec = fuse_wave_edge(h, 3, 0);
  CHECK(rec.partner == 1);
  CHECK(rec.fused_delta() == 4);
  CHECK(rec.fused.dim_phi(rec.merged) == 4);

  std::vector<Config> configs = random_configurations(rec.reduced, 44, 3);
  FieldEqReport rep = field_eq_decomposition(h, 3, Assignment::minimal(h), configs);
  CHECK(rep.plan.taus.size() == 3);
  CHECK(rep.plan.bad_forests.size() == 1);
  CHECK(rep.plan.good_forest_count == 3);
  CHECK(rep.plan.overlap_families.size() == 1);
  CHECK(rep.ok());
}

TEST_CASE("the fused subtraction gains the raised orders near the diagonal") {
  Graph g = wave_raise();
  FusionRecord rec = fuse_wave_edge(g, 0, 0);
  FieldEqReport rep = field_eq_decomposition(g, 0, Assignment::minimal(g), {});
  CoincidenceEvaluator ev(rep.plan);

  std::array<Rational, 4> common = pt(1);
  Config base = make_config(rec.reduced,
                            {pt(Rational(1, 3), Rational(1, 2)),
                             pt(Rational(-2, 3), Rational(1, 4), Rational(1, 5)),
                             common});
  CoincidenceProbe probe = coincidence_probe(ev, base, common);
  CHECK(probe.slope_unsubtracted == doctest::Approx(-8.0).epsilon(1e-9));
  CHECK(std::abs(probe.slope_r_gamma + 7.0) < 0.5);
  CHECK(std::abs(probe.slope_r_delta + 3.0) < 0.5);
  CHECK(probe.gain() > 3.2);
}

TEST_CASE("the wave split degrees feed the oversubtraction identity") {
  WaveDegreeSplit s = wave_degree_split(1);
  CHECK(s.upper == 4);
  CHECK(s.lower == 2);
  CHECK(s.window.lo == 3);
  CHECK(s.window.hi == 4);
  CHECK(s.window.sign == 1);
  WaveDegreeSplit s0 = wave_degree_split(0);
  CHECK(s0.upper == 3);
  CHECK(s0.lower == 1);
  CHECK(s0.window.lo == 2);
  CHECK(s0.window.hi == 3);
  CHECK_THROWS_WITH_AS(wave_degree_split(-1),
                       "wave split needs a nonnegative field dimension",
                       std::invalid_argument);

  // The two depths bridged by the split obey the oversubtraction identity on
  // an ordinary graph: subtract a nest vertex at upper vs lower depth and the
  // correction families account for the difference exactly.
  Graph g = nest();
  Assignment deep = Assignment::minimal(g);
  Assignment shallow = deep;
  deep.vertex_deltas[0] = s.upper;
  shallow.vertex_deltas[0] = s.lower;
  for (const Config& c : random_configurations(g, 45, 3)) {
    ZiCheck chk = zi_verify(g, deep, shallow, c);
    CHECK(chk.ok());
  }
}
