#include "bphz/subtraction.hpp"

#include <cmath>
#include <vector>

#include "bphz/fit.hpp"
#include "bphz/io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bphz;
using namespace testutil;
using R = Rational;
using P4 = std::array<R, 4>;

TEST_CASE("edge weights carry slot derivatives") {
  Graph g = fish();
  Config c1 = make_config(g, {pt(0), pt(1)});
  Config c2 = make_config(g, {pt(0), pt(2)});
  CHECK(edge_weight(g, 0).evaluate(c1) == R(1));
  CHECK(edge_weight(g, 0).evaluate(c2) == R(1, 4));
  CHECK(graph_weight(g).evaluate(c2) == R(1, 16));

  Graph d = fish();
  d.verts[0].slot_derivs[0] = 2;  // two derivatives on one end of edge 0
  CHECK(edge_weight(d, 0).evaluate(c1) == R(6));
  CHECK(edge_weight(d, 0).evaluate(c2) == R(3, 8));
  CHECK(edge_weight(d, 1).evaluate(c2) == R(1, 4));

  Graph t = triangle();
  Config ct = make_config(t, {pt(0), pt(1), pt(0, 1)});
  CHECK(graph_weight(t).evaluate(ct) == R(1, 2));
}

TEST_CASE("edge weight rejects self-loops and wave slots") {
  Graph g;
  g.verts.push_back(make_vertex(g, "v", 2));
  add_edge(g, "v", "v");
  g.check_valid();
  CHECK_THROWS_WITH_AS(edge_weight(g, 0), doctest::Contains("self-loop"), std::invalid_argument);

  Graph w;
  w.verts.push_back(make_vertex(w, "v", 2));
  w.verts.push_back(make_vertex(w, "u", 1));
  w.verts[0].wave_slot = 0;
  add_edge(w, "v", "u");
  w.check_valid();
  CHECK_THROWS_WITH_AS(edge_weight(w, 0), doctest::Contains("wave slot"), std::invalid_argument);
}

TEST_CASE("subtraction point weights") {
  Graph g = nest();
  auto wf = subtraction_weights(g, {0, 1});
  CHECK(wf == std::map<int, R>{{0, R(1, 2)}, {1, R(1, 2)}});
  auto wn = subtraction_weights(g, {0, 1, 2});
  CHECK(wn == std::map<int, R>{{0, R(3, 8)}, {1, R(3, 8)}, {2, R(1, 4)}});

  Graph loop;
  loop.verts.push_back(make_vertex(loop, "v", 2));
  add_edge(loop, "v", "v");
  loop.check_valid();
  CHECK(subtraction_weights(loop, {0}) == std::map<int, R>{{0, R(1)}});

  Graph t = triangle();
  CHECK_THROWS_WITH_AS(subtraction_weights(t, {0}), doctest::Contains("no induced edges"),
                       std::invalid_argument);
}

TEST_CASE("taylor operator at order zero evaluates at the subtraction point") {
  Graph g = nest();
  Weight w = edge_weight(g, 2) * edge_weight(g, 3);  // complement of the inner fish
  Weight t0 = apply_taylor(g, {0, 1}, 0, w);

  std::vector<P4> pts = {pt(0), pt(2), pt(0, 2)};
  Config c = make_config(g, pts);
  P4 m = average({pts[0], pts[1]}, {R(1, 2), R(1, 2)});
  CHECK(t0.evaluate(c) == R(1) / (rsig(m, pts[2]) * rsig(m, pts[2])));
}

TEST_CASE("taylor operator reproduces polynomials up to its order") {
  Graph g = fish();
  Weight lin = Weight::from_poly(parse_polynomial("x_a_0 - 3*x_b_2", g));
  Weight t1 = apply_taylor(g, {0, 1}, 1, lin);
  Weight diff = t1 + (-lin);
  for (auto& pts : std::vector<std::vector<P4>>{{pt(0), pt(2)},
                                                {pt(1, R(1, 3)), pt(R(-1, 2), 0, 2)},
                                                {pt(R(2, 7), 1, 1, 1), pt(0, R(5, 3))}}) {
    CHECK(diff.evaluate(make_config(g, pts)) == R(0));
  }

  Weight quad = Weight::from_poly(parse_polynomial("x_a_0^2", g));
  Weight t1q = apply_taylor(g, {0, 1}, 1, quad);
  // At a=0, b=(2,...): xbar0 = 1, so the affine approximation of x_a_0^2 is
  // 1 + 2 (0 - 1) = -1.
  CHECK(t1q.evaluate(make_config(g, {pt(0), pt(2)})) == R(-1));

  Weight con = Weight::from_poly(Poly::constant(R(5, 3)));
  CHECK(apply_taylor(g, {0, 1}, 0, con).evaluate(make_config(g, {pt(0), pt(1)})) == R(5, 3));
}

TEST_CASE("taylor operator refuses part-internal propagators") {
  Graph g = fish();
  CHECK_THROWS_AS(apply_taylor(g, {0, 1}, 0, edge_weight(g, 0)), SigmaVanished);
}

TEST_CASE("negative order gives the zero operator") {
  Graph g = fish();
  CHECK(apply_taylor(g, {0, 1}, -1, Weight::one()).is_zero());
}

static R fish_r_expected(const P4& a, const P4& b) {
  // u * (f - f(xbar)) with f = x^0 at the first vertex.
  R sig = rsig(a, b);
  P4 m = average({a, b}, {R(1, 2), R(1, 2)});
  return (a[0] - m[0]) / (sig * sig);
}

TEST_CASE("subtraction on the fish") {
  Graph g = fish_tf();
  Assignment a = Assignment::minimal(g);

  RResult r = r_operation(g, a, make_config(g, {pt(0), pt(2)}));
  CHECK(r.total == R(-1, 16));
  CHECK_FALSE(r.tadpole);
  REQUIRE(r.per_forest.size() == 2);
  CHECK(r.per_forest[0].first == Forest{});
  CHECK(r.per_forest[0].second == R(0));
  CHECK(r.per_forest[1].first == Forest{{0, 1}});
  CHECK(r.per_forest[1].second == R(-1, 16));

  for (auto& pts : std::vector<std::vector<P4>>{{pt(1), pt(3)},
                                                {pt(1, 1), pt(3)},
                                                {pt(R(1, 2), R(1, 3)), pt(2, 1, R(1, 5))}}) {
    CHECK(r_operation(g, a, make_config(g, pts)).total == fish_r_expected(pts[0], pts[1]));
  }
}

TEST_CASE("subtraction without a test factor annihilates the fish") {
  Graph g = fish();
  Assignment a = Assignment::minimal(g);
  for (auto& pts : std::vector<std::vector<P4>>{{pt(0), pt(2)},
                                                {pt(1, 1), pt(3)},
                                                {pt(R(1, 3)), pt(0, R(2, 5), 1)}}) {
    CHECK(r_operation(g, a, make_config(g, pts)).total == R(0));
  }
}

TEST_CASE("graphs without parts are returned unsubtracted") {
  Graph g = triangle();
  Assignment a = Assignment::minimal(g);
  Config c = make_config(g, {pt(0), pt(1), pt(0, 1)});
  RResult r = r_operation(g, a, c);
  REQUIRE(r.per_forest.size() == 1);
  CHECK(r.total == graph_weight(g).evaluate(c));
  CHECK(r.total == R(1, 2));
}

// Manual closed forms for the four nested-fish forest terms.
static std::vector<R> nest_terms_expected(const P4& a, const P4& b, const P4& c) {
  R sab = rsig(a, b);
  P4 m = average({a, b}, {R(1, 2), R(1, 2)});
  P4 z = average({c, m}, {R(1, 2), R(1, 2)});
  P4 w = average({a, b, c}, {R(3, 8), R(3, 8), R(1, 4)});
  R inner = R(1) / (sab * sab);
  R full = inner / (rsig(b, c) * rsig(c, a));
  R collapsed = inner / (rsig(m, c) * rsig(m, c));
  R tf = c[0] * c[0] * c[0];
  return {full * tf, -collapsed * tf, collapsed * z[0] * z[0] * z[0], -full * w[0] * w[0] * w[0]};
}

TEST_CASE("nested forest terms use reduced subtraction points") {
  Graph g = nest();
  Assignment a = Assignment::minimal(g);
  RPlan plan(g, a);
  REQUIRE(plan.forests().size() == 4);

  for (auto& pts : std::vector<std::vector<P4>>{
           {pt(0), pt(2), pt(3, 1)},
           {pt(1, R(1, 2)), pt(-1, 1), pt(0, -2, 1)},
           {pt(R(1, 3)), pt(2, R(1, 5)), pt(-1, 1, R(1, 2))}}) {
    std::vector<R> got = plan.per_forest_values(make_config(g, pts));
    std::vector<R> want = nest_terms_expected(pts[0], pts[1], pts[2]);
    REQUIRE(got.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(got[i] == want[i]);
  }
}

// Manual closed forms for the four two-island forest terms; disjoint
// operators act independently, so the formulas are order-free.
static std::vector<R> join2_terms_expected(const P4& v1, const P4& v2, const P4& A, const P4& B) {
  P4 m1 = average({v1, A}, {R(1, 2), R(1, 2)});
  P4 m2 = average({v2, B}, {R(1, 2), R(1, 2)});
  R s1 = rsig(v1, A), s2 = rsig(v2, B);
  R fishes = R(1) / (s1 * s1 * s2 * s2);
  R tf = B[0] * B[0] * B[0];
  R tfm = m2[0] * m2[0] * m2[0];
  return {fishes / rsig(A, B) * tf, -fishes / rsig(m1, B) * tf, fishes / rsig(m1, m2) * tfm,
          -fishes / rsig(A, m2) * tfm};
}

TEST_CASE("disjoint operators compose symmetrically") {
  Graph g = join2();
  Assignment a = Assignment::minimal(g);
  RPlan plan(g, a);
  REQUIRE(plan.forests().size() == 4);

  for (auto& pts : std::vector<std::vector<P4>>{
           {pt(0), pt(2), pt(0, 2), pt(2, 2)},
           {pt(1, 1), pt(-1), pt(0, R(1, 2), 1), pt(3, 0, -1)},
           {pt(R(1, 5)), pt(2, -1), pt(1, R(2, 3)), pt(-2, 1, R(1, 4))},
           {pt(0, 0, 0, 1), pt(1, 0, 2), pt(0, -1), pt(R(5, 2), R(1, 7))},
           {pt(-1, R(1, 2)), pt(R(3, 4), 2), pt(2, 0, R(1, 3)), pt(0, 3)}}) {
    std::vector<R> got = plan.per_forest_values(make_config(g, pts));
    std::vector<R> want = join2_terms_expected(pts[0], pts[1], pts[2], pts[3]);
    REQUIRE(got.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(got[i] == want[i]);
  }
}

TEST_CASE("order windows partition the standard operator") {
  Graph g = fish_tf();
  g.verts[0].test_factor = parse_polynomial("x_a_0^2 + x_a_1*x_a_0", g, 0);
  BaseSpec base = full_base(g);
  VSet part = {0, 1};

  for (auto& pts : std::vector<std::vector<P4>>{{pt(0), pt(2)},
                                                {pt(1, R(1, 2)), pt(-1, 1)},
                                                {pt(R(1, 3), 1), pt(2, R(1, 5))}}) {
    Config c = make_config(g, pts);
    R whole = 0, split = 0;
    for (const Weight& w : forest_term(g, base, {{part, PartOp{0, 2, 1}}})) whole += w.evaluate(c);
    for (int k = 0; k <= 2; ++k)
      for (const Weight& w : forest_term(g, base, {{part, PartOp{k, k, 1}}})) split += w.evaluate(c);
    CHECK(whole == split);

    R flipped = 0;
    for (const Weight& w : forest_term(g, base, {{part, PartOp{0, 2, -1}}}))
      flipped += w.evaluate(c);
    CHECK(flipped == -whole);
  }
}

TEST_CASE("an empty window annihilates the forest term") {
  Graph g = fish_tf();
  CHECK(forest_term(g, full_base(g), {{{0, 1}, PartOp{0, -1, 1}}}).empty());
}

TEST_CASE("window above the test factor degree leaves only matched orders") {
  Graph g = fish_tf();  // test factor x_a_0, degree one
  Config c = make_config(g, {pt(0), pt(2)});
  R first = 0;
  for (const Weight& w : forest_term(g, full_base(g), {{{0, 1}, PartOp{1, 1, 1}}}))
    first += w.evaluate(c);
  // -(x_a^0 - x_b^0)/2 * u at a=0, b=(2,0,0,0)
  CHECK(first == R(1, 16));
  R second = 0;
  for (const Weight& w : forest_term(g, full_base(g), {{{0, 1}, PartOp{2, 2, 1}}}))
    second += w.evaluate(c);
  CHECK(second == R(0));
}

TEST_CASE("subtraction is linear in the test factor") {
  Graph f1 = fish(), f2 = fish(), fsum = fish();
  f1.verts[0].test_factor = parse_polynomial("x_a_0", f1);
  f2.verts[0].test_factor = parse_polynomial("x_a_1^2", f2);
  fsum.verts[0].test_factor = parse_polynomial("x_a_0 + x_a_1^2", fsum);
  Assignment a1 = Assignment::minimal(f1);
  std::vector<P4> pts = {pt(1, R(1, 2)), pt(-1, 2, 1)};
  R r1 = r_operation(f1, a1, make_config(f1, pts)).total;
  R r2 = r_operation(f2, Assignment::minimal(f2), make_config(f2, pts)).total;
  R rs = r_operation(fsum, Assignment::minimal(fsum), make_config(fsum, pts)).total;
  CHECK(rs == r1 + r2);
}

TEST_CASE("self-loop graphs subtract to exactly zero") {
  Graph g = fish();
  g.limit_set = {0, 1};
  auto [joined, vm] = join_vertices(g, {0, 1});
  REQUIRE_FALSE(joined.self_loop_edges().empty());
  Assignment a = Assignment::minimal(joined);
  RResult r = r_operation(joined, a, Config{{joined.verts[0].pos, pt(0)}});
  CHECK(r.tadpole);
  CHECK(r.total == R(0));
  CHECK(r.per_forest.empty());
}

TEST_CASE("coincident points surface as vanishing denominators") {
  Graph g = fish_tf();
  Assignment a = Assignment::minimal(g);
  RPlan plan(g, a);
  CHECK_THROWS_AS(plan.evaluate(make_config(g, {pt(1, 1), pt(1, 1)})), SigmaVanished);
}

TEST_CASE("interior subtraction stops below the part itself") {
  Graph g = nest();
  Assignment a = Assignment::minimal(g);
  std::vector<P4> pts = {pt(0), pt(2), pt(3, 1)};
  Config c = make_config(g, pts);

  // Whole-graph part: only the inner fish contributes a proper subforest.
  std::vector<R> terms = nest_terms_expected(pts[0], pts[1], pts[2]);
  CHECK(r_normal(g, a, {0, 1, 2}, c) == terms[0] + terms[1]);

  // Inner fish: nothing strictly below, so just its own weight.
  CHECK(r_normal(g, a, {0, 1}, c) == R(1) / (rsig(pts[0], pts[1]) * rsig(pts[0], pts[1])));

  Graph f = fish_tf();
  std::vector<P4> fpts = {pt(1), pt(3)};
  CHECK(r_normal(f, Assignment::minimal(f), {0, 1}, make_config(f, fpts)) ==
        graph_weight(f).evaluate(make_config(f, fpts)));
}

static double remainder_improvement(const Graph& g, const Weight& w, int d,
                                    const std::vector<P4>& base) {
  P4 m = average({base[0], base[1]}, {R(1, 2), R(1, 2)});
  std::vector<Weight> image = taylor_terms(g, {0, 1}, d, w);
  std::vector<double> xs, ys, ys0;
  for (int k = 3; k <= 10; ++k) {
    R lam = rat_pow(R(1, 2), k);
    Config c = make_config(g, {mix(m, base[0], lam), mix(m, base[1], lam), base[2]});
    R rem = w.evaluate(c);
    for (const Weight& t : image) rem -= t.evaluate(c);
    xs.push_back(-static_cast<double>(k));
    ys.push_back(std::log2(std::fabs(rat_double(rem))));
    ys0.push_back(std::log2(std::fabs(rat_double(w.evaluate(c)))));
  }
  return fitted_slope(xs, ys) - fitted_slope(xs, ys0);
}

TEST_CASE("taylor remainders gain at least one scaling order per subtraction order") {
  Graph g = nest();
  std::vector<P4> base = {pt(1), pt(0, 1), pt(1, 1, 1)};

  // The bare complement is symmetric under swapping the two part vertices
  // while the path is centered at their midpoint, so the remainder is even in
  // the scale: the gain jumps in steps of two but never drops below d+1.
  Weight sym = edge_weight(g, 2) * edge_weight(g, 3);
  for (int d = 0; d <= 2; ++d) {
    double imp = remainder_improvement(g, sym, d, base);
    CHECK(imp >= d + 1 - 0.1);
    double even_gain = 2 * ((d + 2) / 2);
    CHECK(std::fabs(imp - even_gain) <= 0.15);
  }

  // An asymmetric factor removes the parity degeneracy; the gain is then
  // sharply d+1.
  Weight asym = sym * Weight::from_poly(parse_polynomial("x_a_0", g));
  for (int d = 0; d <= 2; ++d) {
    double imp = remainder_improvement(g, asym, d, base);
    CHECK(std::fabs(imp - (d + 1)) <= 0.1);
  }
}
