#pragma once

// Shared fixture builders and the filtered-powerset forest oracle used by
// both the unit tests and the acceptance suite.

#include <algorithm>
#include <string>
#include <vector>

#include "bphz/forest.hpp"
#include "bphz/graph.hpp"
#include "bphz/io.hpp"
#include "bphz/power.hpp"

namespace testutil {

using namespace bphz;

inline Vertex make_vertex(Graph& g, const std::string& id, int fields) {
  Vertex v;
  v.id = id;
  v.pos = g.next_pos++;
  v.fields = fields;
  v.slot_derivs.assign(fields, 0);
  return v;
}

inline void add_edge(Graph& g, const std::string& src, const std::string& dst) {
  Edge e;
  e.src = g.vertex_index(src);
  e.dst = g.vertex_index(dst);
  // next free slot at each end
  std::vector<bool> used_src(g.verts[e.src].fields, false);
  std::vector<bool> used_dst(g.verts[e.dst].fields, false);
  for (const Edge& old : g.edges) {
    if (old.src == e.src) used_src[old.src_slot] = true;
    if (old.dst == e.src) used_src[old.dst_slot] = true;
    if (old.src == e.dst) used_dst[old.src_slot] = true;
    if (old.dst == e.dst) used_dst[old.dst_slot] = true;
  }
  e.src_slot = static_cast<int>(std::find(used_src.begin(), used_src.end(), false) -
                                used_src.begin());
  if (e.src == e.dst) used_dst[e.src_slot] = true;
  e.dst_slot = static_cast<int>(std::find(used_dst.begin(), used_dst.end(), false) -
                                used_dst.begin());
  g.edges.push_back(e);
}

// Two vertices, two parallel edges.
inline Graph fish() {
  Graph g;
  g.verts.push_back(make_vertex(g, "a", 2));
  g.verts.push_back(make_vertex(g, "b", 2));
  add_edge(g, "a", "b");
  add_edge(g, "a", "b");
  g.check_valid();
  return g;
}

// Fish with the test factor x_a_0 at vertex a.
inline Graph fish_tf() {
  Graph g = fish();
  g.verts[0].test_factor = parse_polynomial("x_a_0", g, 0);
  return g;
}

// Two vertices, three parallel edges.
inline Graph sunset() {
  Graph g;
  g.verts.push_back(make_vertex(g, "a", 3));
  g.verts.push_back(make_vertex(g, "b", 3));
  for (int i = 0; i < 3; ++i) add_edge(g, "a", "b");
  g.check_valid();
  return g;
}

inline Graph triangle() {
  Graph g;
  g.verts.push_back(make_vertex(g, "a", 2));
  g.verts.push_back(make_vertex(g, "b", 2));
  g.verts.push_back(make_vertex(g, "c", 2));
  add_edge(g, "a", "b");
  add_edge(g, "b", "c");
  add_edge(g, "c", "a");
  g.check_valid();
  return g;
}

// Inner fish {a,b} nested in the full graph; test factor x_c_0^3 at c.
inline Graph nest() {
  Graph g;
  g.verts.push_back(make_vertex(g, "a", 3));
  g.verts.push_back(make_vertex(g, "b", 3));
  g.verts.push_back(make_vertex(g, "c", 2));
  add_edge(g, "a", "b");
  add_edge(g, "a", "b");
  add_edge(g, "b", "c");
  add_edge(g, "c", "a");
  g.check_valid();
  g.verts[2].test_factor = parse_polynomial("x_c_0^3", g, 2);
  return g;
}

// Limit vertices v1, v2 hanging off interior vertices A, B; disjoint parts
// {v1,A} and {v2,B}; test factor x_B_0^3 at B.
inline Graph join2() {
  Graph g;
  g.verts.push_back(make_vertex(g, "v1", 2));
  g.verts.push_back(make_vertex(g, "v2", 2));
  g.verts.push_back(make_vertex(g, "A", 3));
  g.verts.push_back(make_vertex(g, "B", 3));
  add_edge(g, "v1", "A");
  add_edge(g, "v1", "A");
  add_edge(g, "v2", "B");
  add_edge(g, "v2", "B");
  add_edge(g, "A", "B");
  g.limit_set = {0, 1};
  g.check_valid();
  g.verts[3].test_factor = parse_polynomial("x_B_0^3", g, 3);
  return g;
}

// Limit vertices v1, v2 both tied to the same interior vertex w; overlapping
// parts {v1,w}, {v2,w}; test factor x_w_0^5 at w.
inline Graph raise_graph() {
  Graph g;
  g.verts.push_back(make_vertex(g, "v1", 2));
  g.verts.push_back(make_vertex(g, "v2", 2));
  g.verts.push_back(make_vertex(g, "w", 4));
  add_edge(g, "v1", "w");
  add_edge(g, "v1", "w");
  add_edge(g, "v2", "w");
  add_edge(g, "v2", "w");
  g.limit_set = {0, 1};
  g.check_valid();
  g.verts[2].test_factor = parse_polynomial("x_w_0^5", g, 2);
  return g;
}

// The joined form of raise_graph: two vertices, four parallel edges.
inline Graph raise_delta() {
  Graph g;
  g.verts.push_back(make_vertex(g, "v0", 4));
  g.verts.push_back(make_vertex(g, "w", 4));
  for (int i = 0; i < 4; ++i) add_edge(g, "v0", "w");
  g.check_valid();
  g.verts[1].test_factor = parse_polynomial("x_w_0^5", g, 1);
  return g;
}

// Four-vertex two-loop graph with two independently raisable parts {p,q} and
// {r,s}; test factors at q and s.
inline Graph zi4() {
  Graph g;
  g.verts.push_back(make_vertex(g, "p", 3));
  g.verts.push_back(make_vertex(g, "q", 3));
  g.verts.push_back(make_vertex(g, "r", 3));
  g.verts.push_back(make_vertex(g, "s", 3));
  add_edge(g, "p", "q");
  add_edge(g, "p", "q");
  add_edge(g, "r", "s");
  add_edge(g, "r", "s");
  add_edge(g, "q", "r");
  add_edge(g, "s", "p");
  g.check_valid();
  g.verts[1].test_factor = parse_polynomial("x_q_0", g, 1);
  g.verts[3].test_factor = parse_polynomial("x_s_1^2", g, 3);
  return g;
}

inline std::array<Rational, 4> pt(const Rational& x0, const Rational& x1 = 0,
                                  const Rational& x2 = 0, const Rational& x3 = 0) {
  return {x0, x1, x2, x3};
}

// Configuration from one point per vertex, in vertex order.
inline Config make_config(const Graph& g, const std::vector<std::array<Rational, 4>>& pts) {
  Config c;
  for (int v = 0; v < g.n(); ++v) c[g.verts[v].pos] = pts.at(v);
  return c;
}

inline Rational rsig(const std::array<Rational, 4>& p, const std::array<Rational, 4>& q) {
  Rational s = 0;
  for (int mu = 0; mu < 4; ++mu) s += (p[mu] - q[mu]) * (p[mu] - q[mu]);
  return s;
}

// p + t (q - p), the straight path used by scaling probes.
inline std::array<Rational, 4> mix(const std::array<Rational, 4>& p,
                                   const std::array<Rational, 4>& q, const Rational& t) {
  std::array<Rational, 4> out;
  for (int mu = 0; mu < 4; ++mu) out[mu] = p[mu] + t * (q[mu] - p[mu]);
  return out;
}

inline std::array<Rational, 4> average(const std::vector<std::array<Rational, 4>>& pts,
                                       const std::vector<Rational>& weights) {
  std::array<Rational, 4> out = {0, 0, 0, 0};
  for (size_t i = 0; i < pts.size(); ++i)
    for (int mu = 0; mu < 4; ++mu) out[mu] += weights[i] * pts[i][mu];
  return out;
}

inline bool parts_compatible(const VSet& a, const VSet& b) {
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (common.empty()) return true;
  return std::includes(a.begin(), a.end(), b.begin(), b.end()) ||
         std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Filtered powerset over the part list: the independent oracle the recursive
// enumerator is checked against.
inline std::vector<Forest> forests_powerset_oracle(const Graph& g, const Assignment& a) {
  std::vector<VSet> parts = renormalization_parts(g, a);
  if (parts.size() > 20) throw std::runtime_error("oracle: too many parts");
  std::vector<Forest> out;
  for (unsigned long mask = 0; mask < (1ul << parts.size()); ++mask) {
    Forest f;
    for (size_t i = 0; i < parts.size(); ++i)
      if (mask & (1ul << i)) f.push_back(parts[i]);
    bool ok = true;
    for (size_t i = 0; i < f.size() && ok; ++i)
      for (size_t j = i + 1; j < f.size() && ok; ++j)
        if (!parts_compatible(f[i], f[j])) ok = false;
    if (ok) out.push_back(f);
  }
  for (Forest& f : out)
    std::sort(f.begin(), f.end(),
              [&](const VSet& x, const VSet& y) { return part_less(g, x, y); });
  std::sort(out.begin(), out.end(), [&](const Forest& x, const Forest& y) {
    std::vector<std::vector<std::string>> kx, ky;
    for (const VSet& p : x) kx.push_back(g.part_key(p));
    for (const VSet& p : y) ky.push_back(g.part_key(p));
    return kx < ky;
  });
  return out;
}

}  // namespace testutil
