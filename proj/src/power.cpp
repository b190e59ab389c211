#include "bphz/power.hpp"

#include <algorithm>
#include <set>

#include "bphz/forest.hpp"

namespace bphz {

Assignment Assignment::minimal(const Graph& g) {
  Assignment a;
  for (int v = 0; v < g.n(); ++v) a.vertex_deltas[v] = g.dim_phi(v);
  return a;
}

Assignment Assignment::graph_default(const Graph& g) {
  Assignment a;
  for (int v = 0; v < g.n(); ++v)
    a.vertex_deltas[v] = g.verts[v].delta ? *g.verts[v].delta : g.dim_phi(v);
  return a;
}

std::optional<int> Assignment::override_for(const VSet& part) const {
  for (auto& [vs, d] : part_overrides)
    if (vs == part) return d;
  return std::nullopt;
}

int uv_degree(const Graph& g, const VSet& part) {
  std::vector<int> internal = g.induced_edges(part);
  int d = 2 * static_cast<int>(internal.size());
  for (int e : internal) {
    d += g.eff_derivs(g.edges[e].src, g.edges[e].src_slot);
    d += g.eff_derivs(g.edges[e].dst, g.edges[e].dst_slot);
  }
  d -= 4 * (static_cast<int>(part.size()) - 1);
  return d;
}

int uv_degree_from_monomials(const Graph& g, const VSet& part) {
  int dim_sum = 0;
  for (int v : part) dim_sum += g.dim_phi(v);
  return 4 - 4 * static_cast<int>(part.size()) + dim_sum - codegree(g, part);
}

int codegree(const Graph& g, const VSet& part) {
  int d = 0;
  for (auto& [v, s] : g.external_slots(part)) d += 1 + g.eff_derivs(v, s);
  return d;
}

int oversubtraction_degree(const Graph& g, const VSet& part, const Assignment& a) {
  if (auto ov = a.override_for(part)) return *ov;
  int d = 4;
  for (int v : part) d += a.delta(v) - 4;
  return d - codegree(g, part);
}

namespace {

// Degree of the enclosing part with its maximal subparts contracted away,
// each contracted vertex entering at the dimension of its merged monomial
// (which equals the subpart's codegree).
int contracted_degree(const Graph& g, const Assignment& a, const VSet& part,
                      const std::vector<VSet>& subparts) {
  VSet swallowed;
  for (const VSet& sp : subparts) swallowed.insert(sp.begin(), sp.end());
  int d = 4;
  for (int v : part)
    if (!swallowed.count(v)) d += a.delta(v) - 4;
  for (const VSet& sp : subparts) d += codegree(g, sp) - 4;
  return d - codegree(g, part);
}

}  // namespace

std::vector<DegreeViolation> validate_assignment(const Graph& g, const Assignment& a) {
  std::vector<Forest> forests = enumerate_forests(g, a);
  std::set<std::pair<VSet, std::vector<VSet>>> seen;
  std::vector<DegreeViolation> out;
  for (const Forest& f : forests) {
    for (const VSet& part : f) {
      // Maximal forest parts strictly inside this one.
      std::vector<VSet> subs;
      for (const VSet& cand : f) {
        if (cand == part) continue;
        if (!std::includes(part.begin(), part.end(), cand.begin(), cand.end())) continue;
        bool maximal = true;
        for (const VSet& mid : f) {
          if (mid == part || mid == cand) continue;
          if (std::includes(part.begin(), part.end(), mid.begin(), mid.end()) &&
              std::includes(mid.begin(), mid.end(), cand.begin(), cand.end())) {
            maximal = false;
            break;
          }
        }
        if (maximal) subs.push_back(cand);
      }
      if (subs.empty()) continue;
      if (!seen.insert({part, subs}).second) continue;
      int lhs = oversubtraction_degree(g, part, a);
      int rhs = contracted_degree(g, a, part, subs);
      for (const VSet& sp : subs) rhs += oversubtraction_degree(g, sp, a);
      if (lhs < rhs) out.push_back(DegreeViolation{part, subs, lhs, rhs});
    }
  }
  return out;
}

}  // namespace bphz
