#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bphz/graph.hpp"

namespace bphz {

// Subtraction degrees: one integer per vertex (at least the vertex monomial's
// intrinsic dimension), plus optional per-part overrides that win whenever
// the overridden vertex set is queried exactly.
struct Assignment {
  std::map<int, int> vertex_deltas;                 // complete over all vertices
  std::vector<std::pair<VSet, int>> part_overrides;

  static Assignment minimal(const Graph& g);        // dimension everywhere
  static Assignment graph_default(const Graph& g);  // explicit vertex deltas where present

  int delta(int v) const { return vertex_deltas.at(v); }
  std::optional<int> override_for(const VSet& part) const;
};

// 2|E(p)| + (derivative orders on internally contracted slots) − 4(|V(p)|−1).
int uv_degree(const Graph& g, const VSet& part);

// The same number computed through vertex monomial dimensions and external
// leg counts; agreement with uv_degree is a standing property test.
int uv_degree_from_monomials(const Graph& g, const VSet& part);

// External field legs of the part plus derivative orders on them.
int codegree(const Graph& g, const VSet& part);

// 4 + Σ_{v∈p}(δ_v − 4) − codegree(p); a matching part override wins.
int oversubtraction_degree(const Graph& g, const VSet& part, const Assignment& a);

struct DegreeViolation {
  VSet part;                  // the enclosing part
  std::vector<VSet> subparts; // its maximal forest subparts
  int lhs = 0;                // oversubtraction degree of the enclosing part
  int rhs = 0;                // contracted-graph degree plus subpart degrees
};

// Checks, over every forest of the assignment's renormalization parts, that
// each part's degree is at least the contracted-complement degree plus its
// maximal subparts' degrees.  Contracted vertices enter at their minimal
// (dimension) degree.  Returns all violations (empty = valid assignment).
std::vector<DegreeViolation> validate_assignment(const Graph& g, const Assignment& a);

}  // namespace bphz
