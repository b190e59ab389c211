#pragma once

#include <map>
#include <vector>

#include "bphz/forest.hpp"
#include "bphz/graph.hpp"
#include "bphz/power.hpp"
#include "bphz/weight.hpp"

namespace bphz {

// Propagator factor of one edge: 1/sigma(x_src - x_dst) with the slot
// derivative orders applied along coordinate 0 at each end.  Throws on
// self-loops (the tadpole convention sends those graphs to zero upstream) and
// on edges contracting a wave slot (those must be fused away first).
Weight edge_weight(const Graph& g, int e);

// Product of all edge weights and all test factors.
Weight graph_weight(const Graph& g);

// Subtraction point weights of a part: vertex -> (edge ends at the vertex
// among induced edges) / (2 * induced edge count).  The weights sum to one.
std::map<int, Rational> subtraction_weights(const Graph& g, const VSet& part);

// Taylor expansion of w in the part's coordinates about the part's
// subtraction point, through total order `degree` (negative degree gives the
// zero operator).  All part coordinates are substituted simultaneously; the
// prefactor powers of (x - xbar) stay in the part's original coordinates.
// One addend per multi-index; evaluate and add per configuration (folding
// everything over a common denominator grows numerators needlessly).
std::vector<Weight> taylor_terms(const Graph& g, const VSet& part, int degree, const Weight& w);

// The folded sum of taylor_terms; fine for small images.
Weight apply_taylor(const Graph& g, const VSet& part, int degree, const Weight& w);

// Sum-over-orders window attached to one part in a forest term.  A standard
// subtraction keeps total orders 0..degree; difference windows (used by the
// identity machinery) keep lo..hi and may carry sign -1.  An empty window
// (hi < lo) annihilates every forest term it appears in.
struct PartOp {
  int lo = 0;
  int hi = 0;
  int sign = 1;

  static PartOp standard(int degree) { return PartOp{0, degree, 1}; }
  bool kills() const { return hi < lo; }
};

struct EvalPart {
  VSet vertices;
  PartOp op;
};

// The material a forest term acts on: a set of propagator factors and the
// test factors of the listed vertices.  The default base is the whole graph.
struct BaseSpec {
  std::vector<int> edges;
  std::vector<int> tf_vertices;
};

BaseSpec full_base(const Graph& g);

// One forest term: the composition of the parts' operators (innermost first,
// each carrying a factor -op.sign) applied to the base weight.  Parts must be
// pairwise nested or disjoint; vertex sets may be disconnected.  Each addend
// is a closed-form weight over the graph's original coordinates; their sum is
// the term.  Evaluate and add per configuration.
std::vector<Weight> forest_term(const Graph& g, const BaseSpec& base,
                                const std::vector<EvalPart>& parts);

// Built-once forest sum for repeated evaluation at many configurations.
class RPlan {
 public:
  RPlan(const Graph& g, const Assignment& a, PartPolicy policy = PartPolicy::Connected);

  bool tadpole() const { return tadpole_; }
  const std::vector<Forest>& forests() const { return forests_; }

  Rational evaluate(const Config& c) const;
  std::vector<Rational> per_forest_values(const Config& c) const;

 private:
  bool tadpole_ = false;
  std::vector<Forest> forests_;
  std::vector<std::vector<Weight>> terms_;  // addends per forest
};

struct RResult {
  Rational total;
  bool tadpole = false;
  std::vector<std::pair<Forest, Rational>> per_forest;
};

// Full subtraction operator: sum over all forests of the graph.  Graphs with
// a self-loop return exactly zero with the tadpole flag set (every forest
// pairs with its partner under the single-vertex part, whose operator is the
// identity).
RResult r_operation(const Graph& g, const Assignment& a, const Config& c,
                    PartPolicy policy = PartPolicy::Connected);

// Subtracted interior of one part: sum over forests made of parts strictly
// below `part` (never the part itself), acting on the part's own edges and
// test factors.
Rational r_normal(const Graph& g, const Assignment& a, const VSet& part, const Config& c,
                  PartPolicy policy = PartPolicy::Connected);

}  // namespace bphz
