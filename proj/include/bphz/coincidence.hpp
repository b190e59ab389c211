#pragma once

#include <array>
#include <string>

#include "bphz/subtraction.hpp"

namespace bphz {

// One part of the joined graph, classified against the original graph
// through its support: the original-graph endpoints of its induced edges
// (edge indices survive joining one-to-one, so the support's induced edges
// are exactly the part's, and both sides agree on subtraction weights).  A
// part is `new` when its support is not a renormalization part of the
// original graph (disconnected there, or degree below zero), and `raised`
// when the support is a part but subtracts shallower than the joined part
// does.  Both kinds carry a correction window: orders 0..d_delta for new
// parts, d_gamma+1..d_delta for raised ones.
struct TauInfo {
  VSet tau;       // joined-graph part
  VSet preimage;  // original-graph vertices mapping into it
  VSet support;   // original-graph endpoints of its induced edges
  int d_delta = 0;
  int d_gamma = 0;
  bool gamma_part = false;
  bool is_new = false;
  bool raised = false;
  bool special() const { return is_new || raised; }
  PartOp op;  // correction window when special
};

// A forest of the original graph excluded from the joined-graph
// correspondence, with the first violated condition: either some part is not
// saturated (its joined image pulls back to a strictly larger support), or
// two disjoint parts both touch the limit set (their images would collide at
// the merged vertex).  The sum of these forests' standard terms is the
// overlap correction.
struct BadForest {
  Forest forest;
  std::string reason;
};

struct CoincidencePlan {
  Graph gamma;
  Assignment a_gamma;
  PartPolicy policy = PartPolicy::Connected;
  Graph delta;  // joined graph
  VertexMap vm;
  int v0 = -1;  // merged vertex index in the joined graph
  Assignment a_delta;
  std::vector<VSet> gamma_parts;
  std::vector<TauInfo> taus;  // all joined-graph parts, canonical order
  std::vector<Forest> delta_forests;
  std::vector<BadForest> bad_forests;
  int good_forest_count = 0;
  // Antichains of >= 2 pairwise disjoint original-graph parts that each
  // touch the limit set; their images pairwise collide at the merged vertex.
  std::vector<std::vector<VSet>> overlap_families;
  // Some new or raised part strictly contains another: iterated corrections.
  bool nested_specials = false;
};

// Joins the limit set and classifies every joined-graph part against the
// original graph.  The vertex deltas transfer by summing over the joined
// vertices; part overrides map through the joining.  Throws when the limit
// set is empty or an edge joins two limit vertices (the coincidence limit
// would meet a propagator pole).
CoincidencePlan plan_coincidence(const Graph& g, const Assignment& a,
                                 PartPolicy policy = PartPolicy::Connected);

struct CoincidenceCheck {
  Rational r_delta;  // joined-graph subtraction written over original coordinates
  Rational r_gamma;  // subtraction operator of the original graph
  Rational x_gamma;  // overlap corrections (excluded-forest sum)
  Rational x_delta;  // diagonal corrections (window sum over new/raised parts)
  bool ok() const { return r_delta == r_gamma - x_gamma + x_delta; }
};

// Built-once evaluator for the decomposition
//   R_delta = R_gamma - X_gamma + X_delta
// as an identity of rational functions on the original graph's configuration
// space (limit vertices at distinct generic points).  Every joined part acts
// on the original coordinates through its support; the valence-weighted
// subtraction point makes that action continuous across the limit.
class CoincidenceEvaluator {
 public:
  explicit CoincidenceEvaluator(CoincidencePlan plan);
  CoincidenceEvaluator(const Graph& g, const Assignment& a,
                       PartPolicy policy = PartPolicy::Connected);

  const CoincidencePlan& plan() const { return plan_; }

  Rational unsubtracted(const Config& c) const;
  Rational r_delta(const Config& c) const;
  Rational r_gamma(const Config& c) const;
  CoincidenceCheck check(const Config& c) const;

 private:
  CoincidencePlan plan_;
  RPlan r_gamma_;
  std::vector<Weight> base_weight_;
  std::vector<std::vector<Weight>> r_delta_terms_, x_gamma_terms_, x_delta_terms_;
};

// One-shot values of the three decomposition pieces at a configuration of
// the original graph.
Rational r_delta_on_gamma(const CoincidencePlan& plan, const Config& c);
Rational overlap_corrections(const CoincidencePlan& plan, const Config& c);
Rational diagonal_corrections(const CoincidencePlan& plan, const Config& c);

struct DecompositionReport {
  std::vector<CoincidenceCheck> checks;
  bool all_ok() const {
    for (const CoincidenceCheck& c : checks)
      if (!c.ok()) return false;
    return true;
  }
};

DecompositionReport verify_decomposition(const CoincidencePlan& plan,
                                         const std::vector<Config>& configs);
DecompositionReport verify_decomposition(const Graph& g, const Assignment& a,
                                         const std::vector<Config>& configs,
                                         PartPolicy policy = PartPolicy::Connected);

// Scaling probe: the limit vertices approach a common point along straight
// lines, x(lambda) = common + lambda (base - common) with lambda = 2^-k;
// spectators stay fixed unless move_spectators puts every vertex on the ray
// (needed when a correction window spans the whole graph, so the collapse it
// subtracts involves the spectators too).  Values are computed exactly, then
// log2-magnitudes of the nonzero ones are fitted against log2 lambda.
struct ProbeRow {
  Rational lambda;
  Rational value_delta;
  Rational value_gamma;
  Rational value_unsubtracted;
};

struct CoincidenceProbe {
  std::vector<ProbeRow> rows;
  double slope_unsubtracted = 0;
  double slope_r_gamma = 0;
  double slope_r_delta = 0;
  double gain() const { return slope_r_delta - slope_r_gamma; }
};

Config scaled_config(const Config& base,
                     const std::vector<std::pair<PosId, std::array<Rational, 4>>>& moves,
                     const Rational& lambda);

CoincidenceProbe coincidence_probe(const CoincidenceEvaluator& ev, const Config& base,
                                   const std::array<Rational, 4>& common,
                                   bool move_spectators = false, int k_lo = 3, int k_hi = 10);

// A factor of a normal product: a power of the field with derivative orders
// on some of its slots.  Its dimension counts one per field plus one per
// derivative.
struct NormalMonomial {
  int fields = 0;
  std::vector<int> slot_derivs;
  int dim() const;
};

// Minimal admissible subtraction degree of a normal product: the sum of the
// factor dimensions.  A nonnegative `requested` below that minimum throws;
// negative `requested` selects the minimum itself.
int normal_product_degree(const std::vector<NormalMonomial>& monomials, int requested = -1);

}  // namespace bphz
