#pragma once

#include "bphz/coincidence.hpp"
#include "bphz/zimmermann.hpp"

namespace bphz {

// Contracting the unique edge that lands on a wave slot: the edge and the
// propagator it carried are consumed, the wave vertex and its partner merge,
// and the contracted pair of slots (the wave slot plus a plain field slot at
// the partner) disappears from the merged monomial.  The merged subtraction
// degree is delta_wave + delta_partner - 4: the pair removed one field of
// dimension 3 (field plus wave operator) at one end and one of dimension 1 at
// the other.
struct FusionRecord {
  Graph source;       // input graph, untouched
  int wave_vertex = -1;
  int wave_slot = -1;
  int wave_edge = -1; // edge index in `source`
  int partner = -1;
  int partner_slot = -1;

  // `source` minus the fused edge and the two consumed slots, with the pair
  // installed as the limit set; the coincidence machinery runs on this graph.
  Graph reduced;
  Graph fused;        // `reduced` with the pair merged
  VertexMap vm;       // reduced -> fused, kind Fusion
  int merged = -1;    // merged vertex index in `fused`

  // Degree ledger: the two vertex degrees read off `source` (explicit deltas
  // where present, monomial dimension otherwise) and their fused total.
  int delta_wave = 0;
  int delta_partner = 0;
  int fused_delta() const { return delta_wave + delta_partner - 4; }
};

// Contracts the edge on `slot` of `wave_vertex`, which must be that vertex's
// wave slot.  Throws std::invalid_argument when the slot is not the wave
// slot, when it is external (an uncontracted wave slot contributes no
// fusion), when the edge is a self-loop, or when the partner slot carries
// derivatives or a wave operator of its own (only a plain field fuses).
FusionRecord fuse_wave_edge(const Graph& g, int wave_vertex, int slot);

// The two normal-product depths a wave-operator insertion bridges: writing
// the second-order operator as a metric part plus a lower-order remainder
// splits a monomial of field dimension phi_dim into pieces subtracted at
// phi_dim + 3 and phi_dim + 1.  The gap is the half-open window
// (lower, upper], the orders present under the deeper subtraction only.
struct WaveDegreeSplit {
  int upper = 0;  // phi_dim + 3
  int lower = 0;  // phi_dim + 1
  PartOp window;  // [lower + 1, upper], sign +1
};

WaveDegreeSplit wave_degree_split(int phi_dim);

// Full decomposition of an insertion with a contracted wave slot: fuse the
// edge, transfer the assignment (the wave vertex loses 3, the partner loses
// 1, overrides unchanged), and run the merge decomposition on the reduced
// graph.  The principal term is the fused graph's subtraction and the
// corrections are exactly the merge corrections: overlap families where
// disjoint parts covered the two endpoints separately, and degree raises
// where one part covered both.
struct FieldEqReport {
  FusionRecord fusion;
  Assignment reduced_assignment;
  CoincidencePlan plan;        // over (fusion.reduced, reduced_assignment)
  DecompositionReport report;  // exact checks at the supplied configurations
  bool ok() const { return report.all_ok(); }
};

FieldEqReport field_eq_decomposition(const Graph& g, int wave_vertex,
                                     const Assignment& a,
                                     const std::vector<Config>& configs,
                                     PartPolicy policy = PartPolicy::Connected);

}  // namespace bphz
