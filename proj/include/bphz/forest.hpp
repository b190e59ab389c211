#pragma once

#include <string>
#include <vector>

#include "bphz/graph.hpp"
#include "bphz/power.hpp"

namespace bphz {

// Part enumeration policy; the default admits every connected part.
enum class PartPolicy { Connected, Irreducible };

// All connected full vertex parts with >= 1 induced edge and oversubtraction
// degree >= 0, in canonical order.
std::vector<VSet> renormalization_parts(const Graph& g, const Assignment& a,
                                        PartPolicy policy = PartPolicy::Connected);

// A forest is a set of renormalization parts, pairwise nested or disjoint.
using Forest = std::vector<VSet>;  // parts in canonical order

bool nested_or_disjoint(const VSet& a, const VSet& b);

// Every pairwise-compatible subset of the given part list, including the
// empty one, in canonical order.
std::vector<Forest> forests_over(const Graph& g, const std::vector<VSet>& parts);

// Every forest, including the empty one, in canonical order (recursive
// enumerator; the filtered-powerset oracle lives in the test suite).
std::vector<Forest> enumerate_forests(const Graph& g, const Assignment& a,
                                      PartPolicy policy = PartPolicy::Connected);

// Total order extending reverse inclusion: outermost first, canonical
// tie-break among incomparable parts.
std::vector<VSet> taylor_order(const Graph& g, const Forest& f);

struct ForestCheck {
  bool ok = false;
  std::string reason;  // empty when ok
};

// True iff all entries are renormalization parts and pairwise nested or
// disjoint; the reason names the first violation.
ForestCheck is_forest(const Graph& g, const Assignment& a, const std::vector<VSet>& parts,
                      PartPolicy policy = PartPolicy::Connected);

}  // namespace bphz
