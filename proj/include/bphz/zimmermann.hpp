#pragma once

#include "bphz/subtraction.hpp"

namespace bphz {

// One part whose subtraction degree differs between two assignments.  The
// window keeps the orders present under the deeper assignment but not the
// shallower one: lo = max(0, min(d1,d2)+1), hi = max(d1,d2), sign +1 when the
// first assignment subtracts deeper.  A part of only one assignment enters
// with the other degree at -1, so its window starts at 0.
struct ZiWindow {
  VSet part;
  int d1 = -1;
  int d2 = -1;
  PartOp op;
};

// One correction family: a nonempty set of pairwise disjoint difference
// parts, together with every forest over the union part set containing it.
// In such a forest the family members carry their difference windows, parts
// strictly containing a family member carry standard windows at the first
// assignment's degree, and all other parts carry the second assignment's
// degree (an absent part kills via the empty window).
struct ZiCorrection {
  std::vector<VSet> family;
  std::vector<Forest> forests;
};

struct ZiPlan {
  std::vector<VSet> union_parts;  // parts under either assignment
  std::vector<ZiWindow> differences;
  std::vector<ZiCorrection> corrections;
};

ZiPlan zi_plan(const Graph& g, const Assignment& a1, const Assignment& a2,
               PartPolicy policy = PartPolicy::Connected);

struct ZiCheck {
  Rational lhs;  // R(a1) - R(a2)
  Rational rhs;  // sum of correction families
  bool ok() const { return lhs == rhs; }
};

// Built-once evaluator for checking the identity at many configurations.
class ZiEvaluator {
 public:
  ZiEvaluator(const Graph& g, const Assignment& a1, const Assignment& a2,
              PartPolicy policy = PartPolicy::Connected);

  const ZiPlan& plan() const { return plan_; }
  Rational corrections_value(const Config& c) const;
  ZiCheck check(const Config& c) const;

 private:
  RPlan r1_, r2_;
  ZiPlan plan_;
  std::vector<std::vector<Weight>> terms_;  // addends, all families flattened
};

ZiCheck zi_verify(const Graph& g, const Assignment& a1, const Assignment& a2,
                  const Config& c, PartPolicy policy = PartPolicy::Connected);

// Dimension available to the local vertex absorbing a difference part's
// correction: the deeper subtraction degree plus the part's codegree.
struct ZiGroupEntry {
  VSet part;
  int d1 = -1, d2 = -1;
  int vbar_dimension = 0;
};

std::vector<ZiGroupEntry> zi_group_report(const Graph& g, const Assignment& a1,
                                          const Assignment& a2,
                                          PartPolicy policy = PartPolicy::Connected);

}  // namespace bphz
