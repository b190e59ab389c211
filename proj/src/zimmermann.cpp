#include "bphz/zimmermann.hpp"

#include <algorithm>
#include <map>

namespace bphz {

namespace {

bool disjoint(const VSet& a, const VSet& b) {
  for (int v : a)
    if (b.count(v)) return false;
  return true;
}

bool strict_superset(const VSet& big, const VSet& small) {
  return big.size() > small.size() &&
         std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Nonempty pairwise-disjoint subsets of the difference parts, in subset-lex
// order over the given list.
void collect_families(const std::vector<ZiWindow>& diffs, size_t from,
                      std::vector<size_t>& cur, std::vector<std::vector<size_t>>& out) {
  for (size_t i = from; i < diffs.size(); ++i) {
    bool ok = true;
    for (size_t j : cur)
      if (!disjoint(diffs[j].part, diffs[i].part)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    cur.push_back(i);
    out.push_back(cur);
    collect_families(diffs, i + 1, cur, out);
    cur.pop_back();
  }
}

// Operator list for one correction term.  Family members carry their
// difference windows; a part strictly containing a family member subtracts at
// the first assignment's degree, everything else at the second's.  Degrees
// below zero produce empty windows, killing the term.
std::vector<EvalPart> correction_ops(const Graph& g, const Forest& f,
                                     const std::vector<ZiWindow>& family,
                                     const std::map<std::vector<std::string>, ZiWindow>& window_of) {
  std::vector<EvalPart> ops;
  ops.reserve(f.size());
  for (const VSet& p : f) {
    const ZiWindow* fam = nullptr;
    bool outer = false;
    for (const ZiWindow& w : family) {
      if (w.part == p) fam = &w;
      if (strict_superset(p, w.part)) outer = true;
    }
    if (fam) {
      ops.push_back({p, fam->op});
    } else {
      const ZiWindow& w = window_of.at(g.part_key(p));
      ops.push_back({p, PartOp::standard(outer ? w.d1 : w.d2)});
    }
  }
  return ops;
}

}  // namespace

ZiPlan zi_plan(const Graph& g, const Assignment& a1, const Assignment& a2,
               PartPolicy policy) {
  ZiPlan plan;

  std::vector<VSet> p1 = renormalization_parts(g, a1, policy);
  std::vector<VSet> p2 = renormalization_parts(g, a2, policy);
  plan.union_parts = p1;
  for (const VSet& p : p2)
    if (std::find(p1.begin(), p1.end(), p) == p1.end()) plan.union_parts.push_back(p);
  std::sort(plan.union_parts.begin(), plan.union_parts.end(),
            [&](const VSet& a, const VSet& b) { return part_less(g, a, b); });

  for (const VSet& p : plan.union_parts) {
    ZiWindow w;
    w.part = p;
    w.d1 = oversubtraction_degree(g, p, a1);
    w.d2 = oversubtraction_degree(g, p, a2);
    if (w.d1 == w.d2) continue;
    w.op.hi = std::max(w.d1, w.d2);
    w.op.lo = std::max(0, std::min(w.d1, w.d2) + 1);
    w.op.sign = w.d1 > w.d2 ? 1 : -1;
    plan.differences.push_back(w);
  }

  std::vector<std::vector<size_t>> families;
  std::vector<size_t> cur;
  collect_families(plan.differences, 0, cur, families);

  std::vector<Forest> all = forests_over(g, plan.union_parts);
  for (const std::vector<size_t>& fam : families) {
    ZiCorrection corr;
    for (size_t i : fam) corr.family.push_back(plan.differences[i].part);
    for (const Forest& f : all) {
      bool contains = true;
      for (const VSet& p : corr.family)
        if (std::find(f.begin(), f.end(), p) == f.end()) {
          contains = false;
          break;
        }
      if (contains) corr.forests.push_back(f);
    }
    plan.corrections.push_back(std::move(corr));
  }
  return plan;
}

ZiEvaluator::ZiEvaluator(const Graph& g, const Assignment& a1, const Assignment& a2,
                         PartPolicy policy)
    : r1_(g, a1, policy), r2_(g, a2, policy), plan_(zi_plan(g, a1, a2, policy)) {
  if (r1_.tadpole()) return;  // both sides vanish identically

  std::map<std::vector<std::string>, ZiWindow> window_of;
  for (const VSet& p : plan_.union_parts) {
    ZiWindow w;
    w.part = p;
    w.d1 = oversubtraction_degree(g, p, a1);
    w.d2 = oversubtraction_degree(g, p, a2);
    window_of[g.part_key(p)] = w;
  }

  BaseSpec base = full_base(g);
  for (const ZiCorrection& corr : plan_.corrections) {
    std::vector<ZiWindow> fam;
    for (const VSet& p : corr.family)
      for (const ZiWindow& w : plan_.differences)
        if (w.part == p) fam.push_back(w);
    for (const Forest& f : corr.forests)
      terms_.push_back(forest_term(g, base, correction_ops(g, f, fam, window_of)));
  }
}

Rational ZiEvaluator::corrections_value(const Config& c) const {
  Rational total = 0;
  for (const std::vector<Weight>& term : terms_)
    for (const Weight& w : term) total += w.evaluate(c);
  return total;
}

ZiCheck ZiEvaluator::check(const Config& c) const {
  return {r1_.evaluate(c) - r2_.evaluate(c), corrections_value(c)};
}

ZiCheck zi_verify(const Graph& g, const Assignment& a1, const Assignment& a2,
                  const Config& c, PartPolicy policy) {
  return ZiEvaluator(g, a1, a2, policy).check(c);
}

std::vector<ZiGroupEntry> zi_group_report(const Graph& g, const Assignment& a1,
                                          const Assignment& a2, PartPolicy policy) {
  std::vector<ZiGroupEntry> out;
  for (const ZiWindow& w : zi_plan(g, a1, a2, policy).differences)
    out.push_back({w.part, w.d1, w.d2, std::max(w.d1, w.d2) + codegree(g, w.part)});
  return out;
}

}  // namespace bphz
