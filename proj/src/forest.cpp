#include "bphz/forest.hpp"

#include <algorithm>
#include <functional>
#include <iterator>

namespace bphz {

bool nested_or_disjoint(const VSet& a, const VSet& b) {
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (common.empty()) return true;
  return std::includes(a.begin(), a.end(), b.begin(), b.end()) ||
         std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<VSet> renormalization_parts(const Graph& g, const Assignment& a,
                                        PartPolicy policy) {
  std::vector<VSet> out;
  int nv = g.n();
  for (unsigned mask = 1; mask < (1u << nv); ++mask) {
    VSet vs;
    for (int v = 0; v < nv; ++v)
      if (mask & (1u << v)) vs.insert(v);
    if (g.induced_edges(vs).empty()) continue;
    if (policy == PartPolicy::Irreducible) {
      if (!g.one_particle_irreducible(vs)) continue;
    } else {
      if (!g.connected(vs)) continue;
    }
    if (oversubtraction_degree(g, vs, a) < 0) continue;
    out.push_back(vs);
  }
  std::sort(out.begin(), out.end(),
            [&](const VSet& x, const VSet& y) { return part_less(g, x, y); });
  return out;
}

std::vector<Forest> forests_over(const Graph& g, const std::vector<VSet>& parts) {
  std::vector<Forest> out;
  Forest current;
  // Recursive backtracking over the canonical part list; each part either
  // joins the forest (when compatible with everything chosen so far) or not.
  std::function<void(size_t)> recurse = [&](size_t idx) {
    if (idx == parts.size()) {
      out.push_back(current);
      return;
    }
    recurse(idx + 1);
    for (const VSet& chosen : current)
      if (!nested_or_disjoint(chosen, parts[idx])) return;
    current.push_back(parts[idx]);
    recurse(idx + 1);
    current.pop_back();
  };
  recurse(0);
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

std::vector<Forest> enumerate_forests(const Graph& g, const Assignment& a,
                                      PartPolicy policy) {
  return forests_over(g, renormalization_parts(g, a, policy));
}

std::vector<VSet> taylor_order(const Graph& g, const Forest& f) {
  std::vector<VSet> remaining = f;
  std::sort(remaining.begin(), remaining.end(),
            [&](const VSet& x, const VSet& y) { return part_less(g, x, y); });
  std::vector<VSet> out;
  while (!remaining.empty()) {
    // Pick the canonically first part not strictly contained in any other
    // remaining part (a maximal element of the inclusion order).
    size_t pick = remaining.size();
    for (size_t i = 0; i < remaining.size(); ++i) {
      bool maximal = true;
      for (size_t j = 0; j < remaining.size(); ++j) {
        if (i == j) continue;
        if (remaining[i] != remaining[j] &&
            std::includes(remaining[j].begin(), remaining[j].end(), remaining[i].begin(),
                          remaining[i].end())) {
          maximal = false;
          break;
        }
      }
      if (maximal) {
        pick = i;
        break;
      }
    }
    out.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + pick);
  }
  return out;
}

ForestCheck is_forest(const Graph& g, const Assignment& a, const std::vector<VSet>& parts,
                      PartPolicy policy) {
  std::vector<VSet> valid = renormalization_parts(g, a, policy);
  for (const VSet& p : parts) {
    if (std::find(valid.begin(), valid.end(), p) == valid.end())
      return {false, g.part_label(p) + " is not a renormalization part"};
  }
  for (size_t i = 0; i < parts.size(); ++i)
    for (size_t j = i + 1; j < parts.size(); ++j) {
      if (parts[i] == parts[j]) return {false, "duplicate part " + g.part_label(parts[i])};
      if (!nested_or_disjoint(parts[i], parts[j]))
        return {false, g.part_label(parts[i]) + " and " + g.part_label(parts[j]) +
                           " overlap without nesting"};
    }
  return {true, ""};
}

}  // namespace bphz
