#include "bphz/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "bphz/fit.hpp"

namespace bphz {

namespace {

bool strict_superset(const VSet& big, const VSet& small) {
  return big.size() > small.size() &&
         std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool intersects(const VSet& a, const VSet& b) {
  for (int v : a)
    if (b.count(v)) return true;
  return false;
}

// Index map original -> joined induced by the id map.
std::vector<int> image_index(const Graph& g, const Graph& delta, const VertexMap& vm) {
  std::vector<int> img(g.n());
  for (int v = 0; v < g.n(); ++v)
    img[v] = delta.vertex_index(vm.forward.at(g.verts[v].id));
  return img;
}

// Antichains of >= 2 pairwise disjoint limit-touching parts, in subset order.
void collect_families(const std::vector<VSet>& pool, size_t from, std::vector<VSet>& cur,
                      std::vector<std::vector<VSet>>& out) {
  if (cur.size() >= 2) out.push_back(cur);
  for (size_t i = from; i < pool.size(); ++i) {
    bool ok = true;
    for (const VSet& z : cur)
      if (intersects(z, pool[i])) ok = false;
    if (!ok) continue;
    cur.push_back(pool[i]);
    collect_families(pool, i + 1, cur, out);
    cur.pop_back();
  }
}

const TauInfo& tau_at(const CoincidencePlan& plan, const VSet& tau) {
  for (const TauInfo& ti : plan.taus)
    if (ti.tau == tau) return ti;
  throw std::logic_error("coincidence: unknown joined-graph part");
}

// The joined forest sum written over the original coordinates: every part
// acts through its support at the joined depth.
std::vector<std::vector<Weight>> build_r_delta_terms(const CoincidencePlan& plan) {
  BaseSpec base = full_base(plan.gamma);
  std::vector<std::vector<Weight>> terms;
  for (const Forest& f : plan.delta_forests) {
    std::vector<EvalPart> ops;
    for (const VSet& p : f) {
      const TauInfo& ti = tau_at(plan, p);
      ops.push_back({ti.support, PartOp::standard(ti.d_delta)});
    }
    terms.push_back(forest_term(plan.gamma, base, ops));
  }
  return terms;
}

std::vector<std::vector<Weight>> build_x_gamma_terms(const CoincidencePlan& plan) {
  BaseSpec base = full_base(plan.gamma);
  std::vector<std::vector<Weight>> terms;
  for (const BadForest& bf : plan.bad_forests) {
    std::vector<EvalPart> ops;
    for (const VSet& p : bf.forest)
      ops.push_back(
          {p, PartOp::standard(oversubtraction_degree(plan.gamma, p, plan.a_gamma))});
    terms.push_back(forest_term(plan.gamma, base, ops));
  }
  return terms;
}

// Correction windows: one group per new or raised part, summed over the
// joined forests containing it.  Parts strictly containing the special one
// keep the joined depth; all others fall back to the original depth, and
// kill the term when their support is not an original-graph part.
std::vector<std::vector<Weight>> build_x_delta_terms(const CoincidencePlan& plan) {
  BaseSpec base = full_base(plan.gamma);
  std::vector<std::vector<Weight>> terms;
  for (const TauInfo& special : plan.taus) {
    if (!special.special()) continue;
    for (const Forest& f : plan.delta_forests) {
      if (std::find(f.begin(), f.end(), special.tau) == f.end()) continue;
      std::vector<EvalPart> ops;
      for (const VSet& p : f) {
        const TauInfo& ti = tau_at(plan, p);
        if (p == special.tau)
          ops.push_back({ti.support, special.op});
        else if (strict_superset(p, special.tau))
          ops.push_back({ti.support, PartOp::standard(ti.d_delta)});
        else
          ops.push_back({ti.support, ti.gamma_part ? PartOp::standard(ti.d_gamma)
                                                   : PartOp{0, -1, 1}});
      }
      terms.push_back(forest_term(plan.gamma, base, ops));
    }
  }
  return terms;
}

Rational sum_terms(const std::vector<std::vector<Weight>>& terms, const Config& c) {
  Rational total = 0;
  for (const std::vector<Weight>& term : terms)
    for (const Weight& w : term) total += w.evaluate(c);
  return total;
}

}  // namespace

CoincidencePlan plan_coincidence(const Graph& g, const Assignment& a, PartPolicy policy) {
  if (g.limit_set.empty())
    throw std::invalid_argument("coincidence: the graph has no limit set");
  for (const Edge& e : g.edges)
    if (g.limit_set.count(e.src) && g.limit_set.count(e.dst))
      throw std::invalid_argument(
          "coincidence: an edge joins two limit vertices; the limit meets a "
          "propagator pole");

  CoincidencePlan plan;
  plan.gamma = g;
  plan.a_gamma = a;
  plan.policy = policy;
  auto [delta, vm] = join_vertices(g, g.limit_set);
  plan.delta = std::move(delta);
  plan.vm = std::move(vm);
  plan.v0 = plan.delta.vertex_index(plan.vm.merged_id);

  for (int dv = 0; dv < plan.delta.n(); ++dv) {
    const std::string& id = plan.delta.verts[dv].id;
    if (dv == plan.v0) {
      int sum = 0;
      for (int v : g.limit_set) sum += a.delta(v);
      plan.a_delta.vertex_deltas[dv] = sum;
    } else {
      plan.a_delta.vertex_deltas[dv] = a.delta(g.vertex_index(id));
    }
  }
  std::vector<int> img = image_index(g, plan.delta, plan.vm);
  for (const auto& [part, d] : a.part_overrides) {
    VSet mapped;
    for (int v : part) mapped.insert(img[v]);
    plan.a_delta.part_overrides.push_back({mapped, d});
  }

  plan.gamma_parts = renormalization_parts(g, a, policy);
  for (const VSet& tau : renormalization_parts(plan.delta, plan.a_delta, policy)) {
    TauInfo ti;
    ti.tau = tau;
    for (int v = 0; v < g.n(); ++v)
      if (tau.count(img[v])) ti.preimage.insert(v);
    for (int e : plan.delta.induced_edges(tau)) {
      ti.support.insert(g.edges[e].src);
      ti.support.insert(g.edges[e].dst);
    }
    ti.d_delta = oversubtraction_degree(plan.delta, tau, plan.a_delta);
    ti.d_gamma = oversubtraction_degree(g, ti.support, a);
    ti.gamma_part = std::find(plan.gamma_parts.begin(), plan.gamma_parts.end(),
                              ti.support) != plan.gamma_parts.end();
    ti.is_new = !ti.gamma_part;
    ti.raised = ti.gamma_part && ti.d_delta > ti.d_gamma;
    if (ti.gamma_part && ti.d_delta < ti.d_gamma)
      throw std::logic_error("coincidence: joining lowered a part's degree");
    if (ti.is_new)
      ti.op = PartOp{0, ti.d_delta, 1};
    else if (ti.raised)
      ti.op = PartOp{ti.d_gamma + 1, ti.d_delta, 1};
    if (ti.special() && !tau.count(plan.v0))
      throw std::logic_error("coincidence: special part avoids the merged vertex");
    plan.taus.push_back(std::move(ti));
  }

  for (const TauInfo& outer : plan.taus) {
    if (!outer.special()) continue;
    for (const TauInfo& inner : plan.taus)
      if (inner.special() && strict_superset(outer.tau, inner.tau))
        plan.nested_specials = true;
  }

  plan.delta_forests = enumerate_forests(plan.delta, plan.a_delta, policy);

  for (const Forest& f : enumerate_forests(g, a, policy)) {
    std::string reason;
    for (const VSet& zeta : f) {
      VSet zhat;
      for (int v : zeta) zhat.insert(img[v]);
      VSet round_trip;
      for (int e : plan.delta.induced_edges(zhat)) {
        round_trip.insert(g.edges[e].src);
        round_trip.insert(g.edges[e].dst);
      }
      if (round_trip != zeta) {
        reason = g.part_label(zeta) + " is not saturated";
        break;
      }
    }
    if (reason.empty()) {
      for (size_t i = 0; i < f.size() && reason.empty(); ++i)
        for (size_t j = i + 1; j < f.size(); ++j)
          if (!intersects(f[i], f[j]) && intersects(f[i], g.limit_set) &&
              intersects(f[j], g.limit_set)) {
            reason = g.part_label(f[i]) + " and " + g.part_label(f[j]) +
                     " are disjoint and both touch the limit set";
            break;
          }
    }
    if (reason.empty())
      ++plan.good_forest_count;
    else
      plan.bad_forests.push_back({f, std::move(reason)});
  }

  std::vector<VSet> touching;
  for (const VSet& p : plan.gamma_parts)
    if (intersects(p, g.limit_set)) touching.push_back(p);
  std::vector<VSet> cur;
  collect_families(touching, 0, cur, plan.overlap_families);
  return plan;
}

CoincidenceEvaluator::CoincidenceEvaluator(CoincidencePlan plan)
    : plan_(std::move(plan)), r_gamma_(plan_.gamma, plan_.a_gamma, plan_.policy) {
  base_weight_ = forest_term(plan_.gamma, full_base(plan_.gamma), {});
  r_delta_terms_ = build_r_delta_terms(plan_);
  x_gamma_terms_ = build_x_gamma_terms(plan_);
  x_delta_terms_ = build_x_delta_terms(plan_);
}

CoincidenceEvaluator::CoincidenceEvaluator(const Graph& g, const Assignment& a,
                                           PartPolicy policy)
    : CoincidenceEvaluator(plan_coincidence(g, a, policy)) {}

Rational CoincidenceEvaluator::unsubtracted(const Config& c) const {
  Rational total = 0;
  for (const Weight& w : base_weight_) total += w.evaluate(c);
  return total;
}

Rational CoincidenceEvaluator::r_delta(const Config& c) const {
  return sum_terms(r_delta_terms_, c);
}

Rational CoincidenceEvaluator::r_gamma(const Config& c) const {
  return r_gamma_.evaluate(c);
}

CoincidenceCheck CoincidenceEvaluator::check(const Config& c) const {
  CoincidenceCheck out;
  out.r_delta = sum_terms(r_delta_terms_, c);
  out.r_gamma = r_gamma_.evaluate(c);
  out.x_gamma = sum_terms(x_gamma_terms_, c);
  out.x_delta = sum_terms(x_delta_terms_, c);
  return out;
}

Rational r_delta_on_gamma(const CoincidencePlan& plan, const Config& c) {
  return sum_terms(build_r_delta_terms(plan), c);
}

Rational overlap_corrections(const CoincidencePlan& plan, const Config& c) {
  return sum_terms(build_x_gamma_terms(plan), c);
}

Rational diagonal_corrections(const CoincidencePlan& plan, const Config& c) {
  return sum_terms(build_x_delta_terms(plan), c);
}

DecompositionReport verify_decomposition(const CoincidencePlan& plan,
                                         const std::vector<Config>& configs) {
  CoincidenceEvaluator ev(plan);
  DecompositionReport report;
  for (const Config& c : configs) report.checks.push_back(ev.check(c));
  return report;
}

DecompositionReport verify_decomposition(const Graph& g, const Assignment& a,
                                         const std::vector<Config>& configs,
                                         PartPolicy policy) {
  return verify_decomposition(plan_coincidence(g, a, policy), configs);
}

Config scaled_config(const Config& base,
                     const std::vector<std::pair<PosId, std::array<Rational, 4>>>& moves,
                     const Rational& lambda) {
  Config out = base;
  for (const auto& [pos, target] : moves) {
    const std::array<Rational, 4>& from = base.at(pos);
    std::array<Rational, 4> pt;
    for (int mu = 0; mu < 4; ++mu) pt[mu] = target[mu] + lambda * (from[mu] - target[mu]);
    out[pos] = pt;
  }
  return out;
}

CoincidenceProbe coincidence_probe(const CoincidenceEvaluator& ev, const Config& base,
                                   const std::array<Rational, 4>& common, bool move_spectators,
                                   int k_lo, int k_hi) {
  const Graph& g = ev.plan().gamma;
  std::vector<std::pair<PosId, std::array<Rational, 4>>> moves;
  for (int v : g.limit_set) moves.push_back({g.verts[v].pos, common});
  if (move_spectators)
    for (int v = 0; v < g.n(); ++v)
      if (!g.limit_set.count(v)) moves.push_back({g.verts[v].pos, common});

  CoincidenceProbe probe;
  std::vector<double> ax_u, ax_g, ax_d, val_u, val_g, val_d;
  for (int k = k_lo; k <= k_hi; ++k) {
    Rational lambda(1, long(1) << k);
    Config c = scaled_config(base, moves, lambda);
    ProbeRow row;
    row.lambda = lambda;
    row.value_unsubtracted = ev.unsubtracted(c);
    row.value_gamma = ev.r_gamma(c);
    row.value_delta = ev.r_delta(c);
    if (row.value_unsubtracted != 0) {
      ax_u.push_back(-double(k));
      val_u.push_back(std::log2(std::fabs(row.value_unsubtracted.get_d())));
    }
    if (row.value_gamma != 0) {
      ax_g.push_back(-double(k));
      val_g.push_back(std::log2(std::fabs(row.value_gamma.get_d())));
    }
    if (row.value_delta != 0) {
      ax_d.push_back(-double(k));
      val_d.push_back(std::log2(std::fabs(row.value_delta.get_d())));
    }
    probe.rows.push_back(std::move(row));
  }
  probe.slope_unsubtracted = fitted_slope(ax_u, val_u);
  probe.slope_r_gamma = fitted_slope(ax_g, val_g);
  probe.slope_r_delta = fitted_slope(ax_d, val_d);
  return probe;
}

int NormalMonomial::dim() const {
  int d = fields;
  for (int k : slot_derivs) d += k;
  return d;
}

int normal_product_degree(const std::vector<NormalMonomial>& monomials, int requested) {
  int minimal = 0;
  for (const NormalMonomial& m : monomials) minimal += m.dim();
  if (requested < 0) return minimal;
  if (requested < minimal)
    throw std::invalid_argument("normal product degree " + std::to_string(requested) +
                                " is below the minimal " + std::to_string(minimal));
  return requested;
}

}  // namespace bphz
