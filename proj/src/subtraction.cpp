#include "bphz/subtraction.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <stdexcept>

namespace bphz {

namespace {

// Variable-level support: every coordinate the weight can depend on.
std::set<Var> var_support(const Weight& w) {
  std::set<Var> s = w.num.support();
  for (const auto& [key, exp] : w.den) {
    (void)exp;
    for (const auto& [p, c] : key.form.coeff) {
      (void)c;
      for (int mu = 0; mu < kDim; ++mu) s.insert(coord_var(p, mu));
    }
  }
  return s;
}

// All multi-indices over `vars` with lo <= |alpha| <= hi.
void for_each_alpha(const std::vector<Var>& vars, int lo, int hi,
                    const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> counts(vars.size(), 0);
  std::function<void(size_t, int)> rec = [&](size_t idx, int total) {
    if (idx == vars.size()) {
      if (total >= lo) emit(counts);
      return;
    }
    for (int k = 0; total + k <= hi; ++k) {
      counts[idx] = k;
      rec(idx + 1, total + k);
    }
    counts[idx] = 0;
  };
  if (hi < 0) return;
  rec(0, 0);
}

struct Piece {
  int dest = -1;  // index into the part list, -1 for the enclosing graph
  bool expand = false;  // test factor, consumed by the dest part's operator
  Weight w;
};

struct TermState {
  Weight ride;
  std::vector<Piece> pieces;
};

}  // namespace

Weight edge_weight(const Graph& g, int e) {
  const Edge& ed = g.edges.at(e);
  if (ed.src == ed.dst)
    throw std::invalid_argument("edge " + std::to_string(e) +
                                " is a self-loop; the tadpole convention applies");
  const Vertex& vs = g.verts[ed.src];
  const Vertex& vd = g.verts[ed.dst];
  if (vs.wave_slot && *vs.wave_slot == ed.src_slot)
    throw std::invalid_argument("edge " + std::to_string(e) +
                                " contracts a wave slot; fuse it first");
  if (vd.wave_slot && *vd.wave_slot == ed.dst_slot)
    throw std::invalid_argument("edge " + std::to_string(e) +
                                " contracts a wave slot; fuse it first");
  Weight w = Weight::inv_sigma(vs.pos, vd.pos);
  for (int k = 0; k < vs.slot_derivs[ed.src_slot]; ++k) w = w.derivative(vs.pos, 0);
  for (int k = 0; k < vd.slot_derivs[ed.dst_slot]; ++k) w = w.derivative(vd.pos, 0);
  return w;
}

Weight graph_weight(const Graph& g) {
  Weight w = Weight::one();
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) w = w * edge_weight(g, e);
  for (const Vertex& v : g.verts)
    if (v.test_factor) w = w * Weight::from_poly(*v.test_factor);
  return w;
}

std::map<int, Rational> subtraction_weights(const Graph& g, const VSet& part) {
  std::vector<int> edges = g.induced_edges(part);
  if (edges.empty())
    throw std::invalid_argument("part " + g.part_label(part) + " has no induced edges");
  Rational total = Rational(2 * static_cast<int>(edges.size()));
  std::map<int, Rational> out;
  for (int v : part) out[v] = Rational(g.valence(v, edges)) / total;
  return out;
}

std::vector<Weight> taylor_terms(const Graph& g, const VSet& part, int degree, const Weight& w) {
  if (degree < 0) return {};
  std::map<int, Rational> sw = subtraction_weights(g, part);

  LinForm xbar;
  for (const auto& [v, c] : sw)
    if (c != 0) xbar.add(g.verts[v].pos, c);
  std::array<Poly, kDim> xbar_poly;
  for (int mu = 0; mu < kDim; ++mu) xbar_poly[mu] = xbar.coord_poly(mu);

  std::map<PosId, LinForm> collapse;
  std::set<PosId> coords;
  for (int v : part) {
    collapse[g.verts[v].pos] = xbar;
    coords.insert(g.verts[v].pos);
  }

  std::vector<Var> vars;
  for (Var v : var_support(w))
    if (coords.count(var_pos(v))) vars.push_back(v);

  std::vector<Weight> out;
  for_each_alpha(vars, 0, degree, [&](const std::vector<int>& counts) {
    Weight d = w;
    Rational fact = 1;
    Poly pref = Poly::constant(1);
    for (size_t i = 0; i < vars.size(); ++i) {
      for (int k = 0; k < counts[i]; ++k) d = d.derivative_var(vars[i]);
      if (counts[i] > 0) {
        fact *= rat_factorial(counts[i]);
        pref = pref * (Poly::var(vars[i]) - xbar_poly[var_mu(vars[i])]).pow(counts[i]);
      }
    }
    if (d.is_zero()) return;
    d = d.substitute_points(collapse);
    if (d.is_zero()) return;
    out.push_back((Weight::from_poly(pref) * d).scale(Rational(1) / fact));
  });
  return out;
}

Weight apply_taylor(const Graph& g, const VSet& part, int degree, const Weight& w) {
  Weight acc = Weight::zero();
  for (const Weight& t : taylor_terms(g, part, degree, w)) acc = acc + t;
  return acc;
}

BaseSpec full_base(const Graph& g) {
  BaseSpec b;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) b.edges.push_back(e);
  for (int v = 0; v < g.n(); ++v) b.tf_vertices.push_back(v);
  return b;
}

std::vector<Weight> forest_term(const Graph& g, const BaseSpec& base,
                                const std::vector<EvalPart>& parts) {
  int np = static_cast<int>(parts.size());
  for (const EvalPart& p : parts)
    if (p.op.kills()) return {};

  // Containment matrix and structural checks.
  auto subset = [](const VSet& a, const VSet& b) {  // a subseteq b
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j) {
      if (parts[i].vertices == parts[j].vertices)
        throw std::invalid_argument("duplicate part " + g.part_label(parts[i].vertices));
      if (!nested_or_disjoint(parts[i].vertices, parts[j].vertices))
        throw std::invalid_argument(g.part_label(parts[i].vertices) + " and " +
                                    g.part_label(parts[j].vertices) + " overlap without nesting");
    }
  std::vector<std::vector<bool>> inside(np, std::vector<bool>(np, false));
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j)
      inside[i][j] = subset(parts[j].vertices, parts[i].vertices);  // j inside i

  // Maximal proper subparts of each part.
  std::vector<std::vector<int>> kids(np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j) {
      if (i == j || !inside[i][j]) continue;
      bool maximal = true;
      for (int k = 0; k < np; ++k)
        if (k != i && k != j && inside[i][k] && inside[k][j]) maximal = false;
      if (maximal) kids[i].push_back(j);
    }

  // Application order: innermost first.
  Forest sets;
  for (const EvalPart& p : parts) sets.push_back(p.vertices);
  std::vector<VSet> order = taylor_order(g, sets);
  std::vector<int> seq;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (int i = 0; i < np; ++i)
      if (parts[i].vertices == *it) seq.push_back(i);

  auto innermost_holding = [&](const VSet& need) {
    int best = -1;
    size_t best_size = 0;
    for (int i = 0; i < np; ++i) {
      if (!subset(need, parts[i].vertices)) continue;
      if (best < 0 || parts[i].vertices.size() < best_size) {
        best = i;
        best_size = parts[i].vertices.size();
      }
    }
    return best;
  };

  // Base material.
  std::vector<Piece> base_pieces;
  for (int e : base.edges) {
    const Edge& ed = g.edges.at(e);
    base_pieces.push_back(Piece{innermost_holding({ed.src, ed.dst}), false, edge_weight(g, e)});
  }
  for (int v : base.tf_vertices) {
    const Vertex& vx = g.verts.at(v);
    if (!vx.test_factor) continue;
    if (vx.test_factor->is_zero()) return {};
    base_pieces.push_back(Piece{innermost_holding({v}), true, Weight::from_poly(*vx.test_factor)});
  }

  // Collapse symbols, one per part, allocated in application order.
  std::vector<PosId> ysym(np, -1);
  PosId next = g.next_pos;
  for (int ci : seq) ysym[ci] = next++;
  std::vector<std::pair<PosId, LinForm>> defs;  // creation order

  std::vector<TermState> states;
  states.push_back(TermState{Weight::one(), base_pieces});

  for (int ci : seq) {
    const EvalPart& part = parts[ci];

    // The part's current frame: its own vertices, already-collapsed children
    // standing in as single points.
    std::map<int, PosId> frame;  // vertex index -> current symbol
    for (int v : part.vertices) frame[v] = g.verts[v].pos;
    std::set<int> child_edges;
    for (int k : kids[ci]) {
      for (int v : parts[k].vertices) frame[v] = ysym[k];
      for (int e : g.induced_edges(parts[k].vertices)) child_edges.insert(e);
    }
    std::set<PosId> coords;
    for (const auto& [v, p] : frame) coords.insert(p);

    std::vector<int> cur_edges;
    for (int e : g.induced_edges(part.vertices))
      if (!child_edges.count(e)) cur_edges.push_back(e);
    if (cur_edges.empty())
      throw std::logic_error("part " + g.part_label(part.vertices) +
                             " has no edges of its own in this forest");

    // Subtraction point over the reduced frame, weighted by edge ends.
    std::map<PosId, int> ends;
    for (int e : cur_edges) {
      ends[frame[g.edges[e].src]] += 1;
      ends[frame[g.edges[e].dst]] += 1;
    }
    Rational total = Rational(2 * static_cast<int>(cur_edges.size()));
    LinForm ydef;
    for (const auto& [p, k] : ends) ydef.add(p, Rational(k) / total);
    std::array<Poly, kDim> xbar_poly;
    for (int mu = 0; mu < kDim; ++mu) xbar_poly[mu] = ydef.coord_poly(mu);

    PosId y = ysym[ci];
    std::map<PosId, LinForm> collapse;
    for (PosId p : coords) collapse[p] = LinForm::point(y);

    std::vector<TermState> next_states;
    for (const TermState& s : states) {
      std::vector<int> elig, keep;
      for (int idx = 0; idx < static_cast<int>(s.pieces.size()); ++idx) {
        const Piece& pc = s.pieces[idx];
        bool ok;
        if (pc.expand) {
          ok = (pc.dest == ci);
        } else {
          ok = (pc.dest < 0) || !inside[ci][pc.dest];
        }
        (ok ? elig : keep).push_back(idx);
      }

      std::vector<std::set<Var>> esup;
      std::set<Var> avars;
      for (int idx : elig) {
        std::set<Var> sup;
        for (Var v : var_support(s.pieces[idx].w))
          if (coords.count(var_pos(v))) sup.insert(v);
        for (Var v : sup) avars.insert(v);
        esup.push_back(sup);
      }
      std::vector<Var> avlist(avars.begin(), avars.end());

      for_each_alpha(avlist, part.op.lo, part.op.hi, [&](const std::vector<int>& counts) {
        Poly pref = Poly::constant(1);
        for (size_t i = 0; i < avlist.size(); ++i)
          if (counts[i] > 0)
            pref = pref * (Poly::var(avlist[i]) - xbar_poly[var_mu(avlist[i])]).pow(counts[i]);

        // Leibniz: hand each derivative order out over the pieces that can
        // absorb it, then collapse every eligible piece onto y.
        std::vector<std::map<Var, int>> beta(elig.size());
        std::function<void(size_t)> dist = [&](size_t vi) {
          if (vi == avlist.size()) {
            TermState ns;
            ns.ride = s.ride * Weight::from_poly(pref).scale(Rational(-part.op.sign));
            for (size_t pi = 0; pi < elig.size(); ++pi) {
              Weight w = s.pieces[elig[pi]].w;
              Rational fact = 1;
              for (const auto& [v, k] : beta[pi]) {
                for (int r = 0; r < k; ++r) w = w.derivative_var(v);
                fact *= rat_factorial(k);
              }
              if (w.is_zero()) return;
              w = w.substitute_points(collapse).scale(Rational(1) / fact);
              if (w.is_zero()) return;
              const Piece& orig = s.pieces[elig[pi]];
              if (orig.dest == ci)
                ns.ride = ns.ride * w;  // consumed test factor
              else
                ns.pieces.push_back(Piece{orig.dest, orig.expand, w});
            }
            for (int idx : keep) ns.pieces.push_back(s.pieces[idx]);
            next_states.push_back(std::move(ns));
            return;
          }
          int want = counts[vi];
          if (want == 0) {
            dist(vi + 1);
            return;
          }
          std::vector<size_t> cands;
          for (size_t pi = 0; pi < elig.size(); ++pi)
            if (esup[pi].count(avlist[vi])) cands.push_back(pi);
          std::function<void(size_t, int)> comp = [&](size_t c, int left) {
            if (c == cands.size()) {
              if (left == 0) dist(vi + 1);
              return;
            }
            for (int k = 0; k <= left; ++k) {
              if (k > 0) beta[cands[c]][avlist[vi]] = k;
              comp(c + 1, left - k);
              beta[cands[c]].erase(avlist[vi]);
            }
          };
          comp(0, want);
        };
        dist(0);
      });
    }
    defs.emplace_back(y, ydef);
    states = std::move(next_states);
    if (states.empty()) return {};
  }

  std::vector<Weight> out;
  for (const TermState& s : states) {
    Weight w = s.ride;
    for (const Piece& pc : s.pieces) w = w * pc.w;
    for (auto it = defs.rbegin(); it != defs.rend(); ++it)
      w = w.substitute_points({{it->first, it->second}});
    if (!w.is_zero()) out.push_back(w);
  }
  return out;
}

RPlan::RPlan(const Graph& g, const Assignment& a, PartPolicy policy) {
  if (!g.self_loop_edges().empty()) {
    tadpole_ = true;
    return;
  }
  forests_ = enumerate_forests(g, a, policy);
  BaseSpec base = full_base(g);
  for (const Forest& f : forests_) {
    std::vector<EvalPart> eps;
    for (const VSet& p : f)
      eps.push_back(EvalPart{p, PartOp::standard(oversubtraction_degree(g, p, a))});
    terms_.push_back(forest_term(g, base, eps));
  }
}

Rational RPlan::evaluate(const Config& c) const {
  Rational total = 0;
  for (const auto& addends : terms_)
    for (const Weight& w : addends) total += w.evaluate(c);
  return total;
}

std::vector<Rational> RPlan::per_forest_values(const Config& c) const {
  std::vector<Rational> out;
  for (const auto& addends : terms_) {
    Rational v = 0;
    for (const Weight& w : addends) v += w.evaluate(c);
    out.push_back(v);
  }
  return out;
}

RResult r_operation(const Graph& g, const Assignment& a, const Config& c, PartPolicy policy) {
  RPlan plan(g, a, policy);
  RResult res;
  res.tadpole = plan.tadpole();
  if (res.tadpole) {
    res.total = 0;
    return res;
  }
  std::vector<Rational> vals = plan.per_forest_values(c);
  res.total = 0;
  for (size_t i = 0; i < vals.size(); ++i) {
    res.total += vals[i];
    res.per_forest.emplace_back(plan.forests()[i], vals[i]);
  }
  return res;
}

Rational r_normal(const Graph& g, const Assignment& a, const VSet& part, const Config& c,
                  PartPolicy policy) {
  std::vector<VSet> below;
  for (const VSet& q : renormalization_parts(g, a, policy))
    if (q != part &&
        std::includes(part.begin(), part.end(), q.begin(), q.end()))
      below.push_back(q);
  BaseSpec base;
  base.edges = g.induced_edges(part);
  base.tf_vertices.assign(part.begin(), part.end());
  Rational total = 0;
  for (const Forest& f : forests_over(g, below)) {
    std::vector<EvalPart> eps;
    for (const VSet& p : f)
      eps.push_back(EvalPart{p, PartOp::standard(oversubtraction_degree(g, p, a))});
    for (const Weight& w : forest_term(g, base, eps)) total += w.evaluate(c);
  }
  return total;
}

}  // namespace bphz
