#include "bphz/field_equation.hpp"

#include <stdexcept>

namespace bphz {

namespace {

// Removes one slot from a vertex: the slot list shrinks, every edge slot
// index above it at that vertex shifts down, and a wave marker above it
// shifts with them.
void delete_slot(Graph& g, int v, int slot) {
  Vertex& vx = g.verts[v];
  vx.slot_derivs.erase(vx.slot_derivs.begin() + slot);
  vx.fields -= 1;
  if (vx.wave_slot) {
    if (*vx.wave_slot == slot)
      vx.wave_slot.reset();
    else if (*vx.wave_slot > slot)
      *vx.wave_slot -= 1;
  }
  for (Edge& e : g.edges) {
    if (e.src == v && e.src_slot > slot) e.src_slot -= 1;
    if (e.dst == v && e.dst_slot > slot) e.dst_slot -= 1;
  }
}

}  // namespace

FusionRecord fuse_wave_edge(const Graph& g, int wave_vertex, int slot) {
  g.check_valid();
  if (wave_vertex < 0 || wave_vertex >= g.n())
    throw std::invalid_argument("fuse: vertex index out of range");
  const Vertex& v0 = g.verts[wave_vertex];
  if (!v0.wave_slot || *v0.wave_slot != slot)
    throw std::invalid_argument("fuse: slot " + std::to_string(slot) + " of \"" +
                                v0.id + "\" is not its wave slot");

  FusionRecord rec;
  rec.source = g;
  rec.wave_vertex = wave_vertex;
  rec.wave_slot = slot;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    const Edge& ed = g.edges[e];
    if (ed.src == wave_vertex && ed.src_slot == slot) {
      rec.wave_edge = e;
      rec.partner = ed.dst;
      rec.partner_slot = ed.dst_slot;
    } else if (ed.dst == wave_vertex && ed.dst_slot == slot) {
      rec.wave_edge = e;
      rec.partner = ed.src;
      rec.partner_slot = ed.src_slot;
    }
  }
  if (rec.wave_edge < 0)
    throw std::invalid_argument(
        "fuse: the wave slot is external; the term contributes no fusion");
  if (rec.partner == wave_vertex)
    throw std::invalid_argument("fuse: the wave edge is a self-loop");
  const Vertex& pv = g.verts[rec.partner];
  if (pv.wave_slot && *pv.wave_slot == rec.partner_slot)
    throw std::invalid_argument(
        "fuse: the partner slot carries a wave operator; only a plain field fuses");
  if (pv.slot_derivs[rec.partner_slot] != 0)
    throw std::invalid_argument(
        "fuse: the partner slot carries derivatives; only a plain field fuses");

  rec.delta_wave = v0.delta ? *v0.delta : g.dim_phi(wave_vertex);
  rec.delta_partner = pv.delta ? *pv.delta : g.dim_phi(rec.partner);

  rec.reduced = g;
  rec.reduced.edges.erase(rec.reduced.edges.begin() + rec.wave_edge);
  delete_slot(rec.reduced, wave_vertex, slot);
  delete_slot(rec.reduced, rec.partner, rec.partner_slot);
  if (rec.reduced.verts[wave_vertex].delta)
    *rec.reduced.verts[wave_vertex].delta -= 3;
  if (rec.reduced.verts[rec.partner].delta)
    *rec.reduced.verts[rec.partner].delta -= 1;
  rec.reduced.limit_set = {wave_vertex, rec.partner};
  rec.reduced.check_valid();

  auto [fused, vm] = join_vertices(rec.reduced, rec.reduced.limit_set);
  vm.kind = VertexMap::Kind::Fusion;
  rec.merged = fused.vertex_index(vm.merged_id);
  fused.limit_set.clear();
  rec.fused = std::move(fused);
  rec.vm = std::move(vm);
  return rec;
}

WaveDegreeSplit wave_degree_split(int phi_dim) {
  if (phi_dim < 0)
    throw std::invalid_argument("wave split needs a nonnegative field dimension");
  WaveDegreeSplit s;
  s.upper = phi_dim + 3;
  s.lower = phi_dim + 1;
  s.window = PartOp{phi_dim + 2, phi_dim + 3, 1};
  return s;
}

FieldEqReport field_eq_decomposition(const Graph& g, int wave_vertex,
                                     const Assignment& a,
                                     const std::vector<Config>& configs,
                                     PartPolicy policy) {
  if (wave_vertex < 0 || wave_vertex >= g.n())
    throw std::invalid_argument("fuse: vertex index out of range");
  if (!g.verts[wave_vertex].wave_slot)
    throw std::invalid_argument("fuse: vertex \"" + g.verts[wave_vertex].id +
                                "\" carries no wave slot");

  FieldEqReport out;
  out.fusion = fuse_wave_edge(g, wave_vertex, *g.verts[wave_vertex].wave_slot);
  out.reduced_assignment = a;
  out.reduced_assignment.vertex_deltas.at(wave_vertex) -= 3;
  out.reduced_assignment.vertex_deltas.at(out.fusion.partner) -= 1;
  out.plan = plan_coincidence(out.fusion.reduced, out.reduced_assignment, policy);
  out.report = verify_decomposition(out.plan, configs);
  return out;
}

}  // namespace bphz
