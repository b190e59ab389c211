#include "bphz/graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace bphz {

namespace {

std::string bad(const std::string& msg) { return "graph: " + msg; }

}  // namespace

int Graph::vertex_index(const std::string& id) const {
  auto idx = find_vertex(id);
  if (!idx) throw std::invalid_argument(bad("unknown vertex \"" + id + "\""));
  return *idx;
}

std::optional<int> Graph::find_vertex(const std::string& id) const {
  for (int i = 0; i < n(); ++i)
    if (verts[i].id == id) return i;
  return std::nullopt;
}

int Graph::eff_derivs(int v, int slot) const {
  const Vertex& vx = verts[v];
  int d = vx.slot_derivs[slot];
  if (vx.wave_slot && *vx.wave_slot == slot) d += 2;
  return d;
}

int Graph::dim_phi(int v) const {
  const Vertex& vx = verts[v];
  int d = vx.fields;
  for (int s = 0; s < vx.fields; ++s) d += eff_derivs(v, s);
  return d;
}

void Graph::check_valid() const {
  std::set<std::string> ids;
  std::set<PosId> poss;
  for (const Vertex& v : verts) {
    if (v.id.empty()) throw std::invalid_argument(bad("empty vertex id"));
    if (!ids.insert(v.id).second)
      throw std::invalid_argument(bad("duplicate vertex id \"" + v.id + "\""));
    if (!poss.insert(v.pos).second)
      throw std::invalid_argument(bad("duplicate coordinate symbol at \"" + v.id + "\""));
    if (v.pos >= next_pos)
      throw std::invalid_argument(bad("coordinate symbol out of range at \"" + v.id + "\""));
    if (v.fields < 0) throw std::invalid_argument(bad("negative field count at \"" + v.id + "\""));
    if (static_cast<int>(v.slot_derivs.size()) != v.fields)
      throw std::invalid_argument(bad("slot_derivs length mismatch at \"" + v.id + "\""));
    for (int d : v.slot_derivs)
      if (d < 0) throw std::invalid_argument(bad("negative derivative order at \"" + v.id + "\""));
    if (v.wave_slot) {
      if (*v.wave_slot < 0 || *v.wave_slot >= v.fields)
        throw std::invalid_argument(bad("wave slot index out of range at \"" + v.id + "\""));
      if (v.slot_derivs[*v.wave_slot] != 0)
        throw std::invalid_argument(
            bad("wave slot must carry no extra derivatives at \"" + v.id + "\""));
    }
  }
  std::set<std::pair<int, int>> used;
  for (size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    std::ostringstream where;
    where << "edge #" << i;
    if (e.src < 0 || e.src >= n() || e.dst < 0 || e.dst >= n())
      throw std::invalid_argument(bad(where.str() + ": endpoint out of range"));
    if (e.src_slot < 0 || e.src_slot >= verts[e.src].fields)
      throw std::invalid_argument(bad(where.str() + ": source slot out of range at \"" +
                                      verts[e.src].id + "\""));
    if (e.dst_slot < 0 || e.dst_slot >= verts[e.dst].fields)
      throw std::invalid_argument(bad(where.str() + ": target slot out of range at \"" +
                                      verts[e.dst].id + "\""));
    if (!used.insert({e.src, e.src_slot}).second)
      throw std::invalid_argument(
          bad(where.str() + ": slot reused at \"" + verts[e.src].id + "\""));
    if (!used.insert({e.dst, e.dst_slot}).second)
      throw std::invalid_argument(
          bad(where.str() + ": slot reused at \"" + verts[e.dst].id + "\""));
  }
  for (int v : limit_set)
    if (v < 0 || v >= n()) throw std::invalid_argument(bad("limit set index out of range"));
}

std::vector<int> Graph::induced_edges(const VSet& vs) const {
  std::vector<int> out;
  for (size_t i = 0; i < edges.size(); ++i)
    if (vs.count(edges[i].src) && vs.count(edges[i].dst)) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<std::pair<int, int>> Graph::external_slots(const VSet& vs) const {
  std::set<std::pair<int, int>> internal;
  for (int e : induced_edges(vs)) {
    internal.insert({edges[e].src, edges[e].src_slot});
    internal.insert({edges[e].dst, edges[e].dst_slot});
  }
  std::vector<std::pair<int, int>> out;
  for (int v : vs)
    for (int s = 0; s < verts[v].fields; ++s)
      if (!internal.count({v, s})) out.emplace_back(v, s);
  return out;
}

std::vector<VSet> Graph::components(const VSet& vs) const {
  std::vector<int> idx(vs.begin(), vs.end());
  std::map<int, int> comp;  // vertex -> component representative
  for (int v : idx) comp[v] = v;
  std::function<int(int)> find = [&](int v) {
    while (comp[v] != v) v = comp[v] = comp[comp[v]];
    return v;
  };
  for (int e : induced_edges(vs)) {
    int a = find(edges[e].src), b = find(edges[e].dst);
    if (a != b) comp[std::max(a, b)] = std::min(a, b);
  }
  std::map<int, VSet> groups;
  for (int v : idx) groups[find(v)].insert(v);
  std::vector<VSet> out;
  for (auto& [root, grp] : groups) out.push_back(grp);
  return out;
}

std::vector<VSet> Graph::components() const { return components(all_vertices()); }

bool Graph::connected(const VSet& vs) const {
  return !vs.empty() && components(vs).size() == 1;
}

bool Graph::one_particle_irreducible(const VSet& vs) const {
  if (!connected(vs)) return false;
  std::vector<int> internal = induced_edges(vs);
  if (internal.empty()) return false;
  for (size_t drop = 0; drop < internal.size(); ++drop) {
    // A self-loop is never a bridge.
    const Edge& e = edges[internal[drop]];
    if (e.src == e.dst) continue;
    std::map<int, int> comp;
    for (int v : vs) comp[v] = v;
    std::function<int(int)> find = [&](int v) {
      while (comp[v] != v) v = comp[v] = comp[comp[v]];
      return v;
    };
    for (size_t j = 0; j < internal.size(); ++j) {
      if (j == drop) continue;
      int a = find(edges[internal[j]].src), b = find(edges[internal[j]].dst);
      if (a != b) comp[std::max(a, b)] = std::min(a, b);
    }
    int root = find(*vs.begin());
    for (int v : vs)
      if (find(v) != root) return false;  // the dropped edge was a bridge
  }
  return true;
}

std::vector<int> Graph::self_loop_edges() const {
  std::vector<int> out;
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i].src == edges[i].dst) out.push_back(static_cast<int>(i));
  return out;
}

int Graph::valence(int v, const std::vector<int>& edge_ids) const {
  int c = 0;
  for (int e : edge_ids) {
    if (edges[e].src == v) ++c;
    if (edges[e].dst == v) ++c;
  }
  return c;
}

VSet Graph::all_vertices() const {
  VSet out;
  for (int i = 0; i < n(); ++i) out.insert(i);
  return out;
}

std::vector<std::string> Graph::part_key(const VSet& vs) const {
  std::vector<std::string> key;
  for (int v : vs) key.push_back(verts[v].id);
  std::sort(key.begin(), key.end());
  return key;
}

std::string Graph::part_label(const VSet& vs) const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const std::string& id : part_key(vs)) {
    if (!first) os << ",";
    first = false;
    os << id;
  }
  os << "}";
  return os.str();
}

bool part_less(const Graph& g, const VSet& a, const VSet& b) {
  return g.part_key(a) < g.part_key(b);
}

namespace {

std::string fresh_id(const Graph& g, std::string base) {
  while (g.find_vertex(base)) base += "'";
  return base;
}

}  // namespace

std::pair<Graph, VertexMap> contract(const Graph& g, const VSet& part) {
  if (part.empty()) throw std::invalid_argument("contract: empty part");
  if (!g.connected(part))
    throw std::invalid_argument("contract: disconnected part " + g.part_label(part));

  Graph out;
  out.next_pos = g.next_pos + 1;

  // Keep the other vertices in original order, the merged vertex last.
  std::map<int, int> new_index;
  for (int v = 0; v < g.n(); ++v) {
    if (part.count(v)) continue;
    new_index[v] = out.n();
    out.verts.push_back(g.verts[v]);
  }

  Vertex merged;
  {
    std::ostringstream name;
    name << "(";
    bool first = true;
    for (const std::string& id : g.part_key(part)) {
      if (!first) name << "+";
      first = false;
      name << id;
    }
    name << ")";
    merged.id = fresh_id(g, name.str());
  }
  merged.pos = g.next_pos;
  std::map<std::pair<int, int>, int> slot_map;  // old (vertex, slot) -> merged slot
  for (auto& [v, s] : g.external_slots(part)) {
    slot_map[{v, s}] = merged.fields;
    merged.slot_derivs.push_back(g.verts[v].slot_derivs[s]);
    if (g.verts[v].wave_slot && *g.verts[v].wave_slot == s) {
      if (merged.wave_slot)
        throw std::invalid_argument("contract: two external wave slots in " + g.part_label(part));
      merged.wave_slot = merged.fields;
    }
    merged.fields += 1;
  }
  int merged_at = out.n();
  out.verts.push_back(merged);

  auto repoint = [&](int v, int s) -> std::pair<int, int> {
    if (!part.count(v)) return {new_index.at(v), s};
    return {merged_at, slot_map.at({v, s})};
  };
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    if (part.count(e.src) && part.count(e.dst)) continue;  // internal, removed
    auto [ns, nss] = repoint(e.src, e.src_slot);
    auto [nd, nds] = repoint(e.dst, e.dst_slot);
    out.edges.push_back(Edge{ns, nd, nss, nds});
  }
  for (int v : g.limit_set) {
    if (part.count(v)) {
      out.limit_set.insert(merged_at);
    } else {
      out.limit_set.insert(new_index.at(v));
    }
  }

  VertexMap vm;
  vm.kind = VertexMap::Kind::Contraction;
  vm.merged_id = merged.id;
  for (int v = 0; v < g.n(); ++v)
    vm.forward[g.verts[v].id] = part.count(v) ? merged.id : g.verts[v].id;
  out.check_valid();
  return {std::move(out), std::move(vm)};
}

std::pair<Graph, VertexMap> join_vertices(const Graph& g, const VSet& vs) {
  if (vs.empty()) throw std::invalid_argument("join: empty vertex set");
  for (int v : vs)
    if (!g.limit_set.count(v))
      throw std::invalid_argument("join: vertex \"" + g.verts[v].id +
                                  "\" is not in the limit set");

  // Canonical id order fixes the slot concatenation.
  std::vector<int> order(vs.begin(), vs.end());
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return g.verts[a].id < g.verts[b].id; });

  Graph out;
  out.next_pos = g.next_pos + 1;
  std::map<int, int> new_index;
  for (int v = 0; v < g.n(); ++v) {
    if (vs.count(v)) continue;
    new_index[v] = out.n();
    out.verts.push_back(g.verts[v]);
  }

  Vertex joined;
  joined.id = fresh_id(g, "v0");
  joined.pos = g.next_pos;
  std::map<std::pair<int, int>, int> slot_map;
  bool any_delta = false;
  int delta_sum = 0;
  std::map<Var, Poly> coord_images;  // old coordinates -> joined coordinates
  for (int v : order) {
    const Vertex& vx = g.verts[v];
    for (int s = 0; s < vx.fields; ++s) {
      slot_map[{v, s}] = joined.fields + s;
      if (vx.wave_slot && *vx.wave_slot == s) {
        if (joined.wave_slot)
          throw std::invalid_argument("join: two wave slots among joined vertices");
        joined.wave_slot = joined.fields + s;
      }
    }
    joined.slot_derivs.insert(joined.slot_derivs.end(), vx.slot_derivs.begin(),
                              vx.slot_derivs.end());
    joined.fields += vx.fields;
    if (vx.delta) any_delta = true;
    delta_sum += vx.delta ? *vx.delta : g.dim_phi(v);
    for (int mu = 0; mu < kDim; ++mu)
      coord_images.emplace(coord_var(vx.pos, mu), Poly::var(coord_var(joined.pos, mu)));
  }
  if (any_delta) joined.delta = delta_sum;
  for (int v : order) {
    const Vertex& vx = g.verts[v];
    if (!vx.test_factor) continue;
    Poly tf = vx.test_factor->substitute(coord_images);
    if (joined.test_factor) {
      joined.test_factor = *joined.test_factor * tf;
    } else {
      joined.test_factor = tf;
    }
  }
  int joined_at = out.n();
  out.verts.push_back(joined);

  // Edge order (and hence edge indices) is preserved one-to-one.
  for (const Edge& e : g.edges) {
    auto map_end = [&](int v, int s) -> std::pair<int, int> {
      if (!vs.count(v)) return {new_index.at(v), s};
      return {joined_at, slot_map.at({v, s})};
    };
    auto [ns, nss] = map_end(e.src, e.src_slot);
    auto [nd, nds] = map_end(e.dst, e.dst_slot);
    out.edges.push_back(Edge{ns, nd, nss, nds});
  }
  for (int v : g.limit_set) {
    if (vs.count(v)) {
      out.limit_set.insert(joined_at);
    } else {
      out.limit_set.insert(new_index.at(v));
    }
  }

  VertexMap vm;
  vm.kind = VertexMap::Kind::Joining;
  vm.merged_id = joined.id;
  for (int v = 0; v < g.n(); ++v)
    vm.forward[g.verts[v].id] = vs.count(v) ? joined.id : g.verts[v].id;
  out.check_valid();
  return {std::move(out), std::move(vm)};
}

}  // namespace bphz
