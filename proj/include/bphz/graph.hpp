#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bphz/poly.hpp"

namespace bphz {

// A vertex carries a monomial: `fields` elementary field slots, each with a
// derivative order, plus an optional polynomial test factor in this vertex's
// own coordinates.  `pos` is the coordinate symbol used by weights; it is
// stable under graph surgery (contraction, joining, fusion), unlike the
// vertex's index in the vertex array.
struct Vertex {
  std::string id;
  PosId pos = 0;
  int fields = 0;
  std::vector<int> slot_derivs;      // one entry per slot
  std::optional<int> wave_slot;      // slot carrying the wave operator
  std::optional<int> delta;          // explicit default subtraction degree
  std::optional<Poly> test_factor;   // polynomial in this vertex's coordinates
};

// Edges attach to specific field slots at each endpoint.
struct Edge {
  int src = 0, dst = 0;
  int src_slot = 0, dst_slot = 0;
};

// A set of vertex indices.  Full vertex parts are identified with their
// vertex sets; the edge set is always the induced one.
using VSet = std::set<int>;

struct VertexMap {
  enum class Kind { Contraction, Joining, Fusion };
  Kind kind = Kind::Contraction;
  std::map<std::string, std::string> forward;  // old id -> new id
  std::string merged_id;
};

class Graph {
 public:
  std::vector<Vertex> verts;
  std::vector<Edge> edges;
  VSet limit_set;      // vertex indices participating in a coincidence limit
  PosId next_pos = 0;  // first unused coordinate symbol

  int n() const { return static_cast<int>(verts.size()); }
  int vertex_index(const std::string& id) const;  // throws on unknown id
  std::optional<int> find_vertex(const std::string& id) const;

  // Derivative order of a slot for power counting: the wave operator counts
  // as two derivative units on its slot.
  int eff_derivs(int v, int slot) const;
  // Intrinsic dimension of the vertex monomial.
  int dim_phi(int v) const;

  // Validates all structural invariants; throws std::invalid_argument with
  // the offending element on failure.
  void check_valid() const;

  // Edge indices with both endpoints inside vs.
  std::vector<int> induced_edges(const VSet& vs) const;
  // (vertex, slot) pairs of vs not contracted by an induced edge, in
  // canonical order (vertex index, then slot index).
  std::vector<std::pair<int, int>> external_slots(const VSet& vs) const;
  std::vector<VSet> components(const VSet& vs) const;
  std::vector<VSet> components() const;
  bool connected(const VSet& vs) const;
  // Connected with >= 1 induced edge and no bridge among induced edges.
  bool one_particle_irreducible(const VSet& vs) const;
  std::vector<int> self_loop_edges() const;
  // Number of edge ends at v among the given edges (a self-loop counts 2).
  int valence(int v, const std::vector<int>& edge_ids) const;

  VSet all_vertices() const;

  // Canonical identity of a part: its sorted vertex id list.
  std::vector<std::string> part_key(const VSet& vs) const;
  std::string part_label(const VSet& vs) const;  // "{a,b}" for messages
};

// Canonical part order: lexicographic on sorted vertex id lists.
bool part_less(const Graph& g, const VSet& a, const VSet& b);

// Replaces the part by a single vertex whose monomial has one slot per
// external leg of the part (derivative orders inherited).  Edges internal to
// the part disappear; other edges are re-pointed.  The new vertex carries no
// test factor and no explicit delta: contraction feeds degree bookkeeping.
std::pair<Graph, VertexMap> contract(const Graph& g, const VSet& part);

// Merges the given vertices (a subset of the limit set) into one vertex
// whose monomial concatenates their slots in canonical id order.  All edges
// survive, possibly as parallel edges or self-loops; edge indices are
// preserved one-to-one.  Test factors multiply (coordinates identified);
// explicit deltas add when any participant has one.
std::pair<Graph, VertexMap> join_vertices(const Graph& g, const VSet& vs);

}  // namespace bphz
