#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>

#include "bphz/forest.hpp"
#include "bphz/graph.hpp"
#include "bphz/power.hpp"
#include "bphz/weight.hpp"
#include "json.hpp"

namespace bphz {

// Key-order-preserving JSON keeps every report byte-deterministic.
using Json = nlohmann::ordered_json;

// Polynomial grammar for test factors: rational literals, variables
// "x_<vertexid>_<mu>" (mu in 0..3; the id may itself contain underscores, the
// split is at the last one), +, -, *, ^, parentheses, unary minus.
Poly parse_polynomial(const std::string& src, const Graph& g,
                      std::optional<int> only_vertex = std::nullopt);

Graph parse_graph(const Json& j);
Graph load_graph(const std::string& path);

// Inverse of parse_graph: the result parses back to an identical graph.
Json graph_to_json(const Graph& g);

// Starts from the graph's default deltas, applies the file's vertex_deltas
// (validated against each vertex's dimension) and part_overrides.
Assignment parse_assignment(const Json& j, const Graph& g);
// Accepts a path or the literal "minimal".
Assignment load_assignment(const std::string& spec, const Graph& g);

Config parse_configuration(const Json& j, const Graph& g);

Json configuration_to_json(const Graph& g, const Config& c);
Json part_to_json(const Graph& g, const VSet& part);

// One entry per connected vertex subset with at least one induced edge:
// degrees, codegree, active delta, part status, and any recursive-inequality
// violations in which the subset is the enclosing part.
Json degree_report(const Graph& g, const Assignment& a);

// Array of forests, each an array of {vertex_ids, degree}.
Json forest_report(const Graph& g, const Assignment& a);

Json validation_report(const Graph& g, const Assignment& a);

// Variable namer for diagnostics: pos/mu -> "x_<id>_<mu>" (synthetic
// positions render as "y<k>_<mu>").
std::function<std::string(Var)> var_namer(const Graph& g);

}  // namespace bphz
