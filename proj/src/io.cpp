#include "bphz/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bphz {

namespace {

struct PolyParser {
  const std::string& src;
  size_t at = 0;
  const Graph& g;
  std::optional<int> only_vertex;

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "polynomial parse error at offset " << at << ": " << msg << " in \"" << src << "\"";
    throw std::invalid_argument(os.str());
  }

  void skip_ws() {
    while (at < src.size() && std::isspace(static_cast<unsigned char>(src[at]))) ++at;
  }

  bool eat(char c) {
    skip_ws();
    if (at < src.size() && src[at] == c) {
      ++at;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return at < src.size() ? src[at] : '\0';
  }

  Poly parse_expr() {
    Poly acc = parse_term();
    for (;;) {
      if (eat('+')) {
        acc += parse_term();
      } else if (eat('-')) {
        acc += -parse_term();
      } else {
        return acc;
      }
    }
  }

  Poly parse_term() {
    Poly acc = parse_factor();
    while (eat('*')) acc = acc * parse_factor();
    return acc;
  }

  Poly parse_factor() {
    Poly base = parse_atom();
    if (eat('^')) {
      skip_ws();
      size_t start = at;
      while (at < src.size() && std::isdigit(static_cast<unsigned char>(src[at]))) ++at;
      if (at == start) fail("expected integer exponent");
      int e = std::stoi(src.substr(start, at - start));
      base = base.pow(e);
    }
    return base;
  }

  Poly parse_atom() {
    skip_ws();
    if (at >= src.size()) fail("unexpected end of input");
    char c = src[at];
    if (c == '(') {
      ++at;
      Poly inner = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++at;
      return -parse_factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (c == 'x' || c == 'y') return parse_variable();
    fail("expected number, variable, or '('");
  }

  Poly parse_number() {
    size_t start = at;
    while (at < src.size() && std::isdigit(static_cast<unsigned char>(src[at]))) ++at;
    std::string text = src.substr(start, at - start);
    skip_ws();
    if (at < src.size() && src[at] == '/') {
      ++at;
      skip_ws();
      size_t dstart = at;
      while (at < src.size() && std::isdigit(static_cast<unsigned char>(src[at]))) ++at;
      if (at == dstart) fail("expected denominator digits");
      text += "/" + src.substr(dstart, at - dstart);
    }
    return Poly::constant(rat_parse(text));
  }

  Poly parse_variable() {
    size_t start = at;
    while (at < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[at])) || src[at] == '_'))
      ++at;
    std::string name = src.substr(start, at - start);
    if (name.size() < 4 || name.compare(0, 2, "x_") != 0)
      fail("variable \"" + name + "\" is not of the form x_<vertex>_<mu>");
    size_t split = name.rfind('_');
    if (split <= 1) fail("variable \"" + name + "\" lacks a coordinate index");
    std::string vid = name.substr(2, split - 2);
    std::string mu_text = name.substr(split + 1);
    if (mu_text.size() != 1 || mu_text[0] < '0' || mu_text[0] > '3')
      fail("coordinate index of \"" + name + "\" must be 0..3");
    int mu = mu_text[0] - '0';
    auto v = g.find_vertex(vid);
    if (!v) fail("variable \"" + name + "\" names unknown vertex \"" + vid + "\"");
    if (only_vertex && *v != *only_vertex)
      fail("test factor of \"" + g.verts[*only_vertex].id +
           "\" may only use that vertex's coordinates, found \"" + name + "\"");
    return Poly::var(coord_var(g.verts[*v].pos, mu));
  }
};

Rational json_rational(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<int64_t>()));
  if (j.is_string()) return rat_parse(j.get<std::string>());
  throw std::invalid_argument(where + ": expected integer or rational string");
}

}  // namespace

Poly parse_polynomial(const std::string& src, const Graph& g, std::optional<int> only_vertex) {
  PolyParser p{src, 0, g, only_vertex};
  Poly out = p.parse_expr();
  p.skip_ws();
  if (p.at != src.size()) p.fail("trailing input");
  return out;
}

Graph parse_graph(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("graph: expected a JSON object");
  if (!j.contains("dimension") || j.at("dimension").get<int>() != 4)
    throw std::invalid_argument("graph: \"dimension\" must be present and equal to 4");

  Graph g;
  std::vector<std::string> tf_sources;
  for (const Json& vj : j.at("vertices")) {
    Vertex v;
    v.id = vj.at("id").get<std::string>();
    v.pos = g.next_pos++;
    v.fields = vj.at("fields").get<int>();
    v.slot_derivs = vj.at("slot_derivs").get<std::vector<int>>();
    if (vj.contains("delta")) v.delta = vj.at("delta").get<int>();
    if (vj.contains("wave_slot")) v.wave_slot = vj.at("wave_slot").get<int>();
    tf_sources.push_back(vj.contains("test_factor") ? vj.at("test_factor").get<std::string>()
                                                    : std::string());
    g.verts.push_back(std::move(v));
  }
  for (const Json& ej : j.at("edges")) {
    Edge e;
    e.src = g.vertex_index(ej.at("src").get<std::string>());
    e.dst = g.vertex_index(ej.at("dst").get<std::string>());
    e.src_slot = ej.at("src_slot").get<int>();
    e.dst_slot = ej.at("dst_slot").get<int>();
    g.edges.push_back(e);
  }
  if (j.contains("limit_set"))
    for (const Json& lid : j.at("limit_set"))
      g.limit_set.insert(g.vertex_index(lid.get<std::string>()));
  g.check_valid();
  // Test factors parse after validation so variable lookups see a sane graph.
  for (int v = 0; v < g.n(); ++v)
    if (!tf_sources[v].empty()) g.verts[v].test_factor = parse_polynomial(tf_sources[v], g, v);
  for (int v = 0; v < g.n(); ++v)
    if (g.verts[v].delta && *g.verts[v].delta < g.dim_phi(v))
      throw std::invalid_argument("graph: delta at \"" + g.verts[v].id +
                                  "\" is below the vertex dimension");
  return g;
}

Json graph_to_json(const Graph& g) {
  Json out;
  out["dimension"] = 4;
  auto name = var_namer(g);
  Json vs = Json::array();
  for (int v = 0; v < g.n(); ++v) {
    const Vertex& vx = g.verts[v];
    Json vj;
    vj["id"] = vx.id;
    vj["fields"] = vx.fields;
    vj["slot_derivs"] = vx.slot_derivs;
    if (vx.delta) vj["delta"] = *vx.delta;
    if (vx.wave_slot) vj["wave_slot"] = *vx.wave_slot;
    if (vx.test_factor) vj["test_factor"] = vx.test_factor->str(name);
    vs.push_back(vj);
  }
  out["vertices"] = vs;
  Json es = Json::array();
  for (const Edge& e : g.edges)
    es.push_back(Json{{"src", g.verts[e.src].id},
                      {"dst", g.verts[e.dst].id},
                      {"src_slot", e.src_slot},
                      {"dst_slot", e.dst_slot}});
  out["edges"] = es;
  if (!g.limit_set.empty()) {
    Json ls = Json::array();
    for (int v : g.limit_set) ls.push_back(g.verts[v].id);
    out["limit_set"] = ls;
  }
  return out;
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument("JSON error in " + path + ": " + e.what());
  }
  return parse_graph(j);
}

Assignment parse_assignment(const Json& j, const Graph& g) {
  Assignment a = Assignment::graph_default(g);
  if (j.contains("vertex_deltas")) {
    for (auto& [id, dj] : j.at("vertex_deltas").items()) {
      int v = g.vertex_index(id);
      int d = dj.get<int>();
      if (d < g.dim_phi(v))
        throw std::invalid_argument("assignment: delta " + std::to_string(d) + " at \"" + id +
                                    "\" is below the vertex dimension " +
                                    std::to_string(g.dim_phi(v)));
      a.vertex_deltas[v] = d;
    }
  }
  if (j.contains("part_overrides")) {
    for (const Json& oj : j.at("part_overrides")) {
      VSet vs;
      for (const Json& id : oj.at("vertices")) vs.insert(g.vertex_index(id.get<std::string>()));
      a.part_overrides.emplace_back(vs, oj.at("delta").get<int>());
    }
  }
  return a;
}

Assignment load_assignment(const std::string& spec, const Graph& g) {
  if (spec == "minimal") return Assignment::minimal(g);
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("cannot open assignment file: " + spec);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument("JSON error in " + spec + ": " + e.what());
  }
  return parse_assignment(j, g);
}

Config parse_configuration(const Json& j, const Graph& g) {
  const Json& pj = j.contains("positions") ? j.at("positions") : j;
  Config c;
  for (auto& [id, xj] : pj.items()) {
    int v = g.vertex_index(id);
    if (!xj.is_array() || xj.size() != 4)
      throw std::invalid_argument("configuration: position of \"" + id +
                                  "\" must be an array of 4 rationals");
    std::array<Rational, 4> x;
    for (int mu = 0; mu < 4; ++mu) x[mu] = json_rational(xj[mu], "configuration");
    c.emplace(g.verts[v].pos, x);
  }
  for (int v = 0; v < g.n(); ++v)
    if (!c.count(g.verts[v].pos))
      throw std::invalid_argument("configuration: missing position for \"" + g.verts[v].id +
                                  "\"");
  return c;
}

Json configuration_to_json(const Graph& g, const Config& c) {
  Json pj = Json::object();
  for (int v = 0; v < g.n(); ++v) {
    const auto& x = c.at(g.verts[v].pos);
    Json xs = Json::array();
    for (int mu = 0; mu < 4; ++mu) xs.push_back(rat_str(x[mu]));
    pj[g.verts[v].id] = xs;
  }
  return Json{{"positions", pj}};
}

Json part_to_json(const Graph& g, const VSet& part) {
  Json out = Json::array();
  for (const std::string& id : g.part_key(part)) out.push_back(id);
  return out;
}

namespace {

// Connected vertex subsets with at least one induced edge, canonical order.
std::vector<VSet> candidate_parts(const Graph& g) {
  std::vector<VSet> out;
  for (unsigned mask = 1; mask < (1u << g.n()); ++mask) {
    VSet vs;
    for (int v = 0; v < g.n(); ++v)
      if (mask & (1u << v)) vs.insert(v);
    if (g.induced_edges(vs).empty()) continue;
    if (!g.connected(vs)) continue;
    out.push_back(vs);
  }
  std::sort(out.begin(), out.end(),
            [&](const VSet& x, const VSet& y) { return part_less(g, x, y); });
  return out;
}

}  // namespace

Json degree_report(const Graph& g, const Assignment& a) {
  std::vector<DegreeViolation> violations = validate_assignment(g, a);
  Json out = Json::array();
  for (const VSet& p : candidate_parts(g)) {
    Json entry;
    entry["part"] = part_to_json(g, p);
    entry["degree"] = uv_degree(g, p);
    entry["codegree"] = codegree(g, p);
    int delta = oversubtraction_degree(g, p, a);
    entry["delta"] = delta;
    entry["renormalization_part"] = delta >= 0;
    Json vj = Json::array();
    for (const DegreeViolation& v : violations) {
      if (v.part != p) continue;
      Json sub = Json::array();
      for (const VSet& sp : v.subparts) sub.push_back(part_to_json(g, sp));
      vj.push_back(Json{{"subparts", sub}, {"delta", v.lhs}, {"required", v.rhs}});
    }
    entry["violations"] = vj;
    out.push_back(entry);
  }
  return out;
}

Json forest_report(const Graph& g, const Assignment& a) {
  Json out = Json::array();
  for (const Forest& f : enumerate_forests(g, a)) {
    Json fj = Json::array();
    for (const VSet& p : f)
      fj.push_back(Json{{"vertex_ids", part_to_json(g, p)},
                        {"degree", oversubtraction_degree(g, p, a)}});
    out.push_back(fj);
  }
  return out;
}

Json validation_report(const Graph& g, const Assignment& a) {
  std::vector<DegreeViolation> violations = validate_assignment(g, a);
  Json vj = Json::array();
  for (const DegreeViolation& v : violations) {
    Json sub = Json::array();
    for (const VSet& sp : v.subparts) sub.push_back(part_to_json(g, sp));
    vj.push_back(Json{{"part", part_to_json(g, v.part)},
                      {"subparts", sub},
                      {"delta", v.lhs},
                      {"required", v.rhs}});
  }
  return Json{{"valid", violations.empty()}, {"violations", vj}};
}

std::function<std::string(Var)> var_namer(const Graph& g) {
  std::map<PosId, std::string> names;
  for (const Vertex& v : g.verts) names[v.pos] = v.id;
  return [names](Var v) {
    std::ostringstream os;
    auto it = names.find(var_pos(v));
    if (it != names.end()) {
      os << "x_" << it->second << "_" << var_mu(v);
    } else {
      os << "y" << var_pos(v) << "_" << var_mu(v);
    }
    return os.str();
  };
}

}  // namespace bphz
