// Batch front-end: loads graph and assignment files, dispatches one
// subcommand, and prints a single deterministic JSON report on stdout.
// Exit status: 0 on success, 1 when a verification or validation fails,
// 2 on input errors.

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bphz/coincidence.hpp"
#include "bphz/field_equation.hpp"
#include "bphz/io.hpp"
#include "bphz/sampling.hpp"
#include "bphz/subtraction.hpp"
#include "bphz/zimmermann.hpp"

using namespace bphz;

namespace {

std::string rat(const Rational& q) { return q.get_str(); }

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return std::string(buf);
}

Rational parse_rational(const std::string& s) {
  Rational q;
  try {
    q = Rational(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad rational: \"" + s + "\"");
  }
  if (q.get_den() == 0) throw std::invalid_argument("bad rational: \"" + s + "\"");
  q.canonicalize();
  return q;
}

std::array<Rational, 4> parse_point(const std::string& s) {
  std::array<Rational, 4> out;
  size_t at = 0;
  for (int mu = 0; mu < 4; ++mu) {
    size_t comma = s.find(',', at);
    bool last = mu == 3;
    if (last != (comma == std::string::npos))
      throw std::invalid_argument("point needs 4 comma-separated rationals: \"" + s + "\"");
    out[mu] = parse_rational(s.substr(at, last ? std::string::npos : comma - at));
    at = comma + 1;
  }
  return out;
}

// "minimal", "default" (the graph's own deltas), or a file path.
Assignment assignment_spec(const std::string& spec, const Graph& g) {
  if (spec == "default") return Assignment::graph_default(g);
  return load_assignment(spec, g);
}

Config load_configuration(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open configuration file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument("JSON error in " + path + ": " + e.what());
  }
  return parse_configuration(j, g);
}

// Explicit configuration files win; otherwise a seeded sample.
std::vector<Config> gather_configs(const Graph& g, const std::vector<std::string>& files,
                                   unsigned long seed, int n) {
  std::vector<Config> out;
  for (const std::string& f : files) out.push_back(load_configuration(f, g));
  if (!out.empty()) return out;
  if (n < 1) throw std::invalid_argument("need --n >= 1 configurations");
  return random_configurations(g, seed, n);
}

void emit(const Json& report) { std::cout << report.dump(2) << "\n"; }

int cmd_degree(const Graph& g, const Assignment& a) {
  emit(Json{{"command", "degree"}, {"parts", degree_report(g, a)}});
  return 0;
}

int cmd_parts(const Graph& g, const Assignment& a, PartPolicy policy) {
  Json rows = Json::array();
  for (const VSet& p : renormalization_parts(g, a, policy))
    rows.push_back(Json{{"vertex_ids", part_to_json(g, p)},
                        {"degree", oversubtraction_degree(g, p, a)}});
  emit(Json{{"command", "parts"}, {"count", rows.size()}, {"parts", rows}});
  return 0;
}

int cmd_forests(const Graph& g, const Assignment& a) {
  Json rows = forest_report(g, a);
  emit(Json{{"command", "forests"}, {"count", rows.size()}, {"forests", rows}});
  return 0;
}

int cmd_validate(const Graph& g, const Assignment& a) {
  Json report = validation_report(g, a);
  bool valid = report.at("valid").get<bool>();
  emit(Json{{"command", "validate"},
            {"valid", valid},
            {"violations", report.at("violations")}});
  return valid ? 0 : 1;
}

int cmd_eval(const Graph& g, const Assignment& a, const std::vector<Config>& configs) {
  RPlan plan(g, a);
  Json rows = Json::array();
  for (const Config& c : configs)
    rows.push_back(Json{{"configuration", configuration_to_json(g, c).at("positions")},
                        {"value", rat(plan.evaluate(c))}});
  emit(Json{{"command", "eval"},
            {"tadpole", plan.tadpole()},
            {"forests", plan.forests().size()},
            {"results", rows}});
  return 0;
}

int cmd_zi_check(const Graph& g, const Assignment& a1, const Assignment& a2,
                 const std::vector<Config>& configs) {
  ZiEvaluator ev(g, a1, a2);
  Json diffs = Json::array();
  for (const ZiWindow& w : ev.plan().differences)
    diffs.push_back(Json{{"part", part_to_json(g, w.part)},
                         {"degree_a", w.d1},
                         {"degree_b", w.d2}});
  Json rows = Json::array();
  bool all_equal = true;
  for (const Config& c : configs) {
    ZiCheck chk = ev.check(c);
    all_equal = all_equal && chk.ok();
    rows.push_back(Json{{"configuration", configuration_to_json(g, c).at("positions")},
                        {"difference", rat(chk.lhs)},
                        {"corrections", rat(chk.rhs)},
                        {"verdict", chk.ok() ? "equal" : "unequal"}});
  }
  emit(Json{{"command", "zi-check"},
            {"difference_parts", diffs},
            {"checks", rows},
            {"all_equal", all_equal}});
  return all_equal ? 0 : 1;
}

Json tau_to_json(const CoincidencePlan& plan, const TauInfo& t) {
  Json out;
  out["vertex_ids"] = part_to_json(plan.delta, t.tau);
  out["support"] = part_to_json(plan.gamma, t.support);
  out["degree_after"] = t.d_delta;
  if (t.gamma_part)
    out["degree_before"] = t.d_gamma;
  else
    out["degree_before"] = nullptr;
  out["new"] = t.is_new;
  out["raised"] = t.raised;
  if (t.special()) out["window"] = Json{{"lo", t.op.lo}, {"hi", t.op.hi}};
  return out;
}

int cmd_join_check(const Graph& g, const Assignment& a, const std::vector<Config>& configs) {
  CoincidenceEvaluator ev(g, a);
  const CoincidencePlan& plan = ev.plan();
  Json taus = Json::array();
  for (const TauInfo& t : plan.taus) taus.push_back(tau_to_json(plan, t));
  Json families = Json::array();
  for (const auto& family : plan.overlap_families) {
    Json fj = Json::array();
    for (const VSet& p : family) fj.push_back(part_to_json(g, p));
    families.push_back(fj);
  }
  Json rows = Json::array();
  bool all_equal = true;
  for (const Config& c : configs) {
    CoincidenceCheck chk = ev.check(c);
    all_equal = all_equal && chk.ok();
    rows.push_back(Json{{"configuration", configuration_to_json(g, c).at("positions")},
                        {"r_joined", rat(chk.r_delta)},
                        {"r_original", rat(chk.r_gamma)},
                        {"overlap_corrections", rat(chk.x_gamma)},
                        {"diagonal_corrections", rat(chk.x_delta)},
                        {"verdict", chk.ok() ? "equal" : "unequal"}});
  }
  emit(Json{{"command", "join-check"},
            {"merged_vertex", plan.delta.verts[plan.v0].id},
            {"joined_parts", taus},
            {"overlap_families", families},
            {"excluded_forests", plan.bad_forests.size()},
            {"good_forests", plan.good_forest_count},
            {"nested_specials", plan.nested_specials},
            {"checks", rows},
            {"all_equal", all_equal}});
  return all_equal ? 0 : 1;
}

int cmd_probe(const Graph& g, const Assignment& a, const Config& base,
              const std::array<Rational, 4>& common, bool move_spectators, int k_lo,
              int k_hi) {
  CoincidenceEvaluator ev(g, a);
  CoincidenceProbe probe = coincidence_probe(ev, base, common, move_spectators, k_lo, k_hi);
  Json rows = Json::array();
  for (const ProbeRow& r : probe.rows)
    rows.push_back(Json{{"lambda", rat(r.lambda)},
                        {"unsubtracted", rat(r.value_unsubtracted)},
                        {"r_original", rat(r.value_gamma)},
                        {"r_joined", rat(r.value_delta)}});
  emit(Json{{"command", "probe"},
            {"rows", rows},
            {"slope_unsubtracted", fixed6(probe.slope_unsubtracted)},
            {"slope_r_original", fixed6(probe.slope_r_gamma)},
            {"slope_r_joined", fixed6(probe.slope_r_delta)},
            {"gain", fixed6(probe.gain())}});
  return 0;
}

int cmd_fuse(const Graph& g, const std::string& vertex_id, int slot) {
  int v = g.vertex_index(vertex_id);
  if (slot < 0) {
    if (!g.verts[v].wave_slot)
      throw std::invalid_argument("fuse: vertex \"" + vertex_id +
                                  "\" carries no wave slot");
    slot = *g.verts[v].wave_slot;
  }
  FusionRecord rec = fuse_wave_edge(g, v, slot);
  emit(Json{{"command", "fuse"},
            {"wave_vertex", g.verts[rec.wave_vertex].id},
            {"wave_slot", rec.wave_slot},
            {"wave_edge", rec.wave_edge},
            {"partner", g.verts[rec.partner].id},
            {"partner_slot", rec.partner_slot},
            {"ledger",
             Json{{"delta_wave", rec.delta_wave},
                  {"delta_partner", rec.delta_partner},
                  {"fused_delta", rec.fused_delta()},
                  {"merged_dimension", rec.fused.dim_phi(rec.merged)}}},
            {"merged_id", rec.vm.merged_id},
            {"reduced", graph_to_json(rec.reduced)},
            {"fused", graph_to_json(rec.fused)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact configuration-space subtraction toolkit"};
  app.require_subcommand(1);

  std::string graph_path, a_spec = "default", b_spec = "minimal";
  std::vector<std::string> config_files;
  unsigned long seed = 1;
  int n = 1;

  auto add_graph = [&](CLI::App* sub) {
    sub->add_option("graph", graph_path, "graph JSON file")->required();
  };
  auto add_assignment = [&](CLI::App* sub) {
    sub->add_option("--a", a_spec,
                    "assignment: file path, \"minimal\", or \"default\" (the "
                    "graph's own deltas)");
  };
  auto add_configs = [&](CLI::App* sub) {
    sub->add_option("--config", config_files, "configuration JSON file (repeatable)");
    sub->add_option("--seed", seed, "sampling seed when no --config is given");
    sub->add_option("--n", n, "number of sampled configurations");
  };

  CLI::App* degree = app.add_subcommand("degree", "degree table of all candidate parts");
  add_graph(degree);
  add_assignment(degree);

  CLI::App* parts = app.add_subcommand("parts", "renormalization parts and degrees");
  add_graph(parts);
  add_assignment(parts);

  CLI::App* forests = app.add_subcommand("forests", "all forests of renormalization parts");
  add_graph(forests);
  add_assignment(forests);

  CLI::App* eval = app.add_subcommand("eval", "subtracted weight at configurations");
  add_graph(eval);
  add_assignment(eval);
  add_configs(eval);

  CLI::App* zi = app.add_subcommand("zi-check",
                                    "oversubtraction identity between two assignments");
  add_graph(zi);
  add_assignment(zi);
  zi->add_option("--b", b_spec, "second assignment (same forms as --a)");
  add_configs(zi);

  CLI::App* join = app.add_subcommand("join-check",
                                      "merge decomposition over the graph's limit set");
  add_graph(join);
  add_assignment(join);
  add_configs(join);

  CLI::App* probe = app.add_subcommand("probe",
                                       "scaling probe of the limit set approaching a point");
  add_graph(probe);
  add_assignment(probe);
  add_configs(probe);
  std::string common_str = "1,0,0,0";
  bool move_spectators = false;
  int k_lo = 3, k_hi = 10;
  probe->add_option("--common", common_str, "limit point, 4 comma-separated rationals");
  probe->add_flag("--move-spectators", move_spectators,
                  "put every vertex on the ray, not just the limit set");
  probe->add_option("--k-lo", k_lo, "first scale exponent (lambda = 2^-k)");
  probe->add_option("--k-hi", k_hi, "last scale exponent");

  CLI::App* fuse = app.add_subcommand("fuse", "contract the edge on a wave slot");
  add_graph(fuse);
  std::string fuse_vertex;
  int fuse_slot = -1;
  fuse->add_option("--vertex", fuse_vertex, "wave vertex id")->required();
  fuse->add_option("--slot", fuse_slot, "slot to fuse (default: the vertex's wave slot)");

  CLI::App* validate = app.add_subcommand("validate",
                                          "recursive degree inequality over all forests");
  add_graph(validate);
  add_assignment(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    Graph g = load_graph(graph_path);
    if (*degree) return cmd_degree(g, assignment_spec(a_spec, g));
    if (*parts) return cmd_parts(g, assignment_spec(a_spec, g), PartPolicy::Connected);
    if (*forests) return cmd_forests(g, assignment_spec(a_spec, g));
    if (*validate) return cmd_validate(g, assignment_spec(a_spec, g));
    if (*eval)
      return cmd_eval(g, assignment_spec(a_spec, g), gather_configs(g, config_files, seed, n));
    if (*zi)
      return cmd_zi_check(g, assignment_spec(a_spec, g), assignment_spec(b_spec, g),
                          gather_configs(g, config_files, seed, n));
    if (*join)
      return cmd_join_check(g, assignment_spec(a_spec, g),
                            gather_configs(g, config_files, seed, n));
    if (*probe) {
      std::vector<Config> bases = gather_configs(g, config_files, seed, 1);
      return cmd_probe(g, assignment_spec(a_spec, g), bases.front(),
                       parse_point(common_str), move_spectators, k_lo, k_hi);
    }
    if (*fuse) return cmd_fuse(g, fuse_vertex, fuse_slot);
  } catch (const std::exception& e) {
    emit(Json{{"error", e.what()}});
    return 2;
  }
  return 2;
}
