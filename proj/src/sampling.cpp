#include "bphz/sampling.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace bphz {

int Rng::range(int lo, int hi) {
  uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t r;
  do {
    r = u64();
  } while (r >= limit);
  return lo + static_cast<int>(r % span);
}

Rational Rng::rational(int max_den, int bound) {
  int den = range(1, max_den);
  int num = range(-bound * den, bound * den);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

ConfigSampler::ConfigSampler(const Graph& g, uint64_t seed) : g_(g), rng_(seed) {
  for (unsigned mask = 1; mask < (1u << g.n()); ++mask) {
    VSet vs;
    for (int v = 0; v < g.n(); ++v)
      if (mask & (1u << v)) vs.insert(v);
    if (g.induced_edges(vs).empty() || !g.connected(vs)) continue;
    subsets_.push_back(vs);
  }
}

Config ConfigSampler::next() {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Config c;
    for (const Vertex& v : g_.verts) {
      std::array<Rational, 4> x;
      for (int mu = 0; mu < 4; ++mu) x[mu] = rng_.rational(64, 2);
      c.emplace(v.pos, x);
    }
    // All vertices pairwise distinct.
    std::set<std::array<Rational, 4>> seen;
    bool ok = true;
    for (auto& [p, x] : c)
      if (!seen.insert(x).second) {
        ok = false;
        break;
      }
    if (!ok) continue;
    // Subtraction points stay clear of outside vertices and of each other.
    std::vector<std::array<Rational, 4>> points;
    for (const VSet& vs : subsets_) {
      std::vector<int> internal = g_.induced_edges(vs);
      Rational denom(2 * static_cast<long>(internal.size()));
      std::array<Rational, 4> xbar{Rational(0), Rational(0), Rational(0), Rational(0)};
      for (int v : vs) {
        Rational w = Rational(g_.valence(v, internal)) / denom;
        const auto& x = c.at(g_.verts[v].pos);
        for (int mu = 0; mu < 4; ++mu) xbar[mu] += w * x[mu];
      }
      for (int v = 0; v < g_.n(); ++v) {
        if (vs.count(v)) continue;
        if (c.at(g_.verts[v].pos) == xbar) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      for (const auto& prev : points)
        if (prev == xbar) {
          ok = false;
          break;
        }
      if (!ok) break;
      points.push_back(xbar);
    }
    if (ok) return c;
  }
  throw std::runtime_error("configuration sampling exhausted after 1000 attempts");
}

std::vector<Config> random_configurations(const Graph& g, uint64_t seed, int n) {
  ConfigSampler s(g, seed);
  std::vector<Config> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(s.next());
  return out;
}

Graph random_graph(Rng& rng, int max_vertices, bool allow_self_loops) {
  Graph g;
  int nv = rng.range(2, max_vertices);
  for (int v = 0; v < nv; ++v) {
    Vertex vx;
    vx.id = std::string(1, static_cast<char>('a' + v));
    vx.pos = g.next_pos++;
    g.verts.push_back(vx);
  }
  std::vector<std::pair<int, int>> ends;  // endpoints gathered first, slots assigned after
  for (int v = 1; v < nv; ++v) ends.emplace_back(rng.range(0, v - 1), v);
  int extra = rng.range(0, std::max(0, 6 - (nv - 1)));
  for (int i = 0; i < extra; ++i) {
    int a = rng.range(0, nv - 1);
    int b = rng.range(0, nv - 1);
    if (a == b && !allow_self_loops) b = (b + 1) % nv;
    ends.emplace_back(a, b);
  }
  for (auto& [a, b] : ends) {
    Edge e;
    e.src = a;
    e.dst = b;
    e.src_slot = g.verts[a].fields;
    g.verts[a].fields += 1;
    e.dst_slot = g.verts[b].fields;
    g.verts[b].fields += 1;
    g.edges.push_back(e);
  }
  for (Vertex& vx : g.verts) {
    int extra_slots = rng.range(0, 2);
    vx.fields += extra_slots;
    for (int s = 0; s < vx.fields; ++s) vx.slot_derivs.push_back(rng.range(0, 1));
  }
  g.check_valid();
  return g;
}

}  // namespace bphz
