#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bphz/graph.hpp"
#include "bphz/io.hpp"

namespace bphz {

// Deterministic RNG wrapper: mt19937_64 output mapped by hand so sequences
// are identical across platforms and standard libraries.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}

  uint64_t u64() { return eng(); }
  // Uniform in [lo, hi], inclusive, via rejection.
  int range(int lo, int hi);
  // num/den with den in 1..max_den and |value| <= bound.
  Rational rational(int max_den, int bound);
};

// Samples configurations with rational coordinates (denominators <= 64),
// rejecting samples where any two vertices coincide or where the subtraction
// point of any connected subset with an edge collides with an outside vertex
// or with another subset's subtraction point.
class ConfigSampler {
 public:
  ConfigSampler(const Graph& g, uint64_t seed);
  Config next();

 private:
  const Graph& g_;
  Rng rng_;
  std::vector<VSet> subsets_;  // connected, >= 1 edge
};

std::vector<Config> random_configurations(const Graph& g, uint64_t seed, int n);

// Random small multigraph: 2..max_vertices vertices, a random spanning tree
// plus a few extra edges (optionally self-loops), random derivative orders
// 0..1 per slot, and 0..2 extra external slots per vertex.
Graph random_graph(Rng& rng, int max_vertices = 5, bool allow_self_loops = false);

}  // namespace bphz
