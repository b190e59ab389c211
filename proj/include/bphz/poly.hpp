#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bphz/rational.hpp"

namespace bphz {

// A position symbol: indices 0..n-1 are graph vertices, larger ids are
// synthetic collapse points introduced by nested Taylor operators.
using PosId = int32_t;
// A scalar coordinate variable, 4 per position.
using Var = int32_t;

inline constexpr int kDim = 4;

inline Var coord_var(PosId p, int mu) { return p * kDim + mu; }
inline PosId var_pos(Var v) { return v / kDim; }
inline int var_mu(Var v) { return v % kDim; }

// Sorted sparse exponent vector; exponents are >= 1.
struct Monomial {
  std::vector<std::pair<Var, int>> factors;

  int degree() const {
    int d = 0;
    for (auto& [v, e] : factors) d += e;
    return d;
  }
  bool operator<(const Monomial& o) const { return factors < o.factors; }
  bool operator==(const Monomial& o) const { return factors == o.factors; }
};

Monomial monomial_mul(const Monomial& a, const Monomial& b);

// Sparse multivariate polynomial with exact rational coefficients.
// std::map keys give a deterministic term order everywhere.
class Poly {
 public:
  std::map<Monomial, Rational> terms;  // no zero coefficients stored

  static Poly zero() { return Poly{}; }
  static Poly constant(const Rational& c);
  static Poly var(Var v);

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // requires is_constant()
  int total_degree() const;
  int degree_in(const std::set<Var>& vars) const;

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly& operator+=(const Poly& o);
  Poly scale(const Rational& c) const;
  Poly pow(int e) const;

  Poly derivative(Var v) const;
  // Simultaneous substitution; variables absent from the map are untouched.
  Poly substitute(const std::map<Var, Poly>& images) const;

  Rational evaluate(const std::function<Rational(Var)>& val) const;
  double evaluate_double(const std::function<double(Var)>& val) const;

  std::set<Var> support() const;

  // Human-readable rendering, used by reports and error messages.
  std::string str(const std::function<std::string(Var)>& name) const;

  void add_term(const Monomial& m, const Rational& c);
};

}  // namespace bphz
