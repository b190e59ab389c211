#include "bphz/poly.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace bphz {

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors.reserve(a.factors.size() + b.factors.size());
  auto ia = a.factors.begin(), ib = b.factors.begin();
  while (ia != a.factors.end() && ib != b.factors.end()) {
    if (ia->first < ib->first) {
      out.factors.push_back(*ia++);
    } else if (ib->first < ia->first) {
      out.factors.push_back(*ib++);
    } else {
      out.factors.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  out.factors.insert(out.factors.end(), ia, a.factors.end());
  out.factors.insert(out.factors.end(), ib, b.factors.end());
  return out;
}

Poly Poly::constant(const Rational& c) {
  Poly p;
  if (c != 0) p.terms.emplace(Monomial{}, c);
  return p;
}

Poly Poly::var(Var v) {
  Poly p;
  Monomial m;
  m.factors.emplace_back(v, 1);
  p.terms.emplace(std::move(m), Rational(1));
  return p;
}

bool Poly::is_constant() const {
  return terms.empty() || (terms.size() == 1 && terms.begin()->first.factors.empty());
}

Rational Poly::constant_value() const {
  if (terms.empty()) return Rational(0);
  assert(is_constant());
  return terms.begin()->second;
}

int Poly::total_degree() const {
  int d = 0;
  for (auto& [m, c] : terms) d = std::max(d, m.degree());
  return d;
}

int Poly::degree_in(const std::set<Var>& vars) const {
  int d = 0;
  for (auto& [m, c] : terms) {
    int md = 0;
    for (auto& [v, e] : m.factors)
      if (vars.count(v)) md += e;
    d = std::max(d, md);
  }
  return d;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto it = terms.find(m);
  if (it == terms.end()) {
    terms.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly out;
  for (auto& [m, c] : terms) out.terms.emplace(m, -c);
  return out;
}

Poly Poly::operator+(const Poly& o) const {
  Poly out = *this;
  out += o;
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  for (auto& [m, c] : o.terms) add_term(m, c);
  return *this;
}

Poly Poly::operator-(const Poly& o) const {
  Poly out = *this;
  for (auto& [m, c] : o.terms) out.add_term(m, -c);
  return out;
}

Poly Poly::operator*(const Poly& o) const {
  Poly out;
  for (auto& [ma, ca] : terms)
    for (auto& [mb, cb] : o.terms) out.add_term(monomial_mul(ma, mb), ca * cb);
  return out;
}

Poly Poly::scale(const Rational& c) const {
  Poly out;
  if (c == 0) return out;
  for (auto& [m, k] : terms) out.terms.emplace(m, k * c);
  return out;
}

Poly Poly::pow(int e) const {
  assert(e >= 0);
  Poly out = Poly::constant(1);
  Poly base = *this;
  while (e > 0) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

Poly Poly::derivative(Var v) const {
  Poly out;
  for (auto& [m, c] : terms) {
    for (size_t i = 0; i < m.factors.size(); ++i) {
      if (m.factors[i].first != v) continue;
      Monomial d = m;
      Rational coeff = c * d.factors[i].second;
      if (d.factors[i].second == 1) {
        d.factors.erase(d.factors.begin() + i);
      } else {
        d.factors[i].second -= 1;
      }
      out.add_term(d, coeff);
      break;
    }
  }
  return out;
}

Poly Poly::substitute(const std::map<Var, Poly>& images) const {
  Poly out;
  for (auto& [m, c] : terms) {
    Poly term = Poly::constant(c);
    for (auto& [v, e] : m.factors) {
      auto it = images.find(v);
      if (it == images.end()) {
        term = term * Poly::var(v).pow(e);
      } else {
        term = term * it->second.pow(e);
      }
    }
    out += term;
  }
  return out;
}

Rational Poly::evaluate(const std::function<Rational(Var)>& val) const {
  Rational out(0);
  for (auto& [m, c] : terms) {
    Rational t = c;
    for (auto& [v, e] : m.factors) t *= rat_pow(val(v), e);
    out += t;
  }
  return out;
}

double Poly::evaluate_double(const std::function<double(Var)>& val) const {
  double out = 0.0;
  for (auto& [m, c] : terms) {
    double t = rat_double(c);
    for (auto& [v, e] : m.factors) {
      double x = val(v);
      for (int i = 0; i < e; ++i) t *= x;
    }
    out += t;
  }
  return out;
}

std::set<Var> Poly::support() const {
  std::set<Var> out;
  for (auto& [m, c] : terms)
    for (auto& [v, e] : m.factors) out.insert(v);
  return out;
}

std::string Poly::str(const std::function<std::string(Var)>& name) const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [m, c] : terms) {
    if (!first) os << " + ";
    first = false;
    os << rat_str(c);
    for (auto& [v, e] : m.factors) {
      os << "*" << name(v);
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

}  // namespace bphz
