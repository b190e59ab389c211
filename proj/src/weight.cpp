#include "bphz/weight.hpp"

#include <cassert>
#include <sstream>

namespace bphz {

LinForm LinForm::point(PosId p) {
  LinForm f;
  f.coeff.emplace(p, Rational(1));
  return f;
}

void LinForm::add(PosId p, const Rational& c) {
  if (c == 0) return;
  auto it = coeff.find(p);
  if (it == coeff.end()) {
    coeff.emplace(p, c);
  } else {
    it->second += c;
    if (it->second == 0) coeff.erase(it);
  }
}

LinForm LinForm::operator-(const LinForm& o) const {
  LinForm out = *this;
  for (auto& [p, c] : o.coeff) out.add(p, -c);
  return out;
}

Poly LinForm::coord_poly(int mu) const {
  Poly out;
  for (auto& [p, c] : coeff) out += Poly::var(coord_var(p, mu)).scale(c);
  return out;
}

LinForm LinForm::substitute(const std::map<PosId, LinForm>& images) const {
  LinForm out;
  for (auto& [p, c] : coeff) {
    auto it = images.find(p);
    if (it == images.end()) {
      out.add(p, c);
    } else {
      for (auto& [q, d] : it->second.coeff) out.add(q, c * d);
    }
  }
  return out;
}

std::pair<SigmaKey, Rational> normalize_form(const LinForm& f) {
  assert(!f.is_zero());
  Rational s = f.coeff.begin()->second;  // lowest PosId has the pivot
  SigmaKey key;
  for (auto& [p, c] : f.coeff) key.form.coeff.emplace(p, c / s);
  return {key, s};
}

Poly sigma_poly(const LinForm& f) {
  Poly out;
  for (int mu = 0; mu < kDim; ++mu) {
    Poly c = f.coord_poly(mu);
    out += c * c;
  }
  return out;
}

Weight Weight::inv_sigma(PosId a, PosId b) {
  LinForm diff = LinForm::point(a) - LinForm::point(b);
  assert(!diff.is_zero());
  auto [key, s] = normalize_form(diff);
  Weight w;
  w.num = Poly::constant(rat_pow(s, -2));
  w.den.emplace(key, 1);
  return w;
}

Weight Weight::operator*(const Weight& o) const {
  Weight out;
  out.num = num * o.num;
  if (out.num.is_zero()) return Weight::zero();
  out.den = den;
  for (auto& [k, e] : o.den) out.den[k] += e;
  return out;
}

Weight Weight::operator+(const Weight& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  // Common denominator: per key, the max of the two exponents.
  Weight out;
  out.den = den;
  for (auto& [k, e] : o.den) {
    auto it = out.den.find(k);
    if (it == out.den.end()) {
      out.den.emplace(k, e);
    } else {
      it->second = std::max(it->second, e);
    }
  }
  Poly lhs = num, rhs = o.num;
  for (auto& [k, e] : out.den) {
    auto ia = den.find(k);
    int ea = (ia == den.end()) ? 0 : ia->second;
    if (e > ea) lhs = lhs * sigma_poly(k.form).pow(e - ea);
    auto ib = o.den.find(k);
    int eb = (ib == o.den.end()) ? 0 : ib->second;
    if (e > eb) rhs = rhs * sigma_poly(k.form).pow(e - eb);
  }
  out.num = lhs + rhs;
  if (out.num.is_zero()) return Weight::zero();
  return out;
}

Weight Weight::operator-() const {
  Weight out = *this;
  out.num = -out.num;
  return out;
}

Weight Weight::scale(const Rational& c) const {
  if (c == 0) return Weight::zero();
  Weight out = *this;
  out.num = out.num.scale(c);
  return out;
}

Weight Weight::derivative(PosId p, int mu) const {
  // d/dx_p^mu [ num / prod sigma_K^{e_K} ]
  //   = [ num' * prod_aff sigma_K
  //       - num * sum_aff e_K * (2 c_p^K * L_K^mu) * prod_{aff != K} sigma_K ]
  //     / ( prod_aff sigma_K^{e_K+1} * prod_unaff sigma_K^{e_K} )
  Var v = coord_var(p, mu);
  std::vector<std::pair<SigmaKey, int>> affected;
  for (auto& [k, e] : den)
    if (k.form.coeff.count(p)) affected.emplace_back(k, e);

  Poly dnum = num.derivative(v);
  Poly lead = dnum;
  for (auto& [k, e] : affected) lead = lead * sigma_poly(k.form);

  Poly corr;
  for (size_t i = 0; i < affected.size(); ++i) {
    auto& [k, e] = affected[i];
    Rational cp = k.form.coeff.at(p);
    // d sigma(L)/dx_p^mu = 2 c_p * L^mu.
    Poly dsig = k.form.coord_poly(mu).scale(2 * cp);
    Poly piece = num.scale(e) * dsig;
    for (size_t j = 0; j < affected.size(); ++j)
      if (j != i) piece = piece * sigma_poly(affected[j].first.form);
    corr += piece;
  }

  Weight out;
  out.num = lead - corr;
  if (out.num.is_zero()) return Weight::zero();
  out.den = den;
  for (auto& [k, e] : affected) out.den[k] = e + 1;
  return out;
}

Weight Weight::substitute_points(const std::map<PosId, LinForm>& images) const {
  std::map<Var, Poly> var_images;
  for (auto& [p, f] : images)
    for (int mu = 0; mu < kDim; ++mu) var_images.emplace(coord_var(p, mu), f.coord_poly(mu));

  Weight out;
  out.num = num.substitute(var_images);
  for (auto& [k, e] : den) {
    LinForm nf = k.form.substitute(images);
    if (nf.is_zero()) {
      std::ostringstream os;
      os << "distance factor vanished under substitution of";
      for (auto& [p, f] : images) os << " x" << p;
      throw SigmaVanished(os.str());
    }
    auto [nk, s] = normalize_form(nf);
    out.num = out.num.scale(rat_pow(s, -2 * e));
    out.den[nk] += e;  // distinct keys may collide after substitution
  }
  if (out.num.is_zero()) return Weight::zero();
  return out;
}

Rational Weight::evaluate(const std::map<PosId, std::array<Rational, 4>>& config) const {
  auto val = [&](Var v) -> Rational {
    auto it = config.find(var_pos(v));
    if (it == config.end()) throw std::invalid_argument("missing position in configuration");
    return it->second[var_mu(v)];
  };
  Rational out = num.evaluate(val);
  for (auto& [k, e] : den) {
    Rational s(0);
    for (int mu = 0; mu < kDim; ++mu) {
      Rational c = k.form.coord_poly(mu).evaluate(val);
      s += c * c;
    }
    if (s == 0) throw SigmaVanished("zero squared distance at evaluation point");
    out /= rat_pow(s, e);
  }
  return out;
}

double Weight::evaluate_double(const std::map<PosId, std::array<double, 4>>& config) const {
  auto val = [&](Var v) -> double {
    auto it = config.find(var_pos(v));
    if (it == config.end()) throw std::invalid_argument("missing position in configuration");
    return it->second[var_mu(v)];
  };
  double out = num.evaluate_double(val);
  for (auto& [k, e] : den) {
    double s = 0.0;
    for (int mu = 0; mu < kDim; ++mu) {
      double c = k.form.coord_poly(mu).evaluate_double(val);
      s += c * c;
    }
    for (int i = 0; i < e; ++i) out /= s;
  }
  return out;
}

std::set<PosId> Weight::position_support() const {
  std::set<PosId> out;
  for (Var v : num.support()) out.insert(var_pos(v));
  for (auto& [k, e] : den)
    for (auto& [p, c] : k.form.coeff) out.insert(p);
  return out;
}

}  // namespace bphz
