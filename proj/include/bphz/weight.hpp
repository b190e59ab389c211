#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>

#include "bphz/poly.hpp"
#include "bphz/rational.hpp"

namespace bphz {

// A 4-vector valued linear combination of position symbols,
// sum_p coeff[p] * x_p.  Used for sigma arguments and collapse points.
struct LinForm {
  std::map<PosId, Rational> coeff;  // no zero entries stored

  static LinForm point(PosId p);

  bool is_zero() const { return coeff.empty(); }
  void add(PosId p, const Rational& c);
  LinForm operator-(const LinForm& o) const;
  // The mu component as a polynomial in scalar coordinate variables.
  Poly coord_poly(int mu) const;
  // Simultaneous replacement of position symbols by linear forms.
  LinForm substitute(const std::map<PosId, LinForm>& images) const;

  bool operator<(const LinForm& o) const { return coeff < o.coeff; }
  bool operator==(const LinForm& o) const { return coeff == o.coeff; }
};

// Canonical key for a squared-distance factor sigma(L) = sum_mu (L^mu)^2.
// Forms are normalized so the lowest position id carries coefficient +1;
// the discarded scale s satisfies sigma(form) = s^2 * sigma(key).
struct SigmaKey {
  LinForm form;
  bool operator<(const SigmaKey& o) const { return form < o.form; }
  bool operator==(const SigmaKey& o) const { return form == o.form; }
};

// Returns the normalized key and the scale s (nonzero).
std::pair<SigmaKey, Rational> normalize_form(const LinForm& f);

// sigma as an explicit polynomial in scalar coordinates.
Poly sigma_poly(const LinForm& f);

struct SigmaVanished : std::runtime_error {
  explicit SigmaVanished(const std::string& what) : std::runtime_error(what) {}
};

// A placement of every relevant position symbol in rational 4-space.
using Config = std::map<PosId, std::array<Rational, 4>>;

// A rational function of the shape  num / prod_K sigma(K)^{e_K}  with
// polynomial numerator and positive integer exponents e_K.
class Weight {
 public:
  Poly num;
  std::map<SigmaKey, int> den;  // exponents are >= 1

  static Weight zero() { return Weight{Poly::zero(), {}}; }
  static Weight one() { return Weight{Poly::constant(1), {}}; }
  static Weight from_poly(Poly p) { return Weight{std::move(p), {}}; }
  // 1 / sigma(x_a - x_b).
  static Weight inv_sigma(PosId a, PosId b);

  bool is_zero() const { return num.is_zero(); }

  Weight operator*(const Weight& o) const;
  Weight operator+(const Weight& o) const;
  Weight operator-() const;
  Weight scale(const Rational& c) const;

  // Partial derivative with respect to coordinate mu of position p.
  Weight derivative(PosId p, int mu) const;
  Weight derivative_var(Var v) const { return derivative(var_pos(v), var_mu(v)); }

  // Simultaneous substitution of position symbols by linear forms, applied
  // to numerator and denominator alike.  Throws SigmaVanished if a
  // denominator form collapses to zero.
  Weight substitute_points(const std::map<PosId, LinForm>& images) const;

  Rational evaluate(const std::map<PosId, std::array<Rational, 4>>& config) const;
  double evaluate_double(const std::map<PosId, std::array<double, 4>>& config) const;

  std::set<PosId> position_support() const;
};

}  // namespace bphz
