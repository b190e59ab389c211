#pragma once

#include <stdexcept>
#include <vector>

namespace bphz {

// Least-squares slope of ys against xs.
inline double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fitted_slope: need >= 2 matching samples");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double den = n * sxx - sx * sx;
  if (den == 0) throw std::invalid_argument("fitted_slope: degenerate sample");
  return (n * sxy - sx * sy) / den;
}

}  // namespace bphz
