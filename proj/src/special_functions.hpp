#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <limits>

namespace weightlab::detail {

/// log(exp(z) E_2(z)) for z >= 0, where E_2 is the generalized exponential
/// integral. Series for z < 1, modified Lentz continued fraction otherwise.
inline double log_scaled_e2(double z) {
  constexpr double kEuler = 0.5772156649015328606;
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  if (z == 0.0) return 0.0;  // E_2(0) = 1
  if (z < 1.0) {
    // E_n(x) = (-x)^(n-1)/(n-1)! (psi(n) - ln x) - sum_{m != n-1} (-x)^m / ((m - n + 1) m!)
    const int n = 2;
    double ans = 1.0 / (n - 1);
    double fact = 1.0;
    for (int i = 1; i <= 200; ++i) {
      fact *= -z / i;
      double del;
      if (i != n - 1) {
        del = -fact / (i - n + 1);
      } else {
        const double psi = -kEuler + 1.0;  // psi(2)
        del = fact * (-std::log(z) + psi);
      }
      ans += del;
      if (std::abs(del) < std::abs(ans) * kEps) break;
    }
    return z + std::log(ans);
  }
  const int n = 2;
  double b = z + n;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (n - 1 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::log(h);
}

inline double log_add_exp(double a, double b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b).
/// For a large argument the lgamma difference is replaced by its Stirling
/// expansion, which keeps relative accuracy as a grows without bound.
inline double log_beta(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a < 1e3) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double c = a + b;
  auto corr = [](double x) { return 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x); };
  return std::lgamma(b) - b * std::log(a) - (c - 0.5) * std::log1p(b / a) + b + corr(a) - corr(c);
}

}  // namespace weightlab::detail
