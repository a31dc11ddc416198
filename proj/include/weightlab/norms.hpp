#pragma once

#include "weightlab/operator.hpp"

namespace weightlab {

/// Sampling controls shared by the polynomial norms. Zero means automatic.
struct NormParams {
  int n_theta = 0;       // circle samples, power of two >= 4 (degree + 1)
  int radial_nodes = 0;  // radial quadrature nodes, >= degree when given
  double tol = kDefaultTol;
  bool fast_paths = true;  // use M_inf(r, f) = f(r) for nonnegative coefficients
};

/// Circle sample count used for f: n_theta if given (validated), otherwise
/// 4 (degree + 1) rounded up to a power of two, doubled (at least 64) when
/// |f|^p is not a trigonometric polynomial. Means of |f|^p with zeros of f on
/// the circle then converge like n_theta^-2 only.
int circle_samples(const CoefficientSeries& f, double p, const NormParams& params = {});

/// M_p(r, f): L^p mean of |f(r e^{i theta})| over the circle. p = inf gives the
/// maximum, refined locally around the best sample. Requires p >= 1/4.
double integral_mean(const CoefficientSeries& f, double r, double p, const NormParams& params = {});
/// M_p(1, f).
double hp_norm(const CoefficientSeries& f, double p, const NormParams& params = {});
/// (sum |f^(n)|^p (n+1)^(p-2))^(1/p)
double hl_norm(const CoefficientSeries& f, double p);
/// sup (n+1) |f^(n)|
double hl_infty(const CoefficientSeries& f);
/// (|f(0)|^p + 2 int_0^1 M_p^p(r, f') (1-r)^(p-1) r dr)^(1/p).
/// p = 2 without radial_nodes uses the coefficient form |f(0)|^2 + sum n |f^(n)|^2 / (2n+1).
/// Otherwise Gauss-Jacobi in 1 - r on [1/2, 1] (radial_nodes, default
/// degree + 32, at most 2048) and adaptive Gauss-Kronrod on [0, 1/2].
double dirichlet_norm(const CoefficientSeries& f, double p, const NormParams& params = {});
/// (int_0^1 M_inf^p(r, f) dr)^(1/p) for any p > 0.
double hinftyp_norm(const CoefficientSeries& f, double p, const NormParams& params = {});
/// |f(0)| + sup (1 - r^2) |f'(r e^{i theta})|, grid search in r refined by golden section.
double bloch_norm(const CoefficientSeries& f, const NormParams& params = {});

}  // namespace weightlab
