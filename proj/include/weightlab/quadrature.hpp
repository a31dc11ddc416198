#pragma once

#include <Eigen/Core>

#include <concepts>
#include <functional>
#include <type_traits>

namespace weightlab {

inline constexpr double kDefaultTol = 1e-10;

namespace quad {

using Fn = std::function<double(double)>;

struct Options {
  double rel_tol = kDefaultTol;
  int max_intervals = 400;  // per adaptive Gauss-Kronrod call
  int max_pieces = 1100;    // dyadic pieces toward the singular endpoint
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;  // integral of |f|, the scale errors are measured against
};

/// Adaptive Gauss-Kronrod 7/15 on [a, b]. Stops when the error estimate is
/// below rel_tol times the integral of |f|. Throws AccuracyError otherwise.
Estimate gauss_kronrod(const Fn& f, double a, double b, const Options& opt = {});

/// Integral of g over the gap interval [lo, hi], 0 <= lo < hi. When lo == 0
/// the point 0 is treated as a possibly singular endpoint: the range is cut
/// into dyadic pieces [hi 2^-k-1, hi 2^-k], and once the piece sizes decay
/// geometrically the remainder is extrapolated. Pieces that stop decaying are
/// reported as divergence (AccuracyError with divergent() == true).
/// Wide ranges with lo > 0 are also split geometrically.
Estimate integrate_gap(const Fn& g, double lo, double hi, const Options& opt = {});

/// Same as integrate_gap for a positive integrand given by its logarithm.
/// Returns log of the integral (-inf when it is zero). Internally every
/// piece is rescaled by its own maximum, so integrands far outside the
/// double range are fine as long as the result is.
double log_integrate_gap(const Fn& log_g, double lo, double hi, const Options& opt = {});

/// log of the integral of exp(log_f) over a finite [a, b] with no endpoint
/// treatment beyond adaptive bisection toward a dominant endpoint.
double log_integrate(const Fn& log_f, double a, double b, const Options& opt = {});

/// Quadrature rule on [0, 1]: sum w_i f(x_i) ~ integral.
struct Rule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
Rule gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight x^alpha, alpha > -1:
/// sum w_i f(x_i) ~ int_0^1 f(x) x^alpha dx.
Rule gauss_jacobi(int n, double alpha);

}  // namespace quad

/// Integral of f over [a, b) with b <= 1, concentrating effort toward b.
/// f may take either (t) or (t, b - t); the second form receives the
/// distance to b computed without cancellation, which matters for
/// integrands like (1 - t)^(-1/2) near t = 1.
template <class F>
  requires std::invocable<F, double> || std::invocable<F, double, double>
double integrate_endpoint_singular(F&& f, double a, double b, double tol = kDefaultTol) {
  quad::Options opt;
  opt.rel_tol = tol;
  auto g = [&](double gap) {
    if constexpr (std::is_invocable_v<F, double, double>) {
      return static_cast<double>(f(b - gap, gap));
    } else {
      return static_cast<double>(f(b - gap));
    }
  };
  return quad::integrate_gap(g, 0.0, b - a, opt).value;
}

}  // namespace weightlab
