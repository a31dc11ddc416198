#include "weightlab/quadrature.hpp"

#include "weightlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace weightlab::quad {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Segment {
  double a, b, value, error, abs_value;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// One 15-point Kronrod panel, QUADPACK-style error heuristic.
Segment kronrod_panel(const Fn& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    f1[j] = f(c - dx);
    f2[j] = f(c + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  resk *= h;
  resg *= h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50 * kEps))
    err = std::max(50 * kEps * resabs, err);
  return {a, b, resk, err, resabs};
}

}  // namespace

Estimate gauss_kronrod(const Fn& f, double a, double b, const Options& opt) {
  if (!(b > a)) return {};
  std::priority_queue<Segment> heap;
  Segment first = kronrod_panel(f, a, b);
  double value = first.value, error = first.error, abs_value = first.abs_value;
  heap.push(first);
  auto target = [&] { return std::max(opt.rel_tol * abs_value, 50 * kEps * abs_value); };
  int intervals = 1;
  // Bisections that failed to shrink the local error: the integrand is
  // noisy at this level (e.g. exp(-c/u) with c/u large has cancellation in
  // its exponent), so the target may sit below what double can resolve.
  int roundoff = 0;
  while (error > target() && !(error == 0.0)) {
    if (roundoff >= 20 && error <= 1e4 * target()) break;
    if (!std::isfinite(value)) {
      throw AccuracyError("quadrature: non-finite integrand", value, kInf);
    }
    if (intervals >= opt.max_intervals) {
      throw AccuracyError("quadrature: subdivision budget exhausted", value, error);
    }
    Segment s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) {
      // Interval no longer splittable in double precision.
      throw AccuracyError("quadrature: interval below resolution", value, error);
    }
    Segment l = kronrod_panel(f, s.a, m);
    Segment r = kronrod_panel(f, m, s.b);
    if (l.error + r.error >= 0.9 * s.error) ++roundoff;
    value += l.value + r.value - s.value;
    error += l.error + r.error - s.error;
    abs_value += l.abs_value + r.abs_value - s.abs_value;
    heap.push(l);
    heap.push(r);
    ++intervals;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  value = error = abs_value = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    abs_value += heap.top().abs_value;
    heap.pop();
  }
  return {value, error, abs_value};
}

namespace {

// Shared driver for dyadic pieces toward 0. Piece values are handled as
// (log|P|, sign) so the log-domain caller and the linear caller share it.
struct Piece {
  double log_abs;  // log |P|, -inf if zero
  double sign;     // +1 or -1
  double log_err;  // log of quadrature error of the piece
};

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Accumulates signed values in log-scaled form: total = exp(scale) * acc.
struct ScaledSum {
  double scale = -kInf;
  double acc = 0.0;
  void add(double log_abs, double sign) {
    if (log_abs == -kInf) return;
    if (log_abs > scale) {
      acc = (scale == -kInf ? 0.0 : acc * std::exp(scale - log_abs));
      scale = log_abs;
    }
    acc += sign * std::exp(log_abs - scale);
  }
  double log_abs() const { return acc == 0.0 ? -kInf : scale + std::log(std::abs(acc)); }
  double sign() const { return acc < 0 ? -1.0 : 1.0; }
};

template <class PieceFn>
void sum_to_zero(PieceFn&& piece, double hi, const Options& opt, ScaledSum& total,
                 ScaledSum& total_abs, double& log_err) {
  std::vector<double> ratios;
  double prev_log = kInf;
  double prev_sign = 1.0;
  int zero_run = 0;
  double upper = hi;
  for (int k = 0; k < opt.max_pieces; ++k) {
    const double lower = 0.5 * upper;
    if (!(lower > 0.0)) break;
    // Deep pieces only need absolute accuracy relative to the running total.
    double rel = opt.rel_tol;
    if (std::isfinite(prev_log) && total_abs.log_abs() > -kInf) {
      rel = std::clamp(opt.rel_tol * std::exp(total_abs.log_abs() - prev_log) / 8.0, opt.rel_tol, 1e-4);
    }
    Piece p = piece(lower, upper, rel);
    total.add(p.log_abs, p.sign);
    total_abs.add(p.log_abs, 1.0);
    log_err = log_add(log_err, p.log_err);
    upper = lower;

    if (p.log_abs == -kInf) {
      if (++zero_run >= 2 && total_abs.log_abs() > -kInf) return;
      prev_log = -kInf;
      continue;
    }
    zero_run = 0;
    if (prev_log == kInf || prev_log == -kInf) {
      prev_log = p.log_abs;
      prev_sign = p.sign;
      continue;
    }
    const double log_ratio = p.log_abs - prev_log;
    const double ratio = std::exp(log_ratio);
    ratios.push_back(ratio);
    prev_log = p.log_abs;
    prev_sign = p.sign;

    const int n = static_cast<int>(ratios.size());
    if (k >= 60 && n >= 8) {
      bool flat = true;
      for (int i = n - 8; i < n; ++i) flat = flat && ratios[i] >= 0.97;
      if (flat) {
        throw AccuracyError("quadrature: integral diverges at the endpoint",
                            std::exp(total_abs.log_abs()), kInf, true);
      }
    }
    if (ratio >= 1.0) continue;
    // Geometric extrapolation of the remaining pieces.
    const double log_tail = p.log_abs + log_ratio - std::log1p(-ratio);
    const double log_scale = total_abs.log_abs();
    const double log_target = std::log(opt.rel_tol) + log_scale;
    bool done = log_tail <= log_target;
    if (!done && n >= 4 && log_tail <= 0.5 * std::log(opt.rel_tol) + log_scale) {
      double lo_r = ratios[n - 1], hi_r = ratios[n - 1];
      for (int i = n - 4; i < n; ++i) {
        lo_r = std::min(lo_r, ratios[i]);
        hi_r = std::max(hi_r, ratios[i]);
      }
      if (hi_r < 1.0) {
        const double spread = (hi_r - lo_r) / (1.0 - hi_r);
        done = log_tail + std::log(std::max(spread, 1e-300)) <= log_target;
      }
    }
    if (done) {
      total.add(log_tail, prev_sign);
      total_abs.add(log_tail, 1.0);
      return;
    }
  }
  throw AccuracyError("quadrature: endpoint pieces did not settle",
                      std::exp(total.log_abs()) * total.sign(), std::exp(total_abs.log_abs()));
}

// Pieces [lo 2^k, lo 2^(k+1)] covering [lo, hi] when hi/lo is large.
template <class PieceFn>
void sum_geometric(PieceFn&& piece, double lo, double hi, const Options& opt, ScaledSum& total,
                   ScaledSum& total_abs, double& log_err) {
  double a = lo;
  while (a < hi) {
    double b = (hi / a > 4.0) ? 2.0 * a : hi;
    Piece p = piece(a, b, opt.rel_tol);
    total.add(p.log_abs, p.sign);
    total_abs.add(p.log_abs, 1.0);
    log_err = log_add(log_err, p.log_err);
    a = b;
  }
}

double safe_log(double x) { return x > 0 ? std::log(x) : -kInf; }

}  // namespace

Estimate integrate_gap(const Fn& g, double lo, double hi, const Options& opt) {
  if (!(hi > lo)) return {};
  auto piece = [&](double a, double b, double rel) {
    Options o = opt;
    o.rel_tol = rel;
    Estimate e = gauss_kronrod(g, a, b, o);
    return Piece{safe_log(std::abs(e.value)), e.value < 0 ? -1.0 : 1.0, safe_log(e.error)};
  };
  ScaledSum total, total_abs;
  double log_err = -kInf;
  if (lo <= 0.0) {
    sum_to_zero(piece, hi, opt, total, total_abs, log_err);
  } else {
    sum_geometric(piece, lo, hi, opt, total, total_abs, log_err);
  }
  return {total.sign() * std::exp(total.log_abs()), std::exp(log_err),
          std::exp(total_abs.log_abs())};
}

namespace {

// log of the integral of exp(log_g) over [a, b]. When an endpoint value
// dominates every panel node by a wide margin the mass sits in a boundary
// layer the panel cannot see, so the interval is bisected toward it first.
// Panels whose values all lie below `floor` are negligible and only bounded.
Piece log_panel(const Fn& log_g, double a, double b, const Options& opt, int depth, double floor) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double la = log_g(a), lb = log_g(b);
  double inner = log_g(c);
  for (double x : kXgk) inner = std::max({inner, log_g(c - h * x), log_g(c + h * x)});
  const double top = std::max({la, lb, inner});
  if (top < floor) {
    const double bound = top + std::log(b - a);
    return Piece{bound, 1.0, bound};
  }
  if (64.0 * kEps * std::abs(top) > 0.1) {
    // Log samples this large carry O(1) absolute noise, so neither layer
    // detection nor refinement means anything. The crude bound is off by
    // the log of the layer count, negligible next to |top|.
    const double bound = top + std::log(b - a);
    return Piece{bound, 1.0, bound};
  }
  if (depth < 80 && std::max(la, lb) > inner + 30.0 && c > a && c < b) {
    // Dominant half first; its value sets the floor for the other half.
    const bool right = lb >= la;
    Piece d = right ? log_panel(log_g, c, b, opt, depth + 1, floor) : log_panel(log_g, a, c, opt, depth + 1, floor);
    const double next_floor = std::max(floor, d.log_abs - 45.0);
    Piece o = right ? log_panel(log_g, a, c, opt, depth + 1, next_floor)
                    : log_panel(log_g, c, b, opt, depth + 1, next_floor);
    return Piece{log_add(d.log_abs, o.log_abs), 1.0, log_add(d.log_err, o.log_err)};
  }
  double shift = std::max({la, lb, inner});
  if (shift == -kInf) return Piece{-kInf, 1.0, -kInf};
  if (!std::isfinite(shift)) {
    throw AccuracyError("quadrature: non-finite log integrand", shift, kInf);
  }
  // A log value of size M carries an absolute error near M eps, so exp of it
  // is only known to relative accuracy M eps; do not ask for more.
  // Past 1e-3 the samples are pure noise relative to each other, yet the
  // log of the integral is still good to about M eps; any estimate will do.
  const double noise = 64.0 * kEps * std::abs(shift);
  const bool coarse = noise > 1e-3;
  Options local = opt;
  local.rel_tol = std::min(std::max(opt.rel_tol, noise), std::max(opt.rel_tol, 1e-3));
  // If the adaptive refinement finds values above the shift, rescale and redo.
  for (int attempt = 0;; ++attempt) {
    double seen = -kInf;
    auto scaled = [&](double t) {
      const double lg = log_g(t);
      seen = std::max(seen, lg);
      return std::exp(lg - shift);
    };
    try {
      Estimate e = gauss_kronrod(scaled, a, b, local);
      if (seen <= shift + 1.0 || attempt >= 3) {
        return Piece{shift + safe_log(e.value), 1.0, shift + safe_log(e.error)};
      }
    } catch (const AccuracyError& e) {
      if (coarse && !e.divergent() && e.estimate() > 0.0 && std::isfinite(e.estimate())) {
        const double v = shift + std::log(e.estimate());
        return Piece{v, 1.0, v};
      }
      if (seen <= shift + 1.0 || attempt >= 3) throw;
    }
    shift = seen;
  }
}

}  // namespace

double log_integrate(const Fn& log_f, double a, double b, const Options& opt) {
  if (!(b > a)) return -kInf;
  return log_panel(log_f, a, b, opt, 0, -kInf).log_abs;
}

double log_integrate_gap(const Fn& log_g, double lo, double hi, const Options& opt) {
  if (!(hi > lo)) return -kInf;
  auto piece = [&](double a, double b, double rel) {
    Options o = opt;
    o.rel_tol = rel;
    return log_panel(log_g, a, b, o, 0, -kInf);
  };
  ScaledSum total, total_abs;
  double log_err = -kInf;
  if (lo <= 0.0) {
    sum_to_zero(piece, hi, opt, total, total_abs, log_err);
  } else {
    sum_geometric(piece, lo, hi, opt, total, total_abs, log_err);
  }
  return total.log_abs();
}

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^a (1+x)^b on [-1, 1].
Rule jacobi_minus1_1(int n, double a, double b) {
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag(k) = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    const double num = 4.0 * k * (k + a) * (k + b) * (k + ab);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    sub(k - 1) = std::sqrt(num / den);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  Rule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = mu0 * es.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace

Rule gauss_legendre(int n) {
  Rule r = jacobi_minus1_1(n, 0.0, 0.0);
  r.nodes = (r.nodes.array() + 1.0) * 0.5;
  r.weights *= 0.5;
  return r;
}

Rule gauss_jacobi(int n, double alpha) {
  if (!(alpha > -1.0)) throw DomainError("gauss_jacobi: alpha must exceed -1");
  Rule r = jacobi_minus1_1(n, 0.0, alpha);
  r.nodes = (r.nodes.array() + 1.0) * 0.5;
  r.weights *= std::pow(0.5, alpha + 1.0);
  return r;
}

}  // namespace weightlab::quad
