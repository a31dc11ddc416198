#include "weightlab/norms.hpp"

#include "weightlab/errors.hpp"
#include "weightlab/parallel.hpp"
#include "weightlab/quadrature.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace weightlab {

namespace {

using cplx = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxRadialNodes = 2048;  // Golub-Welsch is cubic in the node count

void check_p(double p, const char* who, double floor = 0.25) {
  if (!(p >= floor)) throw DomainError(std::string(who) + ": p must be at least " + std::to_string(floor));
}

bool even_integer(double p) { return std::isfinite(p) && p == std::round(p) && static_cast<long>(p) % 2 == 0; }

int next_pow2(long n) {
  int m = 4;
  while (m < n) m *= 2;
  return m;
}

// Values f(r e^{-2 pi i j / n}), j = 0..n-1.
std::vector<cplx> circle_values(const CoefficientSeries& f, double r, int n) {
  std::vector<cplx> in(static_cast<std::size_t>(n), cplx(0.0)), out;
  double rk = 1.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    in[k] = f[k] * rk;
    rk *= r;
  }
  thread_local Eigen::FFT<double> fft;  // keeps its twiddle tables between calls
  fft.fwd(out, in);
  return out;
}

double golden_max(const std::function<double(double)>& g, double a, double b, int iters = 60) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int i = 0; i < iters && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + phi * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - phi * (b - a);
      g1 = g(x1);
    }
  }
  return std::max(g1, g2);
}

// max over the circle of radius r: best sample, then golden section between its neighbours.
double circle_max(const CoefficientSeries& f, double r, int n) {
  if (f.empty()) return 0.0;
  const auto v = circle_values(f, r, n);
  std::size_t best = 0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (std::abs(v[j]) > std::abs(v[best])) best = j;
  }
  const double h = 2.0 * std::numbers::pi / n;
  const double theta = -h * static_cast<double>(best);
  auto at = [&](double t) { return std::abs(f.evaluate(std::polar(r, t))); };
  return std::max(std::abs(v[best]), golden_max(at, theta - h, theta + h));
}

double mean_power(const CoefficientSeries& f, double r, double p, int n) {
  if (f.empty()) return 0.0;
  const auto v = circle_values(f, r, n);
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& x : v) s += std::norm(x);
  } else if (p == 1.0) {
    for (const auto& x : v) s += std::abs(x);
  } else if (p == 3.0) {
    for (const auto& x : v) s += std::norm(x) * std::abs(x);
  } else {
    for (const auto& x : v) s += std::pow(std::abs(x), p);
  }
  return s / n;
}

bool trivially_zero(const CoefficientSeries& f) { return f.empty() || (f.coeffs().array() == 0.0).all(); }

CoefficientSeries tail_from(const CoefficientSeries& f, int from) {
  // coefficients from index `from` on, shifted down (used to drop the constant)
  if (static_cast<int>(f.size()) <= from) return {};
  return CoefficientSeries(Eigen::VectorXd(f.coeffs().tail(static_cast<Eigen::Index>(f.size()) - from)));
}

const quad::Rule& cached_jacobi(int n, double alpha) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, quad::Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({n, alpha});
  if (it == cache.end()) it = cache.emplace(std::make_pair(n, alpha), quad::gauss_jacobi(n, alpha)).first;
  return it->second;
}

}  // namespace

int circle_samples(const CoefficientSeries& f, double p, const NormParams& params) {
  const long need = 4L * (static_cast<long>(std::max<std::size_t>(f.size(), 1)));
  if (params.n_theta != 0) {
    const int n = params.n_theta;
    if (n < need || (n & (n - 1)) != 0) {
      throw DomainError("n_theta must be a power of two and at least 4 (degree + 1)");
    }
    return n;
  }
  const int base = next_pow2(need);
  return even_integer(p) ? base : std::max(2 * base, 64);
}

double integral_mean(const CoefficientSeries& f, double r, double p, const NormParams& params) {
  check_p(p, "integral_mean");
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("integral_mean: r must lie in [0, 1]");
  const int n = circle_samples(f, p, params);
  if (std::isinf(p)) return circle_max(f, r, n);
  return std::pow(mean_power(f, r, p, n), 1.0 / p);
}

double hp_norm(const CoefficientSeries& f, double p, const NormParams& params) {
  return integral_mean(f, 1.0, p, params);
}

double hl_norm(const CoefficientSeries& f, double p) {
  if (!(p > 0.0) || std::isinf(p)) throw DomainError("hl_norm: p must be positive and finite");
  double s = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    if (f[n] != 0.0) s += std::pow(std::abs(f[n]), p) * std::pow(n + 1.0, p - 2.0);
  }
  return std::pow(s, 1.0 / p);
}

double hl_infty(const CoefficientSeries& f) {
  double m = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) m = std::max(m, (n + 1.0) * std::abs(f[n]));
  return m;
}

double dirichlet_norm(const CoefficientSeries& f, double p, const NormParams& params) {
  check_p(p, "dirichlet_norm");
  if (std::isinf(p)) throw DomainError("dirichlet_norm: p must be finite");
  const double f0 = f.empty() ? 0.0 : std::abs(f[0]);
  const auto df = f.derivative();
  if (trivially_zero(df)) return f0;
  const int deg = f.degree();
  if (p == 2.0 && params.radial_nodes == 0) {
    // Parseval and 2 int_0^1 r^(2n-1) (1-r) dr = 1/(n(2n+1))
    double s = f0 * f0;
    for (int n = 1; n <= deg; ++n) s += f[n] * f[n] * n / (2.0 * n + 1.0);
    return std::sqrt(s);
  }
  int nodes = params.radial_nodes;
  if (nodes == 0) {
    nodes = deg + 32;
  } else if (nodes < deg) {
    throw AccuracyError("dirichlet_norm: radial rule has fewer nodes than the degree", kInf, kInf);
  }
  if (nodes > kMaxRadialNodes) {
    throw AccuracyError("dirichlet_norm: degree too large for the radial rule (p != 2)", kInf, kInf);
  }
  // r in [1/2, 1]: Gauss-Jacobi in x = 1 - r for the (1-r)^(p-1) endpoint.
  // r in [0, 1/2]: adaptive, since M_p^p(r, f') ~ r^(mp) when f' has a zero of order m at 0.
  const quad::Rule& rule = cached_jacobi(nodes, p - 1.0);
  const int n_theta = circle_samples(df, p, params);
  std::vector<double> terms(static_cast<std::size_t>(nodes));
  parallel_for(terms.size(), [&](std::size_t i) {
    const double x = 0.5 * rule.nodes(static_cast<Eigen::Index>(i));
    terms[i] = rule.weights(static_cast<Eigen::Index>(i)) * mean_power(df, 1.0 - x, p, n_theta) * (1.0 - x);
  });
  double s = 0.0;
  for (double t : terms) s += t;
  s *= std::pow(0.5, p);
  quad::Options opt;
  opt.rel_tol = params.tol;
  s += quad::gauss_kronrod(
           [&](double r) { return mean_power(df, r, p, n_theta) * std::pow(1.0 - r, p - 1.0) * r; }, 0.0, 0.5, opt)
           .value;
  return std::pow(std::pow(f0, p) + 2.0 * s, 1.0 / p);
}

double hinftyp_norm(const CoefficientSeries& f, double p, const NormParams& params) {
  if (!(p > 0.0) || std::isinf(p)) throw DomainError("hinftyp_norm: p must be positive and finite");
  if (trivially_zero(f)) return 0.0;
  std::function<double(double)> m_inf;
  if (params.fast_paths && f.nonnegative()) {
    m_inf = [&](double r) { return f.evaluate(r); };
  } else {
    const int n = circle_samples(f, kInf, params);
    m_inf = [&f, n](double r) { return circle_max(f, r, n); };
  }
  quad::Options opt;
  opt.rel_tol = params.tol;
  opt.max_intervals = 2000;
  // split so the growth of high degree terms near r = 1 is resolved
  const int deg = std::max(f.degree(), 1);
  std::vector<double> cuts{0.0};
  for (double g = 0.5; g > 0.5 / deg; g *= 0.5) cuts.push_back(1.0 - g);
  cuts.push_back(1.0);
  std::vector<double> parts(cuts.size() - 1);
  parallel_for(parts.size(), [&](std::size_t i) {
    parts[i] = quad::gauss_kronrod([&](double r) { return std::pow(m_inf(r), p); }, cuts[i], cuts[i + 1], opt).value;
  });
  double s = 0.0;
  for (double v : parts) s += v;
  return std::pow(s, 1.0 / p);
}

double bloch_norm(const CoefficientSeries& f, const NormParams& params) {
  const double f0 = f.empty() ? 0.0 : std::abs(f[0]);
  const auto df = f.derivative();
  if (trivially_zero(df)) return f0;
  std::function<double(double)> m_inf;
  if (params.fast_paths && tail_from(f, 1).nonnegative()) {
    m_inf = [&](double r) { return df.evaluate(r); };
  } else {
    const int n = circle_samples(df, kInf, params);
    m_inf = [&df, n](double r) { return circle_max(df, r, n); };
  }
  auto g = [&](double r) { return (1.0 - r) * (1.0 + r) * m_inf(r); };
  std::vector<double> rs;
  for (int i = 0; i < 64; ++i) rs.push_back(i / 64.0);
  const int deep = 8 * (static_cast<int>(std::log2(df.degree() + 1.0)) + 6);
  for (int j = 1; j <= deep; ++j) rs.push_back(1.0 - std::exp2(-j / 8.0));
  rs.push_back(1.0);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::vector<double> vals(rs.size());
  parallel_for(rs.size(), [&](std::size_t i) { vals[i] = g(rs[i]); });
  const auto best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  const double lo = rs[best == 0 ? 0 : best - 1];
  const double hi = rs[std::min(best + 1, rs.size() - 1)];
  return f0 + std::max(vals[best], golden_max(g, lo, hi));
}

}  // namespace weightlab
