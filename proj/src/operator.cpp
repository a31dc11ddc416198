#include "weightlab/operator.hpp"

#include "weightlab/errors.hpp"
#include "weightlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace weightlab {

CoefficientSeries CoefficientSeries::monomial(int k, double scale) {
  if (k < 0) throw DomainError("monomial: negative degree");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k + 1);
  c(k) = scale;
  return CoefficientSeries(std::move(c));
}

CoefficientSeries CoefficientSeries::derivative() const {
  if (c_.size() <= 1) return CoefficientSeries(Eigen::VectorXd::Zero(std::max<Eigen::Index>(c_.size() - 1, 0)));
  Eigen::VectorXd d(c_.size() - 1);
  for (Eigen::Index n = 1; n < c_.size(); ++n) d(n - 1) = static_cast<double>(n) * c_(n);
  return CoefficientSeries(std::move(d));
}

namespace {
Eigen::VectorXd padded(const Eigen::VectorXd& v, Eigen::Index n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  out.head(v.size()) = v;
  return out;
}
}  // namespace

CoefficientSeries operator+(const CoefficientSeries& a, const CoefficientSeries& b) {
  const Eigen::Index n = std::max(a.c_.size(), b.c_.size());
  return CoefficientSeries(Eigen::VectorXd(padded(a.c_, n) + padded(b.c_, n)));
}

CoefficientSeries operator-(const CoefficientSeries& a, const CoefficientSeries& b) {
  const Eigen::Index n = std::max(a.c_.size(), b.c_.size());
  return CoefficientSeries(Eigen::VectorXd(padded(a.c_, n) - padded(b.c_, n)));
}

CoefficientSeries operator*(double s, const CoefficientSeries& a) { return CoefficientSeries(Eigen::VectorXd(s * a.c_)); }

void to_json(nlohmann::json& j, const CoefficientSeries& s) {
  j = {{"degree", s.degree()}, {"coefficients", s.to_vector()}};
}

void from_json(const nlohmann::json& j, CoefficientSeries& s) {
  const auto& c = j.is_array() ? j : j.at("coefficients");
  s = CoefficientSeries(c.get<std::vector<double>>());
}

std::string to_csv(const CoefficientSeries& s) {
  std::ostringstream os;
  os.precision(17);
  os << "n,coefficient\n";
  for (std::size_t n = 0; n < s.size(); ++n) os << n << ',' << s[n] << '\n';
  return os.str();
}

void to_json(nlohmann::json& j, const OperatorMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int n = 0; n < m.n_rows; ++n) {
    std::vector<double> row(m.n_cols);
    for (int k = 0; k < m.n_cols; ++k) row[k] = m.entries(n, k);
    rows.push_back(std::move(row));
  }
  j = {{"n_rows", m.n_rows}, {"n_cols", m.n_cols}, {"weight", m.weight}, {"entries", std::move(rows)}};
}

std::string to_csv(const OperatorMatrix& m) {
  std::ostringstream os;
  os.precision(17);
  for (int n = 0; n < m.n_rows; ++n) {
    for (int k = 0; k < m.n_cols; ++k) os << (k ? "," : "") << m.entries(n, k);
    os << '\n';
  }
  return os.str();
}

OperatorMatrix matrix(const RadialWeight& w, int N, double tol) {
  if (N < 1) throw DomainError("matrix: N must be >= 1");
  const MomentTable t = moment_table(w, 2 * N - 1, tol);
  OperatorMatrix m;
  m.n_rows = m.n_cols = N;
  m.weight = w.spec();
  m.entries.resize(N, N);
  for (int n = 0; n < N; ++n) {
    const double row = t.log_at(2 * n + 1) + std::log(2.0 * (n + 1));
    for (int k = 0; k < N; ++k) m.entries(n, k) = std::exp(t.log_at(n + k) - row);
  }
  return m;
}

CoefficientSeries apply_series(const MomentTable& table, const CoefficientSeries& f, int N_out) {
  if (N_out < 1) throw DomainError("apply_series: N_out must be >= 1");
  if (f.empty()) throw DomainError("apply_series: empty input series");
  const std::size_t need = std::max<std::size_t>(N_out - 1 + f.size() - 1, 2 * static_cast<std::size_t>(N_out) - 1);
  if (table.size() <= need) throw DomainError("apply_series: moment table too short");
  Eigen::VectorXd out(N_out);
  for (int n = 0; n < N_out; ++n) {
    const double row = table.log_at(2 * n + 1) + std::log(2.0 * (n + 1));
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (f[k] != 0.0) acc += f[k] * std::exp(table.log_at(n + k) - row);
    }
    out(n) = acc;
  }
  return CoefficientSeries(std::move(out));
}

CoefficientSeries apply_series(const RadialWeight& w, const CoefficientSeries& f, int N_out, double tol) {
  if (N_out < 1) throw DomainError("apply_series: N_out must be >= 1");
  if (f.empty()) throw DomainError("apply_series: empty input series");
  const int top = std::max(N_out - 1 + f.degree(), 2 * N_out - 1);
  return apply_series(moment_table(w, top, tol), f, N_out);
}

namespace {

CoefficientSeries apply_integral(const RadialWeight& w, const std::function<double(double)>& f, int N_out,
                                 double tol, const char* who) {
  if (N_out < 1) throw DomainError(std::string(who) + ": N_out must be >= 1");
  Eigen::VectorXd out(N_out);
  parallel_for(static_cast<std::size_t>(N_out), [&](std::size_t i) {
    const int n = static_cast<int>(i);
    auto G = [&](double u) {
      const double t = 1.0 - u;
      return f(t) * std::pow(t, n);
    };
    const double integral = w.integrate_against(G, 0.0, 1.0, tol);
    out(n) = integral / (2.0 * (n + 1) * w.moment(2.0 * n + 1.0, tol));
  });
  return CoefficientSeries(std::move(out));
}

}  // namespace

CoefficientSeries apply_sublinear(const RadialWeight& w, const CoefficientSeries& f, int N_out, double tol) {
  if (f.empty()) throw DomainError("apply_sublinear: empty input series");
  return apply_integral(w, [&](double t) { return std::abs(f.evaluate(t)); }, N_out, tol, "apply_sublinear");
}

CoefficientSeries apply_quadrature(const RadialWeight& w, const std::function<double(double)>& f, int N_out,
                                   double tol) {
  return apply_integral(w, f, N_out, tol, "apply_quadrature");
}

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::B: return "B";
    case KernelKind::K: return "K";
    case KernelKind::G: return "G";
  }
  return "B";
}

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "B") return KernelKind::B;
  if (s == "K") return KernelKind::K;
  if (s == "G") return KernelKind::G;
  throw DomainError("unknown kernel kind '" + s + "' (expected B, K or G)");
}

KernelValue kernel_eval(const RadialWeight& w, KernelKind kind, double t, std::complex<double> z, int N_max,
                        double tol) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("kernel_eval: t must lie in [0, 1)");
  if (!(std::abs(z) < 1.0)) throw DomainError("kernel_eval: |z| must be < 1");
  if (N_max < 1) throw DomainError("kernel_eval: N must be >= 1");
  if (!(tol > 0.0)) throw DomainError("kernel_eval: tol must be positive");

  // Terms are bounded through 1/w_{2n+1} <= rho^{-(2n+1)} / hat(w)(rho):
  //   B: |term_n| <= q^n / (2 rho hat),  q = x / rho^2, x = |tz|
  //   K: the same over (n+1)
  //   G: |term_n| <= t q^(n-1) / (2 rho^3 hat)
  const double x = t * std::abs(z);
  const double rho = std::max(std::pow(x, 0.25), 0.5);
  const double q = x / (rho * rho);
  const double log_hat = w.log_tail_at_gap(1.0 - rho);
  auto log_tail_bound = [&](int N) {
    if (q == 0.0) return kind == KernelKind::G ? (N >= 2 ? -INFINITY : 0.0) : (N >= 1 ? -INFINITY : 0.0);
    const double lq = std::log(q), l1q = std::log1p(-q);
    switch (kind) {
      case KernelKind::B: return N * lq - l1q - std::log(2.0 * rho) - log_hat;
      case KernelKind::K: return N * lq - l1q - std::log(2.0 * rho) - log_hat - std::log(N + 1.0);
      case KernelKind::G:
        return (t > 0.0 ? std::log(t) : -INFINITY) + (N - 1) * lq - l1q - std::log(2.0 * rho * rho * rho) - log_hat;
    }
    return 0.0;
  };
  const double log_tol = std::log(tol);
  int N = kind == KernelKind::G ? 2 : 1;
  while (N <= N_max && log_tail_bound(N) > log_tol) N = std::min(N_max + 1, N < 16 ? N + 1 : N + N / 4);
  if (N > N_max) {
    throw AccuracyError("kernel_eval: tail bound needs more than N terms at this |tz|", 0.0,
                        std::exp(log_tail_bound(N_max)));
  }
  // Refine downward to the smallest sufficient count.
  while (N > (kind == KernelKind::G ? 2 : 1) && log_tail_bound(N - 1) <= log_tol) --N;

  std::complex<double> sum = 0.0;
  const std::complex<double> tz = t * z;
  for (int n = N - 1; n >= 0; --n) {
    const double denom_log = std::log(2.0) + w.log_moment(2.0 * n + 1.0);
    double c = std::exp(-denom_log);
    if (kind != KernelKind::B) c /= (n + 1.0);
    if (kind == KernelKind::G) {
      // d/dz (tz)^n = n t (tz)^(n-1); Horner in tz on the shifted index.
      if (n == 0) continue;
      sum = sum * tz + c * static_cast<double>(n) * t;
    } else {
      sum = sum * tz + c;
    }
  }
  return KernelValue{sum, N, std::exp(log_tail_bound(N))};
}

}  // namespace weightlab
