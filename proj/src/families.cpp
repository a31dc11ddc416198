#include "weightlab/families.hpp"

#include "weightlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weightlab {

namespace {

constexpr double kTailFraction = 1e-6;
constexpr int kMaxConeDegree = 1 << 24;

void check_range(int N, int M) {
  if (N < 0 || M < N) throw DomainError("family index range needs 0 <= N <= M");
}

Eigen::VectorXd zeros_to(int M) { return Eigen::VectorXd::Zero(M + 1); }

// HL(p) mass of one coefficient
double hl_term(double c, double p, int n) { return std::pow(std::abs(c), p) * std::pow(n + 1.0, p - 2.0); }

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::power_block: return "power_block";
    case FamilyKind::dual_block: return "dual_block";
    case FamilyKind::cone_fa: return "cone_fa";
    case FamilyKind::lacunary: return "lacunary";
  }
  return "unknown";
}

FamilyKind family_kind_from_string(const std::string& name) {
  for (auto k : {FamilyKind::power_block, FamilyKind::dual_block, FamilyKind::cone_fa, FamilyKind::lacunary}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown family kind '" + name + "'");
}

void FamilySpec::validate() const {
  switch (kind) {
    case FamilyKind::power_block:
      check_range(N, M);
      if (!std::isfinite(alpha) || !std::isfinite(beta)) throw DomainError("power_block: alpha, beta must be finite");
      break;
    case FamilyKind::dual_block:
      check_range(N, M);
      if (!(p > 1.0) || std::isinf(p)) throw DomainError("dual_block: p must be in (1, inf)");
      break;
    case FamilyKind::cone_fa:
      if (!(a > 0.0 && a < 1.0)) throw DomainError("cone_fa: a must be in (0, 1)");
      if (!(p >= 1.0) || std::isinf(p)) throw DomainError("cone_fa: p must be in [1, inf)");
      if (degree < 0) throw DomainError("cone_fa: degree must be nonnegative");
      break;
    case FamilyKind::lacunary:
      if (!(p > 0.0 && p < 1.0)) throw DomainError("lacunary: p must be in (0, 1)");
      if (terms < 1) throw DomainError("lacunary: terms must be at least 1");
      if (terms > 30) throw DomainError("lacunary: terms > 30 overflows the index 2^n");
      break;
  }
}

void to_json(nlohmann::json& j, const FamilySpec& s) {
  j = {{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case FamilyKind::power_block: j.update({{"N", s.N}, {"M", s.M}, {"alpha", s.alpha}, {"beta", s.beta}}); break;
    case FamilyKind::dual_block: j.update({{"N", s.N}, {"M", s.M}, {"p", s.p}}); break;
    case FamilyKind::cone_fa: j.update({{"a", s.a}, {"p", s.p}, {"degree", s.degree}}); break;
    case FamilyKind::lacunary: j.update({{"p", s.p}, {"terms", s.terms}}); break;
  }
}

void from_json(const nlohmann::json& j, FamilySpec& s) {
  s = FamilySpec{};
  s.kind = family_kind_from_string(j.at("kind").get<std::string>());
  s.N = j.value("N", s.N);
  s.M = j.value("M", s.M);
  s.alpha = j.value("alpha", s.alpha);
  s.beta = j.value("beta", s.beta);
  s.p = j.value("p", s.p);
  s.a = j.value("a", s.a);
  s.degree = j.value("degree", s.degree);
  s.terms = j.value("terms", s.terms);
  s.validate();
}

CoefficientSeries power_block(const RadialWeight* w, int N, int M, double alpha, double beta, double tol) {
  check_range(N, M);
  if (alpha != 0.0 && w == nullptr) throw DomainError("power_block: a weight is required when alpha != 0");
  Eigen::VectorXd c = zeros_to(M);
  for (int k = N; k <= M; ++k) {
    double lc = beta * std::log(k + 1.0);
    if (alpha != 0.0) lc += alpha * w->log_moment(2.0 * k, tol);
    c(k) = std::exp(lc);
  }
  return CoefficientSeries(std::move(c));
}

CoefficientSeries dual_block(const RadialWeight& w, int N, int M, double p, double tol) {
  FamilySpec s;
  s.kind = FamilyKind::dual_block;
  s.N = N;
  s.M = M;
  s.p = p;
  s.validate();
  const double q = p / (p - 1.0);
  Eigen::VectorXd c = zeros_to(M);
  for (int k = N; k <= M; ++k) {
    c(k) = std::exp((q - 1.0) * w.log_moment(2.0 * k + 1.0, tol) + (q - 2.0) * std::log(k + 1.0));
  }
  return CoefficientSeries(std::move(c));
}

CoefficientSeries cone_fa(double a, double p, int degree) {
  FamilySpec s;
  s.kind = FamilyKind::cone_fa;
  s.a = a;
  s.p = p;
  s.degree = degree;
  s.validate();
  const double e = 2.0 / p;
  // term ratio of the HL(p) mass, which decreases to a^p once n is past the peak
  auto ratio = [&](int n) {
    return std::pow(a * (n + e) / (n + 1.0), p) * std::pow((n + 2.0) / (n + 1.0), p - 2.0);
  };
  std::vector<double> c{std::pow((1.0 - a) * (1.0 + a), 1.0 / p)};
  double mass = hl_term(c[0], p, 0);
  auto tail_estimate = [&](int n) {
    // mass beyond index n as a geometric series; the ratio tends to a^p monotonically
    const double rho = std::max({ratio(n), ratio(n + 1), std::pow(a, p)});
    if (rho >= 1.0) return std::numeric_limits<double>::infinity();
    return hl_term(c[n], p, n) * rho / (1.0 - rho);
  };
  const int target = degree > 0 ? degree : kMaxConeDegree;
  for (int n = 0; n < target; ++n) {
    if (degree == 0 && tail_estimate(n) < kTailFraction * mass) break;
    c.push_back(c[n] * a * (n + e) / (n + 1.0));
    mass += hl_term(c.back(), p, n + 1);
  }
  const int last = static_cast<int>(c.size()) - 1;
  const double tail = tail_estimate(last);
  if (!(tail < kTailFraction * mass)) {
    throw TruncationError("cone_fa: degree " + std::to_string(last) + " leaves HL(p) tail mass " +
                              std::to_string(tail / mass) + " of the total",
                          tail);
  }
  return CoefficientSeries(c);
}

double cone_fa_value(double a, double p, double t) {
  if (!(a > 0.0 && a < 1.0) || !(p >= 1.0)) throw DomainError("cone_fa_value: needs 0 < a < 1, p >= 1");
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("cone_fa_value: t must be in [0, 1)");
  return std::pow((1.0 - a) * (1.0 + a), 1.0 / p) * std::pow(1.0 - a * t, -2.0 / p);
}

CoefficientSeries lacunary(double p, int terms) {
  FamilySpec s;
  s.kind = FamilyKind::lacunary;
  s.p = p;
  s.terms = terms;
  s.validate();
  Eigen::VectorXd c = zeros_to(1 << (terms - 1));
  for (int n = 0; n < terms; ++n) c(1 << n) = std::exp2(n / p);
  return CoefficientSeries(std::move(c));
}

CoefficientSeries generate(const FamilySpec& spec, const RadialWeight* w, double tol) {
  spec.validate();
  switch (spec.kind) {
    case FamilyKind::power_block: return power_block(w, spec.N, spec.M, spec.alpha, spec.beta, tol);
    case FamilyKind::dual_block:
      if (w == nullptr) throw DomainError("dual_block: a weight is required");
      return dual_block(*w, spec.N, spec.M, spec.p, tol);
    case FamilyKind::cone_fa: return cone_fa(spec.a, spec.p, spec.degree);
    case FamilyKind::lacunary: return lacunary(spec.p, spec.terms);
  }
  throw DomainError("unknown family kind");
}

}  // namespace weightlab
