#pragma once

#include "weightlab/radial_weight.hpp"

#include "json.hpp"

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace weightlab {

/// Taylor coefficients f^(0..degree) of a polynomial. The length is exactly
/// degree + 1; nothing beyond it is implied.
class CoefficientSeries {
 public:
  CoefficientSeries() = default;
  explicit CoefficientSeries(Eigen::VectorXd coeffs) : c_(std::move(coeffs)) {}
  explicit CoefficientSeries(const std::vector<double>& coeffs)
      : c_(Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()))) {}
  static CoefficientSeries monomial(int k, double scale = 1.0);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  std::size_t size() const { return static_cast<std::size_t>(c_.size()); }
  bool empty() const { return c_.size() == 0; }
  double operator[](std::size_t n) const { return c_(static_cast<Eigen::Index>(n)); }
  double& operator[](std::size_t n) { return c_(static_cast<Eigen::Index>(n)); }
  const Eigen::VectorXd& coeffs() const { return c_; }
  std::vector<double> to_vector() const { return {c_.data(), c_.data() + c_.size()}; }

  bool nonnegative() const { return (c_.array() >= 0.0).all(); }

  /// Horner evaluation; S is double or std::complex<double>.
  template <class S>
  S evaluate(S z) const {
    S acc(0);
    for (Eigen::Index n = c_.size(); n-- > 0;) acc = acc * z + c_(n);
    return acc;
  }
  /// Derivative series, degree one less (empty stays empty).
  CoefficientSeries derivative() const;

  friend CoefficientSeries operator+(const CoefficientSeries& a, const CoefficientSeries& b);
  friend CoefficientSeries operator-(const CoefficientSeries& a, const CoefficientSeries& b);
  friend CoefficientSeries operator*(double s, const CoefficientSeries& a);
  friend bool operator==(const CoefficientSeries& a, const CoefficientSeries& b) { return a.c_ == b.c_; }

 private:
  Eigen::VectorXd c_;
};

void to_json(nlohmann::json& j, const CoefficientSeries& s);
void from_json(const nlohmann::json& j, CoefficientSeries& s);
/// CSV with header n,coefficient.
std::string to_csv(const CoefficientSeries& s);

/// Leading block of the coefficient matrix a_{n,k} = w_{n+k} / (2(n+1) w_{2n+1}).
struct OperatorMatrix {
  int n_rows = 0;
  int n_cols = 0;
  Eigen::MatrixXd entries;
  WeightSpec weight;
};

void to_json(nlohmann::json& j, const OperatorMatrix& m);
/// Row-major CSV, one matrix row per line, no header.
std::string to_csv(const OperatorMatrix& m);

OperatorMatrix matrix(const RadialWeight& w, int N, double tol = kDefaultTol);

/// (H f)^(n) = sum_k f^(k) w_{n+k} / (2(n+1) w_{2n+1}) for n < N_out.
CoefficientSeries apply_series(const RadialWeight& w, const CoefficientSeries& f, int N_out,
                               double tol = kDefaultTol);
/// Same with moments taken from `table`, which must reach index
/// max(N_out - 1 + degree, 2 N_out - 1).
CoefficientSeries apply_series(const MomentTable& table, const CoefficientSeries& f, int N_out);

/// Coefficients (1/(2(n+1) w_{2n+1})) int_0^1 |f(t)| t^n w(t) dt by quadrature.
CoefficientSeries apply_sublinear(const RadialWeight& w, const CoefficientSeries& f, int N_out,
                                  double tol = kDefaultTol);

/// Coefficients (1/(2(n+1) w_{2n+1})) int_0^1 f(t) t^n w(t) dt for an
/// arbitrary real evaluator f on [0, 1).
CoefficientSeries apply_quadrature(const RadialWeight& w, const std::function<double(double)>& f, int N_out,
                                   double tol = kDefaultTol);

enum class KernelKind { B, K, G };
std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

struct KernelValue {
  std::complex<double> value;
  int terms = 0;            // number of series terms summed
  double tail_bound = 0.0;  // bound on the omitted tail
};

/// Partial sum of one of the kernel series at (t, z):
///   B: sum (tz)^n / (2 w_{2n+1})
///   K: sum (tz)^n / (2(n+1) w_{2n+1})
///   G: d/dz of K
/// The number of terms is the smallest that makes the tail bound, from
/// w_{2n+1} >= rho^{2n+1} hat(w)(rho), at most tol. Throws AccuracyError if
/// more than N_max terms would be needed.
KernelValue kernel_eval(const RadialWeight& w, KernelKind kind, double t, std::complex<double> z, int N_max,
                        double tol = kDefaultTol);

}  // namespace weightlab
