#pragma once

#include "weightlab/quadrature.hpp"
#include "weightlab/weight_spec.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace weightlab {

/// Maximal smooth piece of a weight in the gap coordinate u = 1 - r.
/// Covers u in (hi - width, hi]. The width is kept separately because
/// plateaus of the oscillating weight are far narrower than the spacing
/// of doubles near hi. A piece with width == hi reaches the boundary r = 1.
struct WeightSegment {
  double hi = 1.0;
  double width = 1.0;
  bool reaches_boundary() const { return width >= hi; }
};

/// Knot data of an oscillating weight, indexed by n = 0..n_max. Gaps are
/// u_n = 1 - r_n = K^-n; the plateau [r_n, t_n] is u in (u_n - a_n, u_n].
struct OscillatingKnots {
  double K = 0.0;
  double p = 0.0;
  int n_max = 0;
  std::vector<double> gap;           // u_n, n = 0..n_max+1
  std::vector<double> log_nu_tail;   // log of the tail of the tilde of the base at u_n, n = 0..n_max+1
  std::vector<double> width;         // a_n
  std::vector<double> height;        // h_n
  std::vector<double> log_plateau;   // log of the integral of the tilde of the base over the plateau
};

class RadialWeight;

/// Realization of a WeightSpec: density, tail and moments. Immutable and
/// cheap to copy. Methods with an `_at_gap` suffix take u = 1 - r, which is
/// what everything near the boundary uses internally.
class RadialWeight {
 public:
  struct Model;

  explicit RadialWeight(const WeightSpec& spec);

  /// The realized spec. For oscillating weights K and n_max are resolved.
  const WeightSpec& spec() const { return spec_; }

  double density(double r) const;
  double density_at_gap(double gap) const;
  double log_density_at_gap(double gap) const;

  double tail(double r, double tol = kDefaultTol) const;
  double tail_at_gap(double gap, double tol = kDefaultTol) const;
  double log_tail_at_gap(double gap, double tol = kDefaultTol) const;
  /// log tail at gap segments()[seg].hi - s for 0 <= s <= width. Exact in s
  /// for oscillating plateaus narrower than the spacing of doubles; other
  /// weights round hi - s.
  double log_tail_in_segment(std::size_t seg, double s, double tol = kDefaultTol) const;

  double moment(double x, double tol = kDefaultTol) const;
  double log_moment(double x, double tol = kDefaultTol) const;

  bool has_closed_form_tail() const;
  bool has_closed_form_moment() const;

  const std::vector<WeightSegment>& segments() const;
  /// Non-null only for oscillating weights.
  const OscillatingKnots* oscillating_knots() const;

  /// Integral of G(u) w(u) over u in [lo, hi], by quadrature on the
  /// segments (sums split into their terms).
  double integrate_against(const std::function<double(double)>& G, double lo, double hi,
                           double tol = kDefaultTol) const;
  /// log of the integral of exp(logG(u)) w(u) over u in [lo, hi].
  double log_integrate_against(const std::function<double(double)>& logG, double lo, double hi,
                               double tol = kDefaultTol) const;
  /// log of the integral of w(u)^q over u in [lo, hi].
  double log_integrate_power(double q, double lo, double hi, double tol = kDefaultTol) const;

  /// Internal evaluation model (defined in the implementation).
  const Model& model_ref() const;

 private:
  RadialWeight(WeightSpec spec, std::shared_ptr<const Model> model);
  friend RadialWeight build_oscillating_weight(const RadialWeight&, double, double, int);

  WeightSpec spec_;
  std::shared_ptr<const Model> model_;
};

/// Cached moments w_x for integer x = 0..x_max.
struct MomentTable {
  WeightSpec weight;
  std::vector<double> indices;
  std::vector<double> values;
  std::vector<double> log_values;
  double tol = kDefaultTol;

  double operator[](std::size_t n) const { return values[n]; }
  double log_at(std::size_t n) const { return log_values[n]; }
  std::size_t size() const { return values.size(); }
};

double eval_density(const RadialWeight& w, double r);
double tail(const RadialWeight& w, double r, double tol = kDefaultTol);
double moment(const RadialWeight& w, double x, double tol = kDefaultTol);

/// Tail and moment through segment quadrature of the density, ignoring any
/// closed form. Used to validate the closed forms.
double quadrature_tail(const RadialWeight& w, double r, double tol = kDefaultTol);
double quadrature_moment(const RadialWeight& w, double x, double tol = kDefaultTol);
/// Log-scale versions, for tails and moments below the double range.
double quadrature_log_tail_at_gap(const RadialWeight& w, double gap, double tol = kDefaultTol);
double quadrature_log_moment(const RadialWeight& w, double x, double tol = kDefaultTol);

MomentTable moment_table(const RadialWeight& w, int x_max_index, double tol = kDefaultTol);

/// Weight with density hat(w)(r) / (1 - r).
RadialWeight tilde_transform(const RadialWeight& w);

/// Oscillating weight sum_n h_n chi_[r_n, t_n] nu~ built from `base`, where
/// nu~ is the tilde transform of base, r_n = 1 - K^-n, t_n = r_n + a_n,
/// a_n = min(r_{n+1} - r_n, hat(nu~)(r_n)^p / (n+1)^(p-1)) / 2 and h_n
/// makes the mass of the n-th plateau equal hat(nu~)(r_n) - hat(nu~)(r_{n+1}).
/// Past the last plateau the weight continues as nu~, so the tail stays
/// positive. K = 0 picks the smallest power of two with
/// hat(nu~)(r) >= 1.1 hat(nu~)(1 - (1-r)/K) on the grid r = 1 - 2^(-j/4), j <= 80.
/// n_max = 0 continues until a_n would drop below 1e-300.
RadialWeight build_oscillating_weight(const RadialWeight& base, double p, double K = 0.0,
                                      int n_max = 24);

/// Default dilation used by build_oscillating_weight when K = 0.
double default_oscillation_dilation(const RadialWeight& base);

}  // namespace weightlab
