#pragma once

#include "weightlab/radial_weight.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace weightlab {

enum class Verdict { FiniteEvidence, DivergenceEvidence, Inconclusive };

std::string to_string(Verdict v);

struct ConditionParams {
  double p = 2.0;
  int grid_depth = 80;   // J: grid r_j = 1 - 2^(-j/4), j = 0..J
  int N_max = 1024;      // discrete functionals sample N = 0..N_max
  double tol = kDefaultTol;
  double eps_slope = 0.05;  // trend threshold, per decade
  double c_min = 0.01;      // lower-doubling floor
  double m_floor = 1.01;    // moment-doubling floor (must exceed 1)
  /// Additional gaps 1 - r in (0, 1) merged into radius grids.
  std::vector<double> extra_gaps;

  /// Conjugate exponent p / (p - 1); requires p > 1.
  double p_conj() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const ConditionParams& p);

/// Gap values u_j = 2^(-j/4), j = 0..J, of the radius grid r_j = 1 - u_j.
std::vector<double> radius_grid_gaps(int depth);

/// Sampled functional with a finiteness verdict.
///
/// `trend` is the least-squares slope of ln(running sup) against log10 of
/// the growth variable (1/(1-r) on radius grids, N+1 for sequences), fitted
/// on the samples in the top quarter of that log range. Using the running
/// sup keeps oscillating but bounded samples from reading as growth. The
/// lower doubling profile fits the raw samples instead. A sequence is taken to
/// be bounded when trend <= eps_slope. Any +inf sample or divergent inner
/// integral is divergence evidence; failed premises give Inconclusive.
struct ConditionReport {
  std::string name;
  std::string param_name;       // "r" or "N"
  std::vector<double> params;   // r_j or N
  std::vector<double> gaps;     // 1 - r_j on radius grids, empty otherwise
  std::vector<double> values;
  double running_sup = 0.0;
  double running_inf = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  double trend = 0.0;
  std::string note;
  WeightSpec weight;
  nlohmann::json parameters = nlohmann::json::object();

  /// Running supremum after each sample, for CSV output.
  std::vector<double> running_sup_series() const;
};

void to_json(nlohmann::json& j, const ConditionReport& r);
/// CSV with header param,value,running_sup; one row per sample.
std::string to_csv(const ConditionReport& r);

/// Slope used for `trend`: least squares of ln(values) on x over the top
/// quarter of the x range. NaN when fewer than three usable samples.
double tail_trend(const std::vector<double>& x, const std::vector<double>& values);

// ---- weight classes

/// hat(w)(r) / hat(w)((1+r)/2) on the radius grid.
ConditionReport dhat_profile(const RadialWeight& w, const ConditionParams& cp = {});
/// w_n / w_2n for n = 0..N_max.
ConditionReport dhat_discrete(const RadialWeight& w, int N_max, double tol = kDefaultTol);
/// (int_r^{1-(1-r)/K} w) / hat(w)(r) on the radius grid. Finite evidence
/// means the lower doubling inequality holds: inf >= c_min and no decay.
ConditionReport dcheck_profile(const RadialWeight& w, double K, const ConditionParams& cp = {});
/// w_n / w_Kn for n = 1..N_max. Finite evidence means inf >= m_floor > 1.
ConditionReport mclass_probe(const RadialWeight& w, int K, int N_max, const ConditionParams& cp = {});

// ---- boundedness functionals, p > 1

/// sup_N (sum_{n<=N} 1/((n+1)^2 w_{2n+1}^p))^{1/p} (sum_{n>=N} w_{2n+1}^{p'} (n+1)^{p'-2})^{1/p'}.
/// The tail series is summed exactly up to max(4 N_max, 4096) and the rest is
/// replaced by the integral of the same expression in a real variable.
/// Requires dhat_discrete finite evidence, otherwise Inconclusive.
ConditionReport Mp_discrete(const RadialWeight& w, const ConditionParams& cp);

enum class KpcVariant { M, K };
/// (c + int_0^r hat(w)^-p)^{1/p} (int_r^1 (hat(w)(t)/(1-t))^{p'} dt)^{1/p'},
/// c = 0 for variant M and c = 1 for variant K.
ConditionReport Kpc_continuous(const RadialWeight& w, const ConditionParams& cp, KpcVariant variant);
/// hat(w)(r) (1-r)^{-1/p} (1 + int_0^r hat(w)^-p)^{1/p}
ConditionReport Kpd(const RadialWeight& w, const ConditionParams& cp);
/// (1-r)^{1/p} / hat(w)(r) (int_r^1 (hat(w)(t)/(1-t))^{p'} dt)^{1/p'}
ConditionReport Kpe(const RadialWeight& w, const ConditionParams& cp);

// ---- p = 1

enum class K1Variant { K1c, K1d, M1d, M1 };
/// K1c: (1/(1-a)) int_a^1 w(t) (1 + int_0^t 1/hat(w)) dt
/// K1d: hat(w)(a)/(1-a) (1 + int_0^a 1/hat(w)); M1d is the same without the 1
/// M1:  (N+1) w_2N sum_{k<=N} 1/((k+1)^2 w_2k), N = 0..N_max
ConditionReport K1_family(const RadialWeight& w, const ConditionParams& cp, K1Variant variant);
/// Same samples as K1_family(K1c).
ConditionReport carleson_functional(const RadialWeight& w, const ConditionParams& cp);

/// p > 1: (1 + int_0^r hat(w)^-p)^{1/p} (int_r^1 w^{p'})^{1/p'} on the grid.
/// p = 1: w(t)(1 + int_0^t 1/hat(w)) at grid points, segment ends and midpoints.
ConditionReport mp_small(const RadialWeight& w, const ConditionParams& cp);

/// Fitted bound hat(w)(r)/hat(w)(t) <= C ((1-r)/(1-t))^beta over grid pairs r <= t.
struct DoublingFit {
  double C = 0.0;
  double beta = 0.0;
};
DoublingFit fit_doubling_bound(const RadialWeight& w, int grid_depth = 80);

}  // namespace weightlab
