#pragma once

#include "weightlab/operator.hpp"

#include "json.hpp"

#include <string>

namespace weightlab {

enum class FamilyKind { power_block, dual_block, cone_fa, lacunary };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

/// Constructor parameters of a test-function family. Fields a kind does not
/// use are ignored (and left out of its JSON).
struct FamilySpec {
  FamilyKind kind = FamilyKind::power_block;
  int N = 0;
  int M = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 2.0;
  double a = 0.5;
  int degree = 0;  // cone_fa: 0 picks the degree adaptively
  int terms = 1;

  void validate() const;
};

void to_json(nlohmann::json& j, const FamilySpec& s);
void from_json(const nlohmann::json& j, FamilySpec& s);

/// sum_{k=N}^{M} w_{2k}^alpha (k+1)^beta z^k. The weight is only read when alpha != 0.
CoefficientSeries power_block(const RadialWeight* w, int N, int M, double alpha, double beta,
                              double tol = kDefaultTol);
/// sum_{k=N}^{M} w_{2k+1}^{p'-1} (k+1)^{p'-2} z^k, p > 1.
CoefficientSeries dual_block(const RadialWeight& w, int N, int M, double p, double tol = kDefaultTol);

/// Coefficients of (1-a^2)^{1/p} (1 - a z)^{-2/p}:
/// (1-a^2)^{1/p} Gamma(n + 2/p) a^n / (n! Gamma(2/p)).
/// degree == 0: grow the degree until the estimated HL(p) tail mass is below
/// 1e-6 of the accumulated mass. A given degree whose tail estimate exceeds
/// that throws TruncationError.
CoefficientSeries cone_fa(double a, double p, int degree = 0);
/// Closed form of the untruncated cone_fa function at a real point t in [0, 1).
double cone_fa_value(double a, double p, double t);

/// sum_{n < terms} 2^{n/p} z^{2^n}, 0 < p < 1, terms <= 30.
CoefficientSeries lacunary(double p, int terms);

/// Dispatch on spec.kind; w is required for dual_block and for power_block with alpha != 0.
CoefficientSeries generate(const FamilySpec& spec, const RadialWeight* w = nullptr, double tol = kDefaultTol);

}  // namespace weightlab
