#pragma once

#include "json.hpp"

#include <memory>
#include <string>
#include <vector>

namespace weightlab {

enum class WeightKind { constant, standard, exponential, piecewise_step, oscillating, sum, tilde };

std::string to_string(WeightKind kind);
WeightKind weight_kind_from_string(const std::string& name);

/// Serializable description of a radial weight on [0, 1).
///
///   constant        w(r) = 1
///   standard        w(r) = (1 - r)^beta, beta > -1
///   exponential     w(r) = exp(-c / (1 - r)), c > 0
///   piecewise_step  w(r) = levels[i] on [knots[i], knots[i+1]), last level up to 1
///   oscillating     plateaus of the tilde transform of `base` (see build_oscillating_weight)
///   sum             pointwise sum of `terms`
///   tilde           hat(base)(r) / (1 - r)
struct WeightSpec {
  WeightKind kind = WeightKind::constant;
  double beta = 0.0;
  double c = 1.0;
  std::vector<double> knots;
  std::vector<double> levels;
  std::shared_ptr<const WeightSpec> base;  // oscillating, tilde
  double p = 2.0;                          // oscillating
  double K = 0.0;                          // oscillating; 0 selects the default rule
  int n_max = 24;                          // oscillating; 0 means "until a_n underflows"
  std::vector<WeightSpec> terms;           // sum

  static WeightSpec constant();
  static WeightSpec standard(double beta);
  static WeightSpec exponential(double c);
  static WeightSpec piecewise_step(std::vector<double> knots, std::vector<double> levels);
  static WeightSpec oscillating(WeightSpec base, double p, double K = 0.0, int n_max = 24);
  static WeightSpec sum(std::vector<WeightSpec> terms);
  static WeightSpec tilde(WeightSpec base);

  /// Throws DomainError when a parameter is out of range.
  void validate() const;

  /// Short human-readable label, e.g. "standard(beta=1)".
  std::string label() const;

  friend bool operator==(const WeightSpec& a, const WeightSpec& b);
};

void to_json(nlohmann::json& j, const WeightSpec& spec);
void from_json(const nlohmann::json& j, WeightSpec& spec);

}  // namespace weightlab
