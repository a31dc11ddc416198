#include "weightlab/weight_spec.hpp"

#include "weightlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace weightlab {

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::constant: return "constant";
    case WeightKind::standard: return "standard";
    case WeightKind::exponential: return "exponential";
    case WeightKind::piecewise_step: return "piecewise_step";
    case WeightKind::oscillating: return "oscillating";
    case WeightKind::sum: return "sum";
    case WeightKind::tilde: return "tilde";
  }
  return "unknown";
}

WeightKind weight_kind_from_string(const std::string& name) {
  for (auto k : {WeightKind::constant, WeightKind::standard, WeightKind::exponential,
                 WeightKind::piecewise_step, WeightKind::oscillating, WeightKind::sum,
                 WeightKind::tilde}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown weight kind '" + name + "'");
}

WeightSpec WeightSpec::constant() { return WeightSpec{}; }

WeightSpec WeightSpec::standard(double beta) {
  WeightSpec s;
  s.kind = WeightKind::standard;
  s.beta = beta;
  s.validate();
  return s;
}

WeightSpec WeightSpec::exponential(double c) {
  WeightSpec s;
  s.kind = WeightKind::exponential;
  s.c = c;
  s.validate();
  return s;
}

WeightSpec WeightSpec::piecewise_step(std::vector<double> knots, std::vector<double> levels) {
  WeightSpec s;
  s.kind = WeightKind::piecewise_step;
  s.knots = std::move(knots);
  s.levels = std::move(levels);
  s.validate();
  return s;
}

WeightSpec WeightSpec::oscillating(WeightSpec base, double p, double K, int n_max) {
  WeightSpec s;
  s.kind = WeightKind::oscillating;
  s.base = std::make_shared<const WeightSpec>(std::move(base));
  s.p = p;
  s.K = K;
  s.n_max = n_max;
  s.validate();
  return s;
}

WeightSpec WeightSpec::sum(std::vector<WeightSpec> terms) {
  WeightSpec s;
  s.kind = WeightKind::sum;
  s.terms = std::move(terms);
  s.validate();
  return s;
}

WeightSpec WeightSpec::tilde(WeightSpec base) {
  WeightSpec s;
  s.kind = WeightKind::tilde;
  s.base = std::make_shared<const WeightSpec>(std::move(base));
  s.validate();
  return s;
}

void WeightSpec::validate() const {
  switch (kind) {
    case WeightKind::constant: break;
    case WeightKind::standard:
      if (!(beta > -1.0) || !std::isfinite(beta)) throw DomainError("standard weight needs beta > -1");
      break;
    case WeightKind::exponential:
      if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("exponential weight needs c > 0");
      break;
    case WeightKind::piecewise_step: {
      if (knots.empty() || knots.size() != levels.size())
        throw DomainError("piecewise_step needs equally many knots and levels (at least one)");
      for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!(knots[i] >= 0.0 && knots[i] < 1.0)) throw DomainError("piecewise_step knots must lie in [0,1)");
        if (i > 0 && !(knots[i] > knots[i - 1]))
          throw DomainError("piecewise_step knots must be strictly increasing");
        if (!(levels[i] >= 0.0) || !std::isfinite(levels[i]))
          throw DomainError("piecewise_step levels must be finite and nonnegative");
      }
      if (!(levels.back() > 0.0))
        throw DomainError("piecewise_step: last level must be positive so the tail stays positive");
      break;
    }
    case WeightKind::oscillating:
      if (!base) throw DomainError("oscillating weight needs a base");
      base->validate();
      if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("oscillating weight needs p > 1");
      if (!(K == 0.0 || K > 1.0) || !std::isfinite(K))
        throw DomainError("oscillating weight needs K > 1 (or 0 for the default)");
      if (n_max < 0) throw DomainError("oscillating weight needs n_max >= 0");
      break;
    case WeightKind::sum:
      if (terms.empty()) throw DomainError("sum weight needs at least one term");
      for (const auto& t : terms) t.validate();
      break;
    case WeightKind::tilde:
      if (!base) throw DomainError("tilde weight needs a base");
      base->validate();
      break;
  }
}

std::string WeightSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case WeightKind::constant: os << "constant"; break;
    case WeightKind::standard: os << "standard(beta=" << beta << ")"; break;
    case WeightKind::exponential: os << "exponential(c=" << c << ")"; break;
    case WeightKind::piecewise_step: os << "piecewise_step(" << knots.size() << " steps)"; break;
    case WeightKind::oscillating:
      os << "oscillating(" << base->label() << ", p=" << p << ", K=" << K << ", n_max=" << n_max << ")";
      break;
    case WeightKind::sum: {
      os << "sum(";
      for (std::size_t i = 0; i < terms.size(); ++i) os << (i ? "+" : "") << terms[i].label();
      os << ")";
      break;
    }
    case WeightKind::tilde: os << "tilde(" << base->label() << ")"; break;
  }
  return os.str();
}

bool operator==(const WeightSpec& a, const WeightSpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case WeightKind::constant: return true;
    case WeightKind::standard: return a.beta == b.beta;
    case WeightKind::exponential: return a.c == b.c;
    case WeightKind::piecewise_step: return a.knots == b.knots && a.levels == b.levels;
    case WeightKind::oscillating:
      return *a.base == *b.base && a.p == b.p && a.K == b.K && a.n_max == b.n_max;
    case WeightKind::sum: return a.terms == b.terms;
    case WeightKind::tilde: return *a.base == *b.base;
  }
  return false;
}

void to_json(nlohmann::json& j, const WeightSpec& s) {
  j = nlohmann::json::object();
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case WeightKind::constant: break;
    case WeightKind::standard: j["beta"] = s.beta; break;
    case WeightKind::exponential: j["c"] = s.c; break;
    case WeightKind::piecewise_step:
      j["knots"] = s.knots;
      j["levels"] = s.levels;
      break;
    case WeightKind::oscillating:
      j["base"] = *s.base;
      j["p"] = s.p;
      j["K"] = s.K;
      j["n_max"] = s.n_max;
      break;
    case WeightKind::sum: j["terms"] = s.terms; break;
    case WeightKind::tilde: j["base"] = *s.base; break;
  }
}

namespace {
double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("weight spec: missing field '") + key + "'");
  if (!j.at(key).is_number()) throw DomainError(std::string("weight spec: field '") + key + "' must be a number");
  return j.at(key).get<double>();
}
}  // namespace

void from_json(const nlohmann::json& j, WeightSpec& s) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw DomainError("weight spec: expected an object with a string 'kind'");
  s = WeightSpec{};
  s.kind = weight_kind_from_string(j.at("kind").get<std::string>());
  switch (s.kind) {
    case WeightKind::constant: break;
    case WeightKind::standard: s.beta = number_field(j, "beta"); break;
    case WeightKind::exponential: s.c = number_field(j, "c"); break;
    case WeightKind::piecewise_step:
      s.knots = j.at("knots").get<std::vector<double>>();
      s.levels = j.at("levels").get<std::vector<double>>();
      break;
    case WeightKind::oscillating:
      s.base = std::make_shared<const WeightSpec>(j.at("base").get<WeightSpec>());
      s.p = number_field(j, "p");
      if (j.contains("K") && !j.at("K").is_null()) s.K = number_field(j, "K");
      if (j.contains("n_max")) s.n_max = j.at("n_max").get<int>();
      break;
    case WeightKind::sum: s.terms = j.at("terms").get<std::vector<WeightSpec>>(); break;
    case WeightKind::tilde:
      s.base = std::make_shared<const WeightSpec>(j.at("base").get<WeightSpec>());
      break;
  }
  s.validate();
}

}  // namespace weightlab
