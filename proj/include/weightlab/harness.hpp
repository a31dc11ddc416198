#pragma once

#include "weightlab/conditions.hpp"
#include "weightlab/families.hpp"
#include "weightlab/norms.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace weightlab {

enum class SpaceId { Hp, HLp, Dpp1, HInftyP };

std::string to_string(SpaceId s);
SpaceId space_from_string(const std::string& name);
/// Norm of a polynomial in the space with exponent p.
double space_norm(SpaceId s, const CoefficientSeries& f, double p, const NormParams& params = {});

enum class ProbeOutcome { Pass, Fail, Inconclusive };

std::string to_string(ProbeOutcome o);

/// Outcome of one experiment. `parameters` holds every threshold the
/// decision uses and `measurements` every number it reads, so
/// recompute_outcome() rebuilds `outcome` from the stored record alone.
struct ProbeResult {
  std::string name;
  std::optional<WeightSpec> weight;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json measurements = nlohmann::json::object();
  ProbeOutcome outcome = ProbeOutcome::Inconclusive;
  std::string note;
  double runtime_seconds = 0.0;

  bool pass() const { return outcome == ProbeOutcome::Pass; }
};

/// Runtime is left out unless asked for, so reports are reproducible byte for byte.
nlohmann::json to_json(const ProbeResult& r, bool include_runtime = false);
ProbeOutcome recompute_outcome(const ProbeResult& r);
/// One row per probe: name,weight,p,outcome,note (p empty when the probe has none)
std::string summary_csv(const std::vector<ProbeResult>& results);

// ---- probes

struct BoundednessOptions {
  /// Family template; M is replaced by each size (and must stay >= N).
  FamilySpec family;
  std::vector<int> sizes{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  int out_factor = 4;            // H f is truncated at out_factor * size coefficients
  double slope_threshold = 0.05;  // growth of ln(ratio) per doubling of the size
  ConditionParams conditions;
};

/// ||H f||_Y / ||f||_X over a geometric family-size sweep. The prediction is
/// the verdict of K_{p,c} (p > 1) or M_{1,d} (p = 1); the probe passes when
/// the ratios are stable under a finite prediction and grow under a divergent one.
ProbeResult boundedness_probe(const RadialWeight& w, double p, SpaceId X, SpaceId Y,
                              const BoundednessOptions& opt = {});

struct EquivalenceOptions {
  ConditionParams conditions;
  double band_lo = 0.1;  // M_p / K_{p,c}
  double band_hi = 10.0;
  double band1_lo = 0.05;  // pairwise K_{1,c}, K_{1,d}, M_1
  double band1_hi = 20.0;
};

/// p > 1: verdicts of K_{p,c}, K_{p,d}, K_{p,e} (and M_p when its doubling
/// premise holds) agree, and M_p / K_{p,c} lies in the band when all are finite.
/// p = 1: sups of K_{1,c}, K_{1,d}, M_1 are pairwise within the band, or all diverge.
ProbeResult equivalence_probe(const RadialWeight& w, double p, const EquivalenceOptions& opt = {});

struct NoncompactnessOptions {
  std::vector<double> a_list{1 - 0x1p-3, 1 - 0x1p-4, 1 - 0x1p-5, 1 - 0x1p-6,
                             1 - 0x1p-7, 1 - 0x1p-8, 1 - 0x1p-9, 1 - 0x1p-10};
  int k_min = 4;
  int k_max = 64;
  int bloch_terms = 4096;  // H(z^k) truncation
  double floor = 0.05;
};

/// inf over a of ||H f_a||_{HL(p)} / ||f_a||_{HL(p)} and inf over k of the
/// Bloch norm of H(z^k); passes when both stay above the floor.
ProbeResult noncompactness_probe(const RadialWeight& w, double p, const NoncompactnessOptions& opt = {});

/// Finite evidence at exponent q must carry over to p > q. Conditions used:
/// K_{p,c} variant M for exponents > 1, M_{1,d} for exponent 1.
ProbeResult monotonicity_probe(const RadialWeight& w, double q, double p, const ConditionParams& cp = {});

struct TildeHatOptions {
  int grid_depth = 80;
  double eps_slope = 0.05;  // drift of ln(band edges) per decade of 1/(1-r)
};

/// hat(tilde w)(r) / hat(w)(r) on the radius grid. Pass means the ratio stays
/// in a stable band; a ratio drifting to 0 or infinity fails.
ProbeResult tilde_hat_probe(const RadialWeight& w, const TildeHatOptions& opt = {});

/// Expected verdicts; unset entries are measured and recorded only.
struct Classification {
  std::optional<Verdict> dhat;        // dhat_profile
  std::optional<Verdict> dcheck;      // dcheck_profile
  std::optional<Verdict> bounded;     // K_{p,c} variant M (p > 1) or M_{1,d} (p = 1)
  std::optional<Verdict> small;       // mp_small
};

/// Measures the class and condition verdicts of w at exponent p and compares
/// them with `expected`.
ProbeResult classification_probe(const RadialWeight& w, double p, const Classification& expected,
                                  const ConditionParams& cp = {});

/// H(inf,p) <= C X-norm for X in {HL(p), H^p, D^p_{p-1}} on seeded random
/// nonnegative polynomials; reports the measured C per p and passes when all are below c_max.
struct EmbeddingOptions {
  int count = 200;
  int max_degree = 128;
  std::vector<double> ps{1.0, 2.0, 3.0};
  double c_max = 10.0;
};
ProbeResult embedding_probe(std::uint64_t seed, const EmbeddingOptions& opt = {});

/// apply_series against apply_quadrature on seeded random polynomials.
struct TwoPathOptions {
  int count = 50;
  int max_degree = 64;
  int n_out = 16;
  double tolerance = 1e-7;
};
ProbeResult two_path_probe(const RadialWeight& w, std::uint64_t seed, const TwoPathOptions& opt = {});

// ---- catalogue and suite

struct CatalogueEntry {
  std::string name;
  WeightSpec spec;
  Classification at_p2;  // expected at p = 2
  Classification at_p1;  // expected at p = 1
};

/// Built-in weights with their expected classification: the constant weight,
/// standard beta in {0.5, 1, 2}, exponential c = 1, and the oscillating weight
/// built from beta = 1 with p = 2 and n_max = 48.
std::vector<CatalogueEntry> catalogue();

struct SuiteOptions {
  std::uint64_t seed = 42;
  ConditionParams conditions;
};

/// Probe results with the outcome the catalogue classification predicts for each.
struct SuiteReport {
  std::uint64_t seed = 42;
  std::vector<ProbeResult> probes;
  std::vector<ProbeOutcome> expected;

  /// Every probe outcome equals its expected outcome.
  bool all_agree() const;
};

nlohmann::json to_json(const SuiteReport& r, bool include_runtime = false);

/// Every probe over the catalogue, in a fixed order.
SuiteReport run_suite(const SuiteOptions& opt = {});

}  // namespace weightlab
