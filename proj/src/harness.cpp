#include "weightlab/harness.hpp"

#include "weightlab/errors.hpp"
#include "weightlab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace weightlab {

namespace {

using json = nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double num_or_nan(const json& j) { return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN(); }

Verdict verdict_from_string(const std::string& s) {
  for (auto v : {Verdict::FiniteEvidence, Verdict::DivergenceEvidence, Verdict::Inconclusive}) {
    if (to_string(v) == s) return v;
  }
  throw DomainError("unknown verdict '" + s + "'");
}

template <class Body>
ProbeResult timed(Body&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  ProbeResult r = body();
  r.outcome = recompute_outcome(r);
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// Least-squares slope of y on x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  return d == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / d;
}

// Growth of ln(ratio) per doubling, fitted on the upper half of the usable rows.
double doubling_slope(const json& sizes, const json& ratios) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double r = num_or_nan(ratios[i]);
    if (std::isfinite(r) && r > 0.0) {
      x.push_back(std::log2(sizes[i].get<double>()));
      y.push_back(std::log(r));
    }
  }
  if (x.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t from = std::min(x.size() / 2, x.size() - 3);
  return slope({x.begin() + static_cast<long>(from), x.end()}, {y.begin() + static_cast<long>(from), y.end()});
}

Verdict bounded_condition(const RadialWeight& w, double p, ConditionParams cp, std::string* which = nullptr) {
  cp.p = p;
  if (p > 1.0) {
    if (which) *which = "Kpc_M";
    return Kpc_continuous(w, cp, KpcVariant::M).verdict;
  }
  if (which) *which = "M1d";
  return K1_family(w, cp, K1Variant::M1d).verdict;
}

ProbeOutcome decide_boundedness(const ProbeResult& r) {
  const auto pred = verdict_from_string(r.measurements.at("prediction"));
  if (pred == Verdict::Inconclusive) return ProbeOutcome::Inconclusive;
  const double s = doubling_slope(r.parameters.at("sizes"), r.measurements.at("ratios"));
  if (!std::isfinite(s)) return ProbeOutcome::Inconclusive;
  const bool grows = s > r.parameters.at("slope_threshold").get<double>();
  return grows == (pred == Verdict::DivergenceEvidence) ? ProbeOutcome::Pass : ProbeOutcome::Fail;
}

ProbeOutcome decide_equivalence(const ProbeResult& r) {
  const auto& conds = r.measurements.at("conditions");
  const auto& applicable = r.measurements.at("applicable");
  std::vector<Verdict> v;
  for (const auto& name : applicable) v.push_back(verdict_from_string(conds.at(name.get<std::string>()).at("verdict")));
  if (v.empty() || std::count(v.begin(), v.end(), Verdict::Inconclusive) > 0) return ProbeOutcome::Inconclusive;
  const double p = r.parameters.at("p").get<double>();
  const bool all_finite = std::all_of(v.begin(), v.end(), [](Verdict x) { return x == Verdict::FiniteEvidence; });
  const bool all_div = std::all_of(v.begin(), v.end(), [](Verdict x) { return x == Verdict::DivergenceEvidence; });
  auto sup = [&](const char* name) { return num_or_nan(conds.at(name).at("sup")); };
  if (p > 1.0) {
    if (!all_finite && !all_div) return ProbeOutcome::Fail;
    if (all_finite && conds.contains("Mp") &&
        std::find(applicable.begin(), applicable.end(), "Mp") != applicable.end()) {
      const double ratio = sup("Mp") / sup("Kpc_K");
      if (!(ratio >= r.parameters.at("band_lo").get<double>() && ratio <= r.parameters.at("band_hi").get<double>())) {
        return ProbeOutcome::Fail;
      }
    }
    return ProbeOutcome::Pass;
  }
  if (all_div) return ProbeOutcome::Pass;
  const double lo = r.parameters.at("band_lo").get<double>(), hi = r.parameters.at("band_hi").get<double>();
  const char* names[] = {"K1c", "K1d", "M1"};
  for (const char* a : names) {
    for (const char* b : names) {
      const double q = sup(a) / sup(b);
      if (!(q >= lo && q <= hi)) return ProbeOutcome::Fail;
    }
  }
  return ProbeOutcome::Pass;
}

double min_of(const json& values) {
  double m = kInf;
  bool any = false;
  for (const auto& v : values) {
    const double x = num_or_nan(v);
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    m = std::min(m, x);
    any = true;
  }
  return any ? m : std::numeric_limits<double>::quiet_NaN();
}

ProbeOutcome decide_noncompactness(const ProbeResult& r) {
  const double fl = r.parameters.at("floor").get<double>();
  const double a = min_of(r.measurements.at("fa_ratio"));
  const double b = min_of(r.measurements.at("bloch"));
  if (std::isnan(a) || std::isnan(b)) return ProbeOutcome::Inconclusive;
  return a >= fl && b >= fl ? ProbeOutcome::Pass : ProbeOutcome::Fail;
}

ProbeOutcome decide_monotonicity(const ProbeResult& r) {
  const auto vq = verdict_from_string(r.measurements.at("q_verdict"));
  const auto vp = verdict_from_string(r.measurements.at("p_verdict"));
  if (vq == Verdict::Inconclusive || vp == Verdict::Inconclusive) return ProbeOutcome::Inconclusive;
  return vq == Verdict::FiniteEvidence && vp == Verdict::DivergenceEvidence ? ProbeOutcome::Fail : ProbeOutcome::Pass;
}

// sup and inf of v over the trailing window of width one quarter of the x range.
std::pair<std::vector<double>, std::vector<double>> trailing_envelopes(const std::vector<double>& x,
                                                                       const std::vector<double>& v) {
  const auto [x_lo, x_hi] = std::minmax_element(x.begin(), x.end());
  const double width = 0.25 * (*x_hi - *x_lo);
  std::vector<double> hi(v.size()), lo(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    hi[i] = lo[i] = v[i];
    for (std::size_t j = i; j-- > 0 && x[j] >= x[i] - width;) {
      hi[i] = std::max(hi[i], v[j]);
      lo[i] = std::min(lo[i], v[j]);
    }
  }
  return {hi, lo};
}

// Largest |trend| of the two envelopes: a stable band has both flat.
double band_drift(const std::vector<double>& x, const std::vector<double>& v) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto [hi, lo] = trailing_envelopes(x, v);
  const double a = tail_trend(x, hi), b = tail_trend(x, lo);
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  return std::max(std::abs(a), std::abs(b));
}

ProbeOutcome decide_tilde_hat(const ProbeResult& r) {
  std::vector<double> x, y;
  const auto& gaps = r.measurements.at("gaps");
  const auto& ratios = r.measurements.at("ratios");
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double v = num_or_nan(ratios[i]);
    if (!(v > 0.0) || !std::isfinite(v)) return ProbeOutcome::Fail;
    x.push_back(-std::log10(gaps[i].get<double>()));
    y.push_back(v);
  }
  const double t = band_drift(x, y);
  if (std::isnan(t)) return ProbeOutcome::Inconclusive;
  return t <= r.parameters.at("eps_slope").get<double>() ? ProbeOutcome::Pass : ProbeOutcome::Fail;
}

ProbeOutcome decide_classification(const ProbeResult& r) {
  const auto& expected = r.parameters.at("expected");
  bool inconclusive = false;
  for (const auto& [key, want] : expected.items()) {
    const auto got = verdict_from_string(r.measurements.at(key).at("verdict"));
    if (got == verdict_from_string(want)) continue;
    if (got == Verdict::Inconclusive) {
      inconclusive = true;
    } else {
      return ProbeOutcome::Fail;
    }
  }
  return inconclusive ? ProbeOutcome::Inconclusive : ProbeOutcome::Pass;
}

ProbeOutcome decide_embedding(const ProbeResult& r) {
  const double c_max = r.parameters.at("c_max").get<double>();
  for (const auto& row : r.measurements.at("constants")) {
    for (const char* k : {"HL", "Hp", "D"}) {
      if (!(num_or_nan(row.at(k)) <= c_max)) return ProbeOutcome::Fail;
    }
  }
  return ProbeOutcome::Pass;
}

ProbeOutcome decide_two_path(const ProbeResult& r) {
  const double d = num_or_nan(r.measurements.at("max_discrepancy"));
  return d < r.parameters.at("tolerance").get<double>() ? ProbeOutcome::Pass : ProbeOutcome::Fail;
}

json condition_summary(const ConditionReport& c) {
  return {{"verdict", to_string(c.verdict)}, {"sup", num(c.running_sup)}, {"trend", num(c.trend)}, {"note", c.note}};
}

CoefficientSeries random_poly(std::mt19937_64& rng, int max_degree, bool nonneg) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_real_distribution<double> u(nonneg ? 0.0 : -1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(deg(rng)) + 1);
  for (auto& v : c) v = u(rng);
  return CoefficientSeries(c);
}

}  // namespace

std::string to_string(SpaceId s) {
  switch (s) {
    case SpaceId::Hp: return "Hp";
    case SpaceId::HLp: return "HLp";
    case SpaceId::Dpp1: return "Dpp1";
    case SpaceId::HInftyP: return "HInftyP";
  }
  return "unknown";
}

SpaceId space_from_string(const std::string& name) {
  for (auto s : {SpaceId::Hp, SpaceId::HLp, SpaceId::Dpp1, SpaceId::HInftyP}) {
    if (to_string(s) == name) return s;
  }
  throw DomainError("unknown space '" + name + "' (expected Hp, HLp, Dpp1 or HInftyP)");
}

double space_norm(SpaceId s, const CoefficientSeries& f, double p, const NormParams& params) {
  switch (s) {
    case SpaceId::Hp: return hp_norm(f, p, params);
    case SpaceId::HLp: return hl_norm(f, p);
    case SpaceId::Dpp1: return dirichlet_norm(f, p, params);
    case SpaceId::HInftyP: return hinftyp_norm(f, p, params);
  }
  throw DomainError("unknown space");
}

std::string to_string(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::Pass: return "pass";
    case ProbeOutcome::Fail: return "fail";
    case ProbeOutcome::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

json to_json(const ProbeResult& r, bool include_runtime) {
  json j = {{"probe", r.name},
            {"parameters", r.parameters},
            {"measurements", r.measurements},
            {"outcome", to_string(r.outcome)},
            {"pass", r.pass()},
            {"note", r.note}};
  j["weight"] = r.weight ? json(*r.weight) : json(nullptr);
  if (include_runtime) j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

ProbeOutcome recompute_outcome(const ProbeResult& r) {
  if (r.name == "boundedness") return decide_boundedness(r);
  if (r.name == "equivalence") return decide_equivalence(r);
  if (r.name == "noncompactness") return decide_noncompactness(r);
  if (r.name == "monotonicity") return decide_monotonicity(r);
  if (r.name == "tilde_hat") return decide_tilde_hat(r);
  if (r.name == "classification") return decide_classification(r);
  if (r.name == "embedding") return decide_embedding(r);
  if (r.name == "two_path") return decide_two_path(r);
  throw DomainError("unknown probe '" + r.name + "'");
}

std::string summary_csv(const std::vector<ProbeResult>& results) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream os;
  os.precision(17);
  os << "name,weight,p,outcome,note\n";
  for (const auto& r : results) {
    os << r.name << ',' << quote(r.weight ? r.weight->label() : "") << ',';
    if (r.parameters.contains("p")) os << r.parameters["p"].get<double>();
    os << ',' << to_string(r.outcome) << ',' << quote(r.note) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- probes

ProbeResult boundedness_probe(const RadialWeight& w, double p, SpaceId X, SpaceId Y, const BoundednessOptions& opt) {
  if (!(p >= 1.0)) throw DomainError("boundedness_probe: p must be at least 1");
  if (opt.sizes.empty() || opt.out_factor < 1) throw DomainError("boundedness_probe: empty sweep");
  return timed([&] {
    ProbeResult r;
    r.name = "boundedness";
    r.weight = w.spec();
    FamilySpec fam = opt.family;
    if (fam.kind == FamilyKind::dual_block) fam.p = p;
    std::string which;
    const Verdict pred = bounded_condition(w, p, opt.conditions, &which);
    r.parameters = {{"p", p},         {"X", to_string(X)},           {"Y", to_string(Y)},
                    {"family", fam},  {"sizes", opt.sizes},          {"out_factor", opt.out_factor},
                    {"slope_threshold", opt.slope_threshold}, {"prediction_condition", which},
                    {"conditions", opt.conditions}};
    r.measurements["prediction"] = to_string(pred);

    const int max_size = *std::max_element(opt.sizes.begin(), opt.sizes.end());
    const int out_max = opt.out_factor * max_size;
    const auto table = moment_table(w, std::max(out_max - 1 + max_size, 2 * out_max - 1), opt.conditions.tol);
    json ratios = json::array(), errors = json::array();
    for (int size : opt.sizes) {
      try {
        FamilySpec s = fam;
        s.M = size;
        const auto f = generate(s, &w, opt.conditions.tol);
        const auto hf = apply_series(table, f, opt.out_factor * size);
        ratios.push_back(num(space_norm(Y, hf, p) / space_norm(X, f, p)));
        errors.push_back(nullptr);
      } catch (const std::exception& e) {
        ratios.push_back(nullptr);
        errors.push_back(e.what());
      }
    }
    r.measurements["ratios"] = ratios;
    r.measurements["row_errors"] = errors;
    r.measurements["doubling_slope"] = num(doubling_slope(r.parameters["sizes"], ratios));
    return r;
  });
}

ProbeResult equivalence_probe(const RadialWeight& w, double p, const EquivalenceOptions& opt) {
  if (!(p >= 1.0)) throw DomainError("equivalence_probe: p must be at least 1");
  return timed([&] {
    ProbeResult r;
    r.name = "equivalence";
    r.weight = w.spec();
    ConditionParams cp = opt.conditions;
    cp.p = p;
    json conds = json::object(), applicable = json::array();
    if (p > 1.0) {
      r.parameters = {{"p", p}, {"band_lo", opt.band_lo}, {"band_hi", opt.band_hi}, {"conditions", cp}};
      const auto mp = Mp_discrete(w, cp);
      conds["Mp"] = condition_summary(mp);
      conds["Kpc_K"] = condition_summary(Kpc_continuous(w, cp, KpcVariant::K));
      conds["Kpd"] = condition_summary(Kpd(w, cp));
      conds["Kpe"] = condition_summary(Kpe(w, cp));
      applicable = {"Kpc_K", "Kpd", "Kpe"};
      if (mp.verdict != Verdict::Inconclusive) {
        applicable.push_back("Mp");
      } else {
        r.note = "M_p left out: " + mp.note;
      }
      r.measurements["Mp_over_Kpc"] = num(mp.running_sup / conds["Kpc_K"]["sup"].get<double>());
    } else {
      r.parameters = {{"p", p}, {"band_lo", opt.band1_lo}, {"band_hi", opt.band1_hi}, {"conditions", cp}};
      conds["K1c"] = condition_summary(K1_family(w, cp, K1Variant::K1c));
      conds["K1d"] = condition_summary(K1_family(w, cp, K1Variant::K1d));
      conds["M1"] = condition_summary(K1_family(w, cp, K1Variant::M1));
      applicable = {"K1c", "K1d", "M1"};
    }
    r.measurements["conditions"] = conds;
    r.measurements["applicable"] = applicable;
    return r;
  });
}

ProbeResult noncompactness_probe(const RadialWeight& w, double p, const NoncompactnessOptions& opt) {
  if (!(p >= 1.0)) throw DomainError("noncompactness_probe: p must be at least 1");
  if (opt.k_min < 0 || opt.k_max < opt.k_min || opt.bloch_terms < 1) {
    throw DomainError("noncompactness_probe: bad k range");
  }
  for (double a : opt.a_list) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("noncompactness_probe: a must lie in (0, 1)");
  }
  return timed([&] {
    ProbeResult r;
    r.name = "noncompactness";
    r.weight = w.spec();
    r.parameters = {{"p", p},         {"a_list", opt.a_list}, {"k_min", opt.k_min}, {"k_max", opt.k_max},
                    {"bloch_terms", opt.bloch_terms}, {"floor", opt.floor}};
    std::vector<CoefficientSeries> fa;
    int max_deg = 0;
    for (double a : opt.a_list) {
      fa.push_back(cone_fa(a, p));
      max_deg = std::max(max_deg, fa.back().degree());
    }
    const int n_out_fa = max_deg + 1;
    const int need = std::max({2 * n_out_fa - 1 + 1, 2 * opt.bloch_terms - 1, opt.bloch_terms - 1 + opt.k_max});
    const auto table = moment_table(w, need);
    json ratios = json::array();
    for (const auto& f : fa) {
      const auto hf = apply_series(table, f, static_cast<int>(f.size()));
      ratios.push_back(num(hl_norm(hf, p) / hl_norm(f, p)));
    }
    json ks = json::array(), bloch = json::array();
    std::vector<double> b(static_cast<std::size_t>(opt.k_max - opt.k_min + 1));
    parallel_for(b.size(), [&](std::size_t i) {
      const int k = opt.k_min + static_cast<int>(i);
      b[i] = bloch_norm(apply_series(table, CoefficientSeries::monomial(k), opt.bloch_terms));
    });
    for (std::size_t i = 0; i < b.size(); ++i) {
      ks.push_back(opt.k_min + static_cast<int>(i));
      bloch.push_back(num(b[i]));
    }
    r.measurements = {{"fa_ratio", ratios}, {"k", ks}, {"bloch", bloch},
                      {"fa_inf", num(min_of(ratios))}, {"bloch_inf", num(min_of(bloch))}};
    return r;
  });
}

ProbeResult monotonicity_probe(const RadialWeight& w, double q, double p, const ConditionParams& cp) {
  if (!(q >= 1.0 && q < p)) throw DomainError("monotonicity_probe: needs 1 <= q < p");
  return timed([&] {
    ProbeResult r;
    r.name = "monotonicity";
    r.weight = w.spec();
    std::string cq, cpn;
    const Verdict vq = bounded_condition(w, q, cp, &cq);
    const Verdict vp = bounded_condition(w, p, cp, &cpn);
    r.parameters = {{"q", q}, {"p", p}, {"q_condition", cq}, {"p_condition", cpn}, {"conditions", cp}};
    r.measurements = {{"q_verdict", to_string(vq)}, {"p_verdict", to_string(vp)},
                      {"constraint_checked", vq == Verdict::FiniteEvidence}};
    if (vq == Verdict::DivergenceEvidence) r.note = "q condition diverges: no constraint on p";
    return r;
  });
}

ProbeResult tilde_hat_probe(const RadialWeight& w, const TildeHatOptions& opt) {
  return timed([&] {
    ProbeResult r;
    r.name = "tilde_hat";
    r.weight = w.spec();
    r.parameters = {{"grid_depth", opt.grid_depth}, {"eps_slope", opt.eps_slope}};
    const RadialWeight t = tilde_transform(w);
    const auto gaps = radius_grid_gaps(opt.grid_depth);
    std::vector<double> ratio(gaps.size());
    parallel_for(gaps.size(), [&](std::size_t i) {
      ratio[i] = std::exp(t.log_tail_at_gap(gaps[i]) - w.log_tail_at_gap(gaps[i]));
    });
    json rs = json::array();
    double lo = kInf, hi = 0.0;
    for (double v : ratio) {
      rs.push_back(num(v));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    std::vector<double> x;
    for (double g : gaps) x.push_back(-std::log10(g));
    r.measurements = {{"gaps", gaps}, {"ratios", rs}, {"band", {num(lo), num(hi)}}, {"drift", num(band_drift(x, ratio))}};
    return r;
  });
}

ProbeResult classification_probe(const RadialWeight& w, double p, const Classification& expected,
                                  const ConditionParams& cp_in) {
  if (!(p >= 1.0)) throw DomainError("classification_probe: p must be at least 1");
  return timed([&] {
    ProbeResult r;
    r.name = "classification";
    r.weight = w.spec();
    ConditionParams cp = cp_in;
    cp.p = p;
    constexpr double kDcheckK = 2.0;
    json exp = json::object();
    if (expected.dhat) exp["dhat"] = to_string(*expected.dhat);
    if (expected.dcheck) exp["dcheck"] = to_string(*expected.dcheck);
    if (expected.bounded) exp["bounded"] = to_string(*expected.bounded);
    if (expected.small) exp["small"] = to_string(*expected.small);
    r.parameters = {{"p", p}, {"dcheck_K", kDcheckK}, {"expected", exp}, {"conditions", cp}};
    r.measurements["dhat"] = condition_summary(dhat_profile(w, cp));
    r.measurements["dcheck"] = condition_summary(dcheck_profile(w, kDcheckK, cp));
    r.measurements["bounded"] = condition_summary(
        p > 1.0 ? Kpc_continuous(w, cp, KpcVariant::M) : K1_family(w, cp, K1Variant::M1d));
    r.measurements["small"] = condition_summary(mp_small(w, cp));
    return r;
  });
}

ProbeResult embedding_probe(std::uint64_t seed, const EmbeddingOptions& opt) {
  return timed([&] {
    ProbeResult r;
    r.name = "embedding";
    r.parameters = {{"seed", seed}, {"count", opt.count}, {"max_degree", opt.max_degree}, {"ps", opt.ps}, {"c_max", opt.c_max}};
    std::mt19937_64 rng(seed);
    std::vector<CoefficientSeries> polys;
    for (int i = 0; i < opt.count; ++i) polys.push_back(random_poly(rng, opt.max_degree, true));
    json rows = json::array();
    for (double p : opt.ps) {
      std::vector<std::array<double, 3>> c(polys.size());
      parallel_for(polys.size(), [&](std::size_t i) {
        const auto& f = polys[i];
        const double h = hinftyp_norm(f, p);
        c[i] = {h / hl_norm(f, p), h / hp_norm(f, p), h / dirichlet_norm(f, p)};
      });
      std::array<double, 3> m{0, 0, 0};
      for (const auto& v : c) {
        for (int k = 0; k < 3; ++k) m[k] = std::max(m[k], v[k]);
      }
      rows.push_back({{"p", p}, {"HL", num(m[0])}, {"Hp", num(m[1])}, {"D", num(m[2])}});
    }
    r.measurements["constants"] = rows;
    return r;
  });
}

ProbeResult two_path_probe(const RadialWeight& w, std::uint64_t seed, const TwoPathOptions& opt) {
  return timed([&] {
    ProbeResult r;
    r.name = "two_path";
    r.weight = w.spec();
    r.parameters = {{"seed", seed}, {"count", opt.count}, {"max_degree", opt.max_degree},
                    {"n_out", opt.n_out}, {"tolerance", opt.tolerance}};
    std::mt19937_64 rng(seed);
    const auto table = moment_table(w, std::max(opt.n_out - 1 + opt.max_degree, 2 * opt.n_out - 1));
    double worst = 0.0;
    for (int i = 0; i < opt.count; ++i) {
      const auto f = random_poly(rng, opt.max_degree, false);
      const auto a = apply_series(table, f, opt.n_out);
      const auto b = apply_quadrature(w, [&](double t) { return f.evaluate(t); }, opt.n_out);
      for (int n = 0; n < opt.n_out; ++n) worst = std::max(worst, std::abs(a[n] - b[n]));
    }
    r.measurements["max_discrepancy"] = num(worst);
    return r;
  });
}

// ---------------------------------------------------------------- suite

std::vector<CatalogueEntry> catalogue() {
  constexpr auto F = Verdict::FiniteEvidence;
  constexpr auto D = Verdict::DivergenceEvidence;
  std::vector<CatalogueEntry> c;
  c.push_back({"constant", WeightSpec::constant(), {F, F, F, {}}, {F, F, D, {}}});
  for (double beta : {0.5, 1.0, 2.0}) {
    c.push_back({"standard", WeightSpec::standard(beta), {F, F, F, {}}, {F, F, F, {}}});
  }
  c.push_back({"exponential", WeightSpec::exponential(1.0), {D, {}, F, {}}, {D, {}, {}, {}}});
  c.push_back({"oscillating", WeightSpec::oscillating(WeightSpec::standard(1.0), 2.0, 0.0, 48), {F, F, F, D}, {F, F, {}, {}}});
  return c;
}

bool SuiteReport::all_agree() const {
  if (probes.size() != expected.size()) return false;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (probes[i].outcome != expected[i]) return false;
  }
  return true;
}

json to_json(const SuiteReport& r, bool include_runtime) {
  json probes = json::array();
  for (std::size_t i = 0; i < r.probes.size(); ++i) {
    json j = to_json(r.probes[i], include_runtime);
    if (i < r.expected.size()) {
      j["expected_outcome"] = to_string(r.expected[i]);
      j["agrees"] = r.probes[i].outcome == r.expected[i];
    }
    probes.push_back(j);
  }
  return {{"seed", r.seed}, {"all_agree", r.all_agree()}, {"probes", probes}};
}

SuiteReport run_suite(const SuiteOptions& opt) {
  SuiteReport rep;
  rep.seed = opt.seed;
  auto add = [&](ProbeResult r, ProbeOutcome expected) {
    rep.probes.push_back(std::move(r));
    rep.expected.push_back(expected);
  };
  constexpr auto Pass = ProbeOutcome::Pass;
  const ConditionParams& cp = opt.conditions;
  EquivalenceOptions eq;
  eq.conditions = cp;

  for (const auto& entry : catalogue()) {
    const RadialWeight w(entry.spec);
    const bool d_class = entry.at_p2.dhat == Verdict::FiniteEvidence;
    add(classification_probe(w, 2.0, entry.at_p2, cp), Pass);
    add(classification_probe(w, 1.0, entry.at_p1, cp), Pass);
    add(tilde_hat_probe(w), d_class ? Pass : ProbeOutcome::Fail);
    add(equivalence_probe(w, 2.0, eq), Pass);
    add(equivalence_probe(w, 1.0, eq), Pass);
    add(monotonicity_probe(w, 1.0, 2.0, cp), Pass);
  }

  const RadialWeight one(WeightSpec::constant());
  const RadialWeight b1(WeightSpec::standard(1.0));
  BoundednessOptions dual;
  dual.family.kind = FamilyKind::dual_block;
  dual.conditions = cp;
  add(boundedness_probe(one, 2.0, SpaceId::HLp, SpaceId::HLp, dual), Pass);
  BoundednessOptions block;
  block.conditions = cp;
  add(boundedness_probe(one, 1.0, SpaceId::HLp, SpaceId::HLp, block), Pass);
  add(boundedness_probe(b1, 1.0, SpaceId::HLp, SpaceId::HLp, block), Pass);

  add(noncompactness_probe(one, 2.0), Pass);
  add(noncompactness_probe(b1, 2.0), Pass);

  add(embedding_probe(opt.seed), Pass);
  for (const auto& spec : {WeightSpec::constant(), WeightSpec::standard(1.0), WeightSpec::exponential(1.0)}) {
    add(two_path_probe(RadialWeight(spec), opt.seed), Pass);
  }
  return rep;
}

}  // namespace weightlab
