#include "weightlab/conditions.hpp"

#include "special_functions.hpp"
#include "weightlab/errors.hpp"
#include "weightlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace weightlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
using detail::log_add_exp;
}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::FiniteEvidence: return "FiniteEvidence";
    case Verdict::DivergenceEvidence: return "DivergenceEvidence";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

double ConditionParams::p_conj() const {
  if (!(p > 1.0)) throw DomainError("conjugate exponent needs p > 1");
  return p / (p - 1.0);
}

void ConditionParams::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("conditions need p >= 1");
  if (grid_depth < 4) throw DomainError("grid depth must be at least 4");
  if (N_max < 16) throw DomainError("N_max must be at least 16");
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("tol must lie in (0, 1)");
  if (!(m_floor > 1.0)) throw DomainError("m_floor must exceed 1");
  for (double g : extra_gaps) {
    if (!(g > 0.0 && g < 1.0)) throw DomainError("extra grid gaps must lie in (0, 1)");
  }
}

void to_json(nlohmann::json& j, const ConditionParams& p) {
  j = {{"p", p.p},         {"grid_depth", p.grid_depth}, {"N_max", p.N_max},
       {"tol", p.tol},     {"eps_slope", p.eps_slope},   {"c_min", p.c_min},
       {"m_floor", p.m_floor}};
  if (!p.extra_gaps.empty()) j["extra_gaps"] = p.extra_gaps;
}

std::vector<double> radius_grid_gaps(int depth) {
  std::vector<double> g(static_cast<std::size_t>(depth) + 1);
  for (int j = 0; j <= depth; ++j) g[j] = std::exp2(-j / 4.0);
  return g;
}

std::vector<double> ConditionReport::running_sup_series() const {
  std::vector<double> out(values.size());
  double s = -kInf;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isnan(values[i])) s = std::max(s, values[i]);
    out[i] = s;
  }
  return out;
}

namespace {
nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}
}  // namespace

void to_json(nlohmann::json& j, const ConditionReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    nlohmann::json s = {{r.param_name, r.params[i]}, {"value", number_or_null(r.values[i])}};
    if (!r.gaps.empty()) s["gap"] = r.gaps[i];
    samples.push_back(std::move(s));
  }
  j = {{"name", r.name},
       {"weight", r.weight},
       {"parameters", r.parameters},
       {"samples", std::move(samples)},
       {"running_sup", number_or_null(r.running_sup)},
       {"running_inf", number_or_null(r.running_inf)},
       {"verdict", to_string(r.verdict)},
       {"trend", number_or_null(r.trend)},
       {"note", r.note}};
}

std::string to_csv(const ConditionReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "param,value,running_sup\n";
  const auto sup = r.running_sup_series();
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    os << r.params[i] << ',' << r.values[i] << ',' << sup[i] << '\n';
  }
  return os.str();
}

double tail_trend(const std::vector<double>& x, const std::vector<double>& values) {
  double x_lo = kInf, x_hi = -kInf;
  for (double v : x) {
    x_lo = std::min(x_lo, v);
    x_hi = std::max(x_hi, v);
  }
  const double cut = x_hi - 0.25 * (x_hi - x_lo);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < cut || !(values[i] > 0.0) || !std::isfinite(values[i])) continue;
    const double y = std::log(values[i]);
    sx += x[i];
    sy += y;
    sxx += x[i] * x[i];
    sxy += x[i] * y;
    ++n;
  }
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

namespace {

// Fills sup/inf/trend and the default (upper-bound) verdict.
void finish(ConditionReport& r, const std::vector<double>& growth, double eps, bool diverged) {
  r.running_sup = -kInf;
  r.running_inf = kInf;
  bool any_inf = false;
  for (double v : r.values) {
    if (std::isnan(v)) continue;
    r.running_sup = std::max(r.running_sup, v);
    r.running_inf = std::min(r.running_inf, v);
    any_inf = any_inf || v == kInf;
  }
  r.trend = tail_trend(growth, r.running_sup_series());
  if (diverged || any_inf) {
    r.verdict = Verdict::DivergenceEvidence;
  } else if (std::isnan(r.trend)) {
    r.verdict = Verdict::Inconclusive;
    if (r.note.empty()) r.note = "too few finite positive samples for a trend";
  } else {
    r.verdict = r.trend <= eps ? Verdict::FiniteEvidence : Verdict::DivergenceEvidence;
  }
}

std::vector<double> grid_for(const ConditionParams& cp) {
  cp.validate();
  auto g = radius_grid_gaps(cp.grid_depth);
  if (cp.extra_gaps.empty()) return g;
  g.insert(g.end(), cp.extra_gaps.begin(), cp.extra_gaps.end());
  std::sort(g.begin(), g.end(), std::greater<>());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

ConditionReport grid_report(const std::string& name, const RadialWeight& w, const ConditionParams& cp,
                            const std::vector<double>& gaps) {
  ConditionReport r;
  r.name = name;
  r.param_name = "r";
  r.gaps = gaps;
  r.params.resize(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) r.params[i] = 1.0 - gaps[i];
  r.weight = w.spec();
  r.parameters = cp;
  return r;
}

std::vector<double> log10_inverse(const std::vector<double>& gaps) {
  std::vector<double> x(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) x[i] = -std::log10(gaps[i]);
  return x;
}

std::vector<double> log10_index(const std::vector<double>& N) {
  std::vector<double> x(N.size());
  for (std::size_t i = 0; i < N.size(); ++i) x[i] = std::log10(N[i] + 1.0);
  return x;
}

// Integration over the gap variable of expressions in (log tail, gap).
// Intervals are split at the weight's breakpoints, where the tail has kinks.
// Plateaus much narrower than their position are integrated in the local
// offset from their upper end, since the spacing of doubles there may be
// comparable to (or larger than) the plateau itself.
using TailFn = std::function<double(double log_tail, double gap)>;

class GapCalculus {
 public:
  GapCalculus(const RadialWeight& w, double tol) : w_(w) {
    opt_.rel_tol = tol;
    const auto& segs = w.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto& s = segs[i];
      bps_.push_back(s.hi);
      if (!s.reaches_boundary() && s.width < 1e-6 * s.hi) narrow_.push_back(i);
      const double lo = s.hi - s.width;
      if (lo > 0.0) bps_.push_back(lo);
    }
    std::sort(bps_.begin(), bps_.end());
    bps_.erase(std::unique(bps_.begin(), bps_.end()), bps_.end());
  }

  double log_tail(double g) const { return w_.log_tail_at_gap(g, opt_.rel_tol); }

  // log of the integral of exp(F(log tail(g), g)) over g in [lo, hi], lo >= 0.
  double log_int(const TailFn& F, double lo, double hi) const {
    if (!(hi > lo)) return -kInf;
    const quad::Fn f = [&](double g) { return F(log_tail(g), g); };
    std::vector<double> pts = {lo};
    auto it = std::upper_bound(bps_.begin(), bps_.end(), lo);
    for (; it != bps_.end() && *it < hi; ++it) pts.push_back(*it);
    pts.push_back(hi);
    double total = -kInf;
    const auto& segs = w_.segments();
    auto inside_narrow = [&](double x, double y) {
      for (std::size_t k : narrow_) {
        if (y <= segs[k].hi && x >= segs[k].hi - segs[k].width) return true;
      }
      return false;
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (inside_narrow(pts[i], pts[i + 1])) continue;
      total = log_add_exp(total, quad::log_integrate_gap(f, pts[i], pts[i + 1], opt_));
    }
    for (std::size_t k : narrow_) {
      const WeightSegment& seg = segs[k];
      if (!(lo < seg.hi) || seg.hi - seg.width >= hi) continue;
      const double s_a = hi >= seg.hi ? 0.0 : seg.hi - hi;
      const double s_b = std::min(seg.width, seg.hi - lo);
      if (!(s_b > s_a)) continue;
      const quad::Fn local = [&](double s) {
        return F(w_.log_tail_in_segment(k, s, opt_.rel_tol), seg.hi - s);
      };
      total = log_add_exp(total, quad::log_integrate(local, s_a, s_b, opt_));
    }
    return total;
  }

  const RadialWeight& weight() const { return w_; }
  double tol() const { return opt_.rel_tol; }

 private:
  const RadialWeight& w_;
  quad::Options opt_;
  std::vector<double> bps_;
  std::vector<std::size_t> narrow_;
};

// log int_{u_j}^1 f for every grid gap u_j (descending, u_0 = 1 allowed).
std::vector<double> cumulative_from_top(const GapCalculus& gc, const TailFn& f, const std::vector<double>& gaps) {
  const std::size_t n = gaps.size();
  std::vector<double> piece(n, -kInf);
  parallel_for(n, [&](std::size_t j) {
    const double hi = j == 0 ? 1.0 : gaps[j - 1];
    piece[j] = gc.log_int(f, gaps[j], hi);
  });
  std::vector<double> out(n);
  double acc = -kInf;
  for (std::size_t j = 0; j < n; ++j) out[j] = acc = log_add_exp(acc, piece[j]);
  return out;
}

// log int_0^{u_j} f for every grid gap u_j. Throws AccuracyError (divergent)
// when the integral diverges at the boundary.
std::vector<double> cumulative_from_bottom(const GapCalculus& gc, const TailFn& f,
                                           const std::vector<double>& gaps) {
  const std::size_t n = gaps.size();
  std::vector<double> piece(n, -kInf);
  parallel_for(n, [&](std::size_t j) {
    const double lo = j + 1 < n ? gaps[j + 1] : 0.0;
    piece[j] = gc.log_int(f, lo, gaps[j]);
  });
  std::vector<double> out(n);
  double acc = -kInf;
  for (std::size_t j = n; j-- > 0;) out[j] = acc = log_add_exp(acc, piece[j]);
  return out;
}

double log1p_exp(double x) { return log_add_exp(0.0, x); }

// log Phi(s) with Phi(s) = 1 + int_s^1 1/hat(w), from a table on a grid
// extended 64 octaves below the report grid.
class PhiFunction {
 public:
  PhiFunction(const GapCalculus& gc, int depth) : gc_(gc), gaps_(radius_grid_gaps(depth + 4 * 64)) {
    inv_tail_ = [](double L, double) { return -L; };
    log_a_ = cumulative_from_top(gc_, inv_tail_, gaps_);
  }
  // log of int_s^1 1/hat(w)
  double log_inner(double s) const {
    const double last = gaps_.back();
    if (s <= last) return log_add_exp(log_a_.back(), gc_.log_int(inv_tail_, s, last));
    int k = static_cast<int>(std::floor(-4.0 * std::log2(s)));
    k = std::clamp(k, 0, static_cast<int>(gaps_.size()) - 1);
    while (k > 0 && s > gaps_[k]) --k;
    while (k + 1 < static_cast<int>(gaps_.size()) && s <= gaps_[k + 1]) ++k;
    return log_add_exp(log_a_[k], gc_.log_int(inv_tail_, s, gaps_[k]));
  }
  double log_phi(double s) const { return log1p_exp(log_inner(s)); }
  // log int_{u}^1 1/hat(w) on the first gaps of the extended table
  double log_inner_at_index(std::size_t j) const { return log_a_[j]; }

 private:
  const GapCalculus& gc_;
  std::vector<double> gaps_;
  TailFn inv_tail_;
  std::vector<double> log_a_;
};

}  // namespace

// ------------------------------------------------------------------ classes

ConditionReport dhat_profile(const RadialWeight& w, const ConditionParams& cp) {
  const auto gaps = grid_for(cp);
  ConditionReport r = grid_report("dhat_profile", w, cp, gaps);
  r.values.resize(gaps.size());
  parallel_for(gaps.size(), [&](std::size_t j) {
    r.values[j] = std::exp(w.log_tail_at_gap(gaps[j], cp.tol) - w.log_tail_at_gap(0.5 * gaps[j], cp.tol));
  });
  finish(r, log10_inverse(gaps), cp.eps_slope, false);
  return r;
}

ConditionReport dhat_discrete(const RadialWeight& w, int N_max, double tol) {
  if (N_max < 1) throw DomainError("dhat_discrete: N_max must be >= 1");
  const MomentTable t = moment_table(w, 2 * N_max, tol);
  ConditionReport r;
  r.name = "dhat_discrete";
  r.param_name = "N";
  r.weight = w.spec();
  r.parameters = {{"N_max", N_max}, {"tol", tol}, {"eps_slope", 0.05}};
  for (int n = 0; n <= N_max; ++n) {
    r.params.push_back(n);
    r.values.push_back(std::exp(t.log_at(n) - t.log_at(2 * n)));
  }
  finish(r, log10_index(r.params), 0.05, false);
  return r;
}

ConditionReport dcheck_profile(const RadialWeight& w, double K, const ConditionParams& cp) {
  if (!(K > 1.0)) throw DomainError("dcheck_profile: K must exceed 1");
  const auto gaps = grid_for(cp);
  ConditionReport r = grid_report("dcheck_profile", w, cp, gaps);
  r.parameters["K"] = K;
  r.values.resize(gaps.size());
  parallel_for(gaps.size(), [&](std::size_t j) {
    const double d = w.log_tail_at_gap(gaps[j] / K, cp.tol) - w.log_tail_at_gap(gaps[j], cp.tol);
    r.values[j] = -std::expm1(d);
  });
  finish(r, log10_inverse(gaps), cp.eps_slope, false);
  // Lower doubling: the ratio must stay above the floor and not decay, so
  // the trend here is taken on the raw samples.
  r.trend = tail_trend(log10_inverse(gaps), r.values);
  const bool floor_ok = r.running_inf >= cp.c_min;
  const bool trend_ok = !std::isnan(r.trend) && r.trend >= -cp.eps_slope;
  if (std::isnan(r.trend)) {
    r.verdict = Verdict::Inconclusive;
  } else {
    r.verdict = floor_ok && trend_ok ? Verdict::FiniteEvidence : Verdict::DivergenceEvidence;
  }
  r.note = "FiniteEvidence means the lower doubling inequality holds (inf >= c_min, no decay)";
  return r;
}

ConditionReport mclass_probe(const RadialWeight& w, int K, int N_max, const ConditionParams& cp) {
  if (K < 2) throw DomainError("mclass_probe: K must be an integer >= 2");
  if (N_max < 1) throw DomainError("mclass_probe: N_max must be >= 1");
  const MomentTable t = moment_table(w, K * N_max, cp.tol);
  ConditionReport r;
  r.name = "mclass_probe";
  r.param_name = "N";
  r.weight = w.spec();
  r.parameters = cp;
  r.parameters["K"] = K;
  r.parameters["N_max"] = N_max;
  for (int n = 1; n <= N_max; ++n) {
    r.params.push_back(n);
    r.values.push_back(std::exp(t.log_at(n) - t.log_at(static_cast<std::size_t>(K) * n)));
  }
  finish(r, log10_index(r.params), cp.eps_slope, false);
  r.verdict = r.running_inf >= cp.m_floor ? Verdict::FiniteEvidence : Verdict::DivergenceEvidence;
  r.note = "FiniteEvidence means moment doubling holds (inf >= m_floor > 1)";
  return r;
}

// ------------------------------------------------------------------ p > 1

ConditionReport Mp_discrete(const RadialWeight& w, const ConditionParams& cp) {
  cp.validate();
  const double p = cp.p, q = cp.p_conj();
  const int N_max = cp.N_max;
  ConditionReport r;
  r.name = "Mp_discrete";
  r.param_name = "N";
  r.weight = w.spec();
  r.parameters = cp;

  const ConditionReport premise = dhat_discrete(w, N_max, cp.tol);
  const int N_exact = std::max(4 * N_max, 4096);
  r.parameters["N_exact"] = N_exact;
  const MomentTable t = moment_table(w, 2 * N_exact + 1, cp.tol);
  auto log_term = [&](double logm, double n) { return q * logm + (q - 2.0) * std::log(n + 1.0); };

  // Remainder sum_{n > N_exact} T(n) ~ int_{N_exact + 1/2}^inf T(x) dx, in v = 1/x.
  double log_rem = -kInf;
  bool diverged = false;
  const double X = N_exact + 0.5;
  try {
    quad::Options opt;
    opt.rel_tol = std::max(cp.tol, 1e-9);
    log_rem = quad::log_integrate_gap(
        [&](double v) {
          const double x = 1.0 / v;
          return log_term(w.log_moment(2.0 * x + 1.0, cp.tol), x) - 2.0 * std::log(v);
        },
        0.0, 1.0 / X, opt);
  } catch (const AccuracyError& e) {
    if (!e.divergent()) {
      r.note = std::string("tail remainder not controllable: ") + e.what();
      r.verdict = Verdict::Inconclusive;
      r.running_sup = r.running_inf = std::numeric_limits<double>::quiet_NaN();
      r.trend = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
    diverged = true;
  }

  // Suffix sums of the tail series, head sums of the first factor.
  std::vector<double> log_suffix(N_max + 1);
  double acc = log_rem;
  for (int n = N_exact; n >= 0; --n) {
    acc = log_add_exp(acc, log_term(t.log_at(2 * n + 1), n));
    if (n <= N_max) log_suffix[n] = acc;
  }
  double head = -kInf;
  for (int N = 0; N <= N_max; ++N) {
    head = log_add_exp(head, -2.0 * std::log(N + 1.0) - p * t.log_at(2 * N + 1));
    r.params.push_back(N);
    r.values.push_back(diverged ? kInf : std::exp(head / p + log_suffix[N] / q));
  }
  finish(r, log10_index(r.params), cp.eps_slope, diverged);
  if (diverged) r.note = "tail series diverges";
  r.parameters["remainder"] = diverged ? nlohmann::json(nullptr) : nlohmann::json(std::exp(log_rem));
  if (premise.verdict != Verdict::FiniteEvidence) {
    r.verdict = Verdict::Inconclusive;
    r.note = "upper doubling premise (w_n/w_2n bounded) not supported; tail comparison not justified";
  }
  return r;
}

namespace {

struct KpcPieces {
  std::vector<double> log_a;  // log int_0^r hat^-p   (r = 1 - u_j)
  std::vector<double> log_b;  // log int_r^1 (hat/(1-t))^{p'}
  bool b_diverged = false;
};

KpcPieces kpc_pieces(const GapCalculus& gc, const std::vector<double>& gaps, double p, double q, bool need_a,
                     bool need_b) {
  KpcPieces k;
  if (need_a) {
    k.log_a = cumulative_from_top(gc, [&](double L, double) { return -p * L; }, gaps);
  }
  if (need_b) {
    try {
      k.log_b = cumulative_from_bottom(gc, [&](double L, double s) { return q * (L - std::log(s)); }, gaps);
    } catch (const AccuracyError& e) {
      if (!e.divergent()) throw;
      k.b_diverged = true;
      k.log_b.assign(gaps.size(), kInf);
    }
  }
  return k;
}

}  // namespace

ConditionReport Kpc_continuous(const RadialWeight& w, const ConditionParams& cp, KpcVariant variant) {
  cp.validate();
  const double p = cp.p, q = cp.p_conj();
  const auto gaps = grid_for(cp);
  GapCalculus gc(w, cp.tol);
  const KpcPieces k = kpc_pieces(gc, gaps, p, q, true, true);
  ConditionReport r = grid_report(variant == KpcVariant::M ? "Mpc" : "Kpc", w, cp, gaps);
  r.parameters["variant"] = variant == KpcVariant::M ? "M" : "K";
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    const double first = variant == KpcVariant::K ? log1p_exp(k.log_a[j]) : k.log_a[j];
    r.values.push_back(k.b_diverged ? kInf : std::exp(first / p + k.log_b[j] / q));
  }
  if (k.b_diverged) r.note = "int_r^1 (hat(w)/(1-t))^p' diverges";
  finish(r, log10_inverse(gaps), cp.eps_slope, k.b_diverged);
  return r;
}

ConditionReport Kpd(const RadialWeight& w, const ConditionParams& cp) {
  cp.validate();
  const double p = cp.p;
  const auto gaps = grid_for(cp);
  GapCalculus gc(w, cp.tol);
  const KpcPieces k = kpc_pieces(gc, gaps, p, cp.p_conj(), true, false);
  ConditionReport r = grid_report("Kpd", w, cp, gaps);
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    r.values.push_back(std::exp(gc.log_tail(gaps[j]) - std::log(gaps[j]) / p + log1p_exp(k.log_a[j]) / p));
  }
  finish(r, log10_inverse(gaps), cp.eps_slope, false);
  return r;
}

ConditionReport Kpe(const RadialWeight& w, const ConditionParams& cp) {
  cp.validate();
  const double p = cp.p, q = cp.p_conj();
  const auto gaps = grid_for(cp);
  GapCalculus gc(w, cp.tol);
  const KpcPieces k = kpc_pieces(gc, gaps, p, q, false, true);
  ConditionReport r = grid_report("Kpe", w, cp, gaps);
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    r.values.push_back(k.b_diverged ? kInf
                                    : std::exp(std::log(gaps[j]) / p - gc.log_tail(gaps[j]) + k.log_b[j] / q));
  }
  if (k.b_diverged) r.note = "int_r^1 (hat(w)/(1-t))^p' diverges";
  finish(r, log10_inverse(gaps), cp.eps_slope, k.b_diverged);
  return r;
}

// ------------------------------------------------------------------ p = 1

namespace {

ConditionReport k1c_report(const RadialWeight& w, const ConditionParams& cp, const std::string& name) {
  const auto gaps = grid_for(cp);
  GapCalculus gc(w, cp.tol);
  PhiFunction phi(gc, cp.grid_depth);
  const std::size_t n = gaps.size();
  std::vector<double> piece(n, -kInf);
  auto log_phi = [&](double s) { return phi.log_phi(s); };
  bool diverged = false;
  try {
    parallel_for(n, [&](std::size_t j) {
      const double lo = j + 1 < n ? gaps[j + 1] : 0.0;
      piece[j] = w.log_integrate_against(log_phi, lo, gaps[j], cp.tol);
    });
  } catch (const AccuracyError& e) {
    if (!e.divergent()) throw;
    diverged = true;
  }
  ConditionReport r = grid_report(name, w, cp, gaps);
  r.values.assign(n, kInf);
  if (!diverged) {
    double acc = -kInf;
    for (std::size_t j = n; j-- > 0;) {
      acc = log_add_exp(acc, piece[j]);
      r.values[j] = std::exp(acc - std::log(gaps[j]));
    }
  }
  finish(r, log10_inverse(gaps), cp.eps_slope, diverged);
  return r;
}

}  // namespace

ConditionReport K1_family(const RadialWeight& w, const ConditionParams& cp, K1Variant variant) {
  if (variant == K1Variant::K1c) return k1c_report(w, cp, "K1c");
  if (variant == K1Variant::M1) {
    const int N_max = cp.N_max;
    const MomentTable t = moment_table(w, 2 * N_max, cp.tol);
    ConditionReport r;
    r.name = "M1";
    r.param_name = "N";
    r.weight = w.spec();
    r.parameters = cp;
    double head = -kInf;
    for (int N = 0; N <= N_max; ++N) {
      head = log_add_exp(head, -2.0 * std::log(N + 1.0) - t.log_at(2 * N));
      r.params.push_back(N);
      r.values.push_back(std::exp(std::log(N + 1.0) + t.log_at(2 * N) + head));
    }
    finish(r, log10_index(r.params), cp.eps_slope, false);
    return r;
  }
  const auto gaps = grid_for(cp);
  GapCalculus gc(w, cp.tol);
  const auto log_a = cumulative_from_top(gc, [](double L, double) { return -L; }, gaps);
  const bool with_one = variant == K1Variant::K1d;
  ConditionReport r = grid_report(with_one ? "K1d" : "M1d", w, cp, gaps);
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    const double inner = with_one ? log1p_exp(log_a[j]) : log_a[j];
    r.values.push_back(std::exp(gc.log_tail(gaps[j]) - std::log(gaps[j]) + inner));
  }
  finish(r, log10_inverse(gaps), cp.eps_slope, false);
  return r;
}

ConditionReport carleson_functional(const RadialWeight& w, const ConditionParams& cp) {
  return k1c_report(w, cp, "carleson_functional");
}

ConditionReport mp_small(const RadialWeight& w, const ConditionParams& cp) {
  cp.validate();
  const auto gaps = grid_for(cp);
  GapCalculus gc(w, cp.tol);
  if (cp.p > 1.0) {
    const double p = cp.p, q = cp.p_conj();
    const KpcPieces k = kpc_pieces(gc, gaps, p, q, true, false);
    const std::size_t n = gaps.size();
    std::vector<double> piece(n, -kInf);
    bool diverged = false;
    try {
      parallel_for(n, [&](std::size_t j) {
        const double lo = j + 1 < n ? gaps[j + 1] : 0.0;
        piece[j] = w.log_integrate_power(q, lo, gaps[j], cp.tol);
      });
    } catch (const AccuracyError& e) {
      if (!e.divergent()) throw;
      diverged = true;
    }
    ConditionReport r = grid_report("mp_small", w, cp, gaps);
    r.values.assign(n, kInf);
    if (!diverged) {
      double acc = -kInf;
      for (std::size_t j = n; j-- > 0;) {
        acc = log_add_exp(acc, piece[j]);
        r.values[j] = std::exp(log1p_exp(k.log_a[j]) / p + acc / q);
      }
    } else {
      r.note = "int_r^1 w^p' diverges";
    }
    finish(r, log10_inverse(gaps), cp.eps_slope, diverged);
    return r;
  }

  // p = 1: essential supremum of w (1 + int_0^t 1/hat(w)), sampled at grid
  // points, midpoints, and segment ends and midpoints of the density.
  std::vector<double> pts = gaps;
  for (std::size_t j = 0; j + 1 < gaps.size(); ++j) pts.push_back(std::sqrt(gaps[j] * gaps[j + 1]));
  const double deepest = gaps.back();
  for (const auto& s : w.segments()) {
    if (s.hi < deepest) continue;
    pts.push_back(s.hi);
    const double mid = s.hi - 0.5 * s.width;
    if (mid > 0.0 && mid >= deepest) pts.push_back(mid);
  }
  std::sort(pts.begin(), pts.end(), std::greater<>());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  PhiFunction phi(gc, cp.grid_depth);
  ConditionReport r = grid_report("mp_small", w, cp, pts);
  r.values.resize(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const double ld = w.log_density_at_gap(pts[i]);
    r.values[i] = ld == -kInf ? 0.0 : std::exp(ld + phi.log_phi(pts[i]));
  });
  finish(r, log10_inverse(pts), cp.eps_slope, false);
  return r;
}

DoublingFit fit_doubling_bound(const RadialWeight& w, int grid_depth) {
  const auto gaps = radius_grid_gaps(grid_depth);
  const std::size_t n = gaps.size();
  std::vector<double> L(n), lu(n);
  for (std::size_t j = 0; j < n; ++j) {
    L[j] = w.log_tail_at_gap(gaps[j]);
    lu[j] = std::log(gaps[j]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sx += lu[j];
    sy += L[j];
    sxx += lu[j] * lu[j];
    sxy += lu[j] * L[j];
  }
  DoublingFit fit;
  fit.beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double logC = -kInf;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      logC = std::max(logC, (L[j] - L[k]) - fit.beta * (lu[j] - lu[k]));
    }
  }
  fit.C = std::exp(logC);
  return fit;
}

}  // namespace weightlab
