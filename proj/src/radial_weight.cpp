#include "weightlab/radial_weight.hpp"

#include "special_functions.hpp"
#include "weightlab/errors.hpp"
#include "weightlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace weightlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
using detail::log_add_exp;
}  // namespace

struct RadialWeight::Model {
  std::vector<WeightSegment> segments;

  virtual ~Model() = default;
  virtual double log_density(double gap) const = 0;
  // Density on a known segment; lets piecewise models skip the search.
  virtual double log_density_on(std::size_t /*segment*/, double gap) const { return log_density(gap); }
  // Density at gap segments[seg].hi - s for narrow segments, exact in s where the model allows.
  virtual double log_density_in_segment(std::size_t seg, double s) const {
    return log_density_on(seg, segments[seg].hi - s);
  }
  virtual std::optional<double> log_tail(double /*gap*/, double /*tol*/) const { return std::nullopt; }
  virtual std::optional<double> log_moment(double /*x*/, double /*tol*/) const { return std::nullopt; }
  // Tail at gap segments[seg].hi - s, resolving s below the spacing of doubles near hi.
  virtual std::optional<double> log_tail_in_segment(std::size_t /*seg*/, double /*s*/, double /*tol*/) const {
    return std::nullopt;
  }
  virtual bool closed_tail() const { return false; }
  virtual bool closed_moment() const { return false; }
  virtual const OscillatingKnots* knots() const { return nullptr; }
  virtual const std::vector<RadialWeight>* terms() const { return nullptr; }
};

namespace {

using Model = RadialWeight::Model;

quad::Options options_for(double tol) {
  quad::Options o;
  o.rel_tol = tol;
  return o;
}

// Local coordinates of the overlap of segment `seg` with [lo, hi]:
// s in [s_a, s_b] with gap = seg.hi - s. Empty when s_b <= s_a.
std::pair<double, double> overlap(const WeightSegment& seg, double lo, double hi) {
  if (!(lo < seg.hi)) return {0.0, 0.0};
  const double s_a = hi >= seg.hi ? 0.0 : seg.hi - hi;
  const double s_b = std::min(seg.width, seg.hi - lo);
  return {s_a, s_b};
}

bool is_narrow(const WeightSegment& seg) { return !seg.reaches_boundary() && seg.width < 1e-6 * seg.hi; }

// log of the integral over [lo, hi] of exp(logF(gap, log_density)) on every segment.
template <class LogF>
double generic_log_integrate(const Model& m, LogF&& logF, double lo, double hi, double tol) {
  const auto opt = options_for(tol);
  double total = -kInf;
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    const WeightSegment& seg = m.segments[i];
    auto in_gap = [&](double g) { return logF(g, m.log_density_on(i, g)); };
    double piece;
    if (!is_narrow(seg)) {
      const double g_lo = seg.reaches_boundary() ? lo : std::max(lo, seg.hi - seg.width);
      const double g_hi = std::min(hi, seg.hi);
      if (!(g_hi > g_lo)) continue;
      piece = quad::log_integrate_gap(in_gap, g_lo, g_hi, opt);
    } else {
      // Plateau narrower than the double spacing allows in the gap variable.
      auto [s_a, s_b] = overlap(seg, lo, hi);
      if (!(s_b > s_a)) continue;
      auto in_s = [&](double s) { return logF(seg.hi - s, m.log_density_in_segment(i, s)); };
      const double ref = in_s(0.0);
      if (ref == -kInf) continue;
      auto local = [&](double s) { return std::exp(in_s(s) - ref); };
      const double v = quad::gauss_kronrod(local, s_a, s_b, opt).value;
      piece = v > 0 ? ref + std::log(v) : -kInf;
    }
    total = log_add_exp(total, piece);
  }
  return total;
}

// Linear counterpart for signed integrands F(gap, density).
template <class F>
double generic_integrate(const Model& m, F&& f, double lo, double hi, double tol) {
  const auto opt = options_for(tol);
  double total = 0.0;
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    const WeightSegment& seg = m.segments[i];
    auto in_gap = [&](double g) {
      const double ld = m.log_density_on(i, g);
      return ld == -kInf ? 0.0 : f(g, std::exp(ld));
    };
    if (!is_narrow(seg)) {
      const double g_lo = seg.reaches_boundary() ? lo : std::max(lo, seg.hi - seg.width);
      const double g_hi = std::min(hi, seg.hi);
      if (!(g_hi > g_lo)) continue;
      total += quad::integrate_gap(in_gap, g_lo, g_hi, opt).value;
    } else {
      auto [s_a, s_b] = overlap(seg, lo, hi);
      if (!(s_b > s_a)) continue;
      auto local = [&](double s) {
        const double ld = m.log_density_in_segment(i, s);
        return ld == -kInf ? 0.0 : f(seg.hi - s, std::exp(ld));
      };
      total += quad::gauss_kronrod(local, s_a, s_b, opt).value;
    }
  }
  return total;
}

// Segments spanning (0, 1] with breakpoints at every segment end of the inputs.
std::vector<WeightSegment> merged_segments(const std::vector<const std::vector<WeightSegment>*>& lists) {
  std::vector<double> points = {1.0};
  for (const auto* list : lists) {
    for (const auto& s : *list) {
      if (s.hi < 1.0) points.push_back(s.hi);
      const double lo = s.hi - s.width;
      if (lo > 0.0 && lo < s.hi) points.push_back(lo);
    }
  }
  std::sort(points.begin(), points.end(), std::greater<>());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<WeightSegment> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double hi = points[i];
    const double lo = i + 1 < points.size() ? points[i + 1] : 0.0;
    out.push_back({hi, lo == 0.0 ? hi : hi - lo});
  }
  return out;
}

void check_gap(double gap, const char* what) {
  if (!(gap > 0.0 && gap <= 1.0)) {
    throw DomainError(std::string(what) + ": r must lie in [0, 1)");
  }
}

// ---------------------------------------------------------------- models

struct StandardModel final : Model {
  double beta;
  explicit StandardModel(double b) : beta(b) { segments = {{1.0, 1.0}}; }
  double log_density(double gap) const override { return beta == 0.0 ? 0.0 : beta * std::log(gap); }
  std::optional<double> log_tail(double gap, double) const override {
    return (beta + 1.0) * std::log(gap) - std::log(beta + 1.0);
  }
  std::optional<double> log_moment(double x, double) const override {
    if (beta == 0.0) return -std::log1p(x);
    return detail::log_beta(x + 1.0, beta + 1.0);
  }
  bool closed_tail() const override { return true; }
  bool closed_moment() const override { return true; }
};

struct ExponentialModel final : Model {
  double c;
  explicit ExponentialModel(double c_) : c(c_) { segments = {{1.0, 1.0}}; }
  double log_density(double gap) const override { return -c / gap; }
  // hat(w)(u) = u E_2(c/u)
  std::optional<double> log_tail(double gap, double) const override {
    const double z = c / gap;
    return std::log(gap) - z + detail::log_scaled_e2(z);
  }
  bool closed_tail() const override { return true; }
};

struct StepModel final : Model {
  std::vector<double> knots, levels;
  std::vector<WeightSegment> pieces;  // one per level, including zero levels
  std::vector<std::size_t> piece_of_segment;

  StepModel(std::vector<double> k, std::vector<double> l) : knots(std::move(k)), levels(std::move(l)) {
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const double r_hi = i + 1 < knots.size() ? knots[i + 1] : 1.0;
      pieces.push_back({1.0 - knots[i], r_hi - knots[i]});
      if (i + 1 == knots.size()) pieces.back().width = pieces.back().hi;
      if (levels[i] > 0.0) {
        segments.push_back(pieces.back());
        piece_of_segment.push_back(i);
      }
    }
  }
  double log_density(double gap) const override {
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (gap <= pieces[i].hi && pieces[i].hi - gap < pieces[i].width) {
        return levels[i] > 0.0 ? std::log(levels[i]) : -kInf;
      }
    }
    return -kInf;  // below the first knot
  }
  double log_density_on(std::size_t seg, double) const override {
    return std::log(levels[piece_of_segment[seg]]);
  }
  std::optional<double> log_tail(double gap, double) const override {
    double t = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const double lo = pieces[i].hi - pieces[i].width;
      const double len = std::min(gap, pieces[i].hi) - lo;
      if (len > 0.0) t += levels[i] * len;
    }
    return t > 0.0 ? std::log(t) : -kInf;
  }
  std::optional<double> log_moment(double x, double) const override {
    double m = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (levels[i] == 0.0) continue;
      const double a = knots[i];
      const double b = i + 1 < knots.size() ? knots[i + 1] : 1.0;
      const double pa = a > 0.0 ? std::exp((x + 1.0) * std::log(a)) : 0.0;
      const double pb = b < 1.0 ? std::exp((x + 1.0) * std::log(b)) : 1.0;
      m += levels[i] * (pb - pa) / (x + 1.0);
    }
    return std::log(m);
  }
  bool closed_tail() const override { return true; }
  bool closed_moment() const override { return true; }
};

struct TildeModel final : Model {
  RadialWeight base;
  std::optional<double> base_beta;  // set for constant/standard bases

  explicit TildeModel(RadialWeight b) : base(std::move(b)) {
    segments = merged_segments({&base.segments()});
    const auto& s = base.spec();
    if (s.kind == WeightKind::constant) base_beta = 0.0;
    if (s.kind == WeightKind::standard) base_beta = s.beta;
  }
  double log_density(double gap) const override { return base.log_tail_at_gap(gap) - std::log(gap); }
  double log_density_in_segment(std::size_t seg, double s) const override {
    const double hi = segments[seg].hi;
    const auto& bs = base.segments();
    for (std::size_t j = 0; j < bs.size(); ++j) {
      if (bs[j].hi == hi && is_narrow(bs[j])) {
        // merged widths are rounded hi - lo, so s can exceed the exact width by an ulp
        return base.log_tail_in_segment(j, std::min(s, bs[j].width)) - std::log(hi - s);
      }
    }
    return log_density(hi - s);
  }
  std::optional<double> log_tail(double gap, double) const override {
    if (!base_beta) return std::nullopt;
    const double b = *base_beta;
    return (b + 1.0) * std::log(gap) - 2.0 * std::log(b + 1.0);
  }
  std::optional<double> log_moment(double x, double) const override {
    if (!base_beta) return std::nullopt;
    const double b = *base_beta;
    return detail::log_beta(x + 1.0, b + 1.0) - std::log(b + 1.0);
  }
  bool closed_tail() const override { return base_beta.has_value(); }
  bool closed_moment() const override { return base_beta.has_value(); }
};

struct SumModel final : Model {
  std::vector<RadialWeight> children;

  explicit SumModel(std::vector<RadialWeight> c) : children(std::move(c)) {
    std::vector<const std::vector<WeightSegment>*> lists;
    for (const auto& ch : children) lists.push_back(&ch.segments());
    segments = merged_segments(lists);
  }
  double log_density(double gap) const override {
    double t = -kInf;
    for (const auto& ch : children) t = log_add_exp(t, ch.log_density_at_gap(gap));
    return t;
  }
  std::optional<double> log_tail(double gap, double tol) const override {
    double t = -kInf;
    for (const auto& ch : children) t = log_add_exp(t, ch.log_tail_at_gap(gap, tol));
    return t;
  }
  std::optional<double> log_moment(double x, double tol) const override {
    double t = -kInf;
    for (const auto& ch : children) t = log_add_exp(t, ch.log_moment(x, tol));
    return t;
  }
  bool closed_tail() const override {
    return std::all_of(children.begin(), children.end(), [](auto& c) { return c.has_closed_form_tail(); });
  }
  bool closed_moment() const override {
    return std::all_of(children.begin(), children.end(), [](auto& c) { return c.has_closed_form_moment(); });
  }
  const std::vector<RadialWeight>* terms() const override { return &children; }
};

struct OscillatingModel final : Model {
  RadialWeight nu;  // tilde transform of the base
  OscillatingKnots kn;
  std::vector<double> log_height;
  std::vector<double> log_mass;  // log of h_n times the plateau integral

  OscillatingModel(RadialWeight nu_, OscillatingKnots k) : nu(std::move(nu_)), kn(std::move(k)) {
    const int N = kn.n_max;
    for (int n = 0; n <= N; ++n) {
      segments.push_back({kn.gap[n], kn.width[n]});
      log_height.push_back(std::log(kn.height[n]));
      log_mass.push_back(log_height.back() + kn.log_plateau[n]);
    }
    segments.push_back({kn.gap[N + 1], kn.gap[N + 1]});
  }

  // n with gap[n+1] < g <= gap[n]; requires g > gap[n_max+1].
  int interval_of(double g) const {
    int n = static_cast<int>(std::floor(-std::log(g) / std::log(kn.K)));
    n = std::clamp(n, 0, kn.n_max);
    while (n > 0 && g > kn.gap[n]) --n;
    while (n < kn.n_max && g <= kn.gap[n + 1]) ++n;
    return n;
  }
  double log_density(double g) const override {
    if (g <= kn.gap[kn.n_max + 1]) return nu.log_density_at_gap(g);
    const int n = interval_of(g);
    if (kn.gap[n] - g < kn.width[n]) return log_height[n] + nu.log_density_at_gap(g);
    return -kInf;
  }
  double log_density_on(std::size_t seg, double g) const override {
    const double ld = nu.log_density_at_gap(g);
    return seg < log_height.size() ? log_height[seg] + ld : ld;
  }
  std::optional<double> log_tail(double g, double tol) const override {
    if (g <= kn.gap[kn.n_max + 1]) return nu.log_tail_at_gap(g, tol);
    const int n = interval_of(g);
    return plateau_log_tail(n, kn.gap[n] - g, tol);
  }
  std::optional<double> log_tail_in_segment(std::size_t seg, double s, double tol) const override {
    if (seg > static_cast<std::size_t>(kn.n_max)) return nu.log_tail_at_gap(segments[seg].hi - s, tol);
    return plateau_log_tail(static_cast<int>(seg), s, tol);
  }
  // Tail at gap u_n - s: everything below plateau n plus the part of the plateau below.
  double plateau_log_tail(int n, double s, double tol) const {
    const double below = kn.log_nu_tail[n + 1];
    if (s >= kn.width[n]) return below;
    double cut = 0.0;
    if (s > 0.0) {
      const double ref = nu.log_density_at_gap(kn.gap[n]);
      auto local = [&](double t) { return std::exp(nu.log_density_at_gap(kn.gap[n] - t) - ref); };
      cut = std::exp(log_height[n] + ref) * quad::gauss_kronrod(local, 0.0, s, options_for(tol)).value;
    }
    const double mass = std::exp(log_mass[n]);
    return std::log(std::exp(below) + std::max(mass - cut, 0.0));
  }
  bool closed_tail() const override { return true; }
  const OscillatingKnots* knots() const override { return &kn; }
};

std::shared_ptr<const Model> make_model(const WeightSpec& spec) {
  switch (spec.kind) {
    case WeightKind::constant: return std::make_shared<StandardModel>(0.0);
    case WeightKind::standard: return std::make_shared<StandardModel>(spec.beta);
    case WeightKind::exponential: return std::make_shared<ExponentialModel>(spec.c);
    case WeightKind::piecewise_step: return std::make_shared<StepModel>(spec.knots, spec.levels);
    case WeightKind::sum: {
      std::vector<RadialWeight> ch;
      for (const auto& t : spec.terms) ch.emplace_back(t);
      return std::make_shared<SumModel>(std::move(ch));
    }
    case WeightKind::tilde: return std::make_shared<TildeModel>(RadialWeight(*spec.base));
    case WeightKind::oscillating: break;
  }
  throw DomainError("make_model: oscillating weights are built by build_oscillating_weight");
}

}  // namespace

// ---------------------------------------------------------------- RadialWeight

RadialWeight::RadialWeight(WeightSpec spec, std::shared_ptr<const Model> model)
    : spec_(std::move(spec)), model_(std::move(model)) {}

RadialWeight::RadialWeight(const WeightSpec& spec) {
  spec.validate();
  if (spec.kind == WeightKind::oscillating) {
    *this = build_oscillating_weight(RadialWeight(*spec.base), spec.p, spec.K, spec.n_max);
    return;
  }
  spec_ = spec;
  model_ = make_model(spec);
}

double RadialWeight::density(double r) const {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("density: r must lie in [0, 1)");
  return density_at_gap(1.0 - r);
}

double RadialWeight::density_at_gap(double gap) const { return std::exp(log_density_at_gap(gap)); }

double RadialWeight::log_density_at_gap(double gap) const {
  check_gap(gap, "density");
  return model_->log_density(gap);
}

double RadialWeight::tail(double r, double tol) const {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("tail: r must lie in [0, 1)");
  return tail_at_gap(1.0 - r, tol);
}

double RadialWeight::tail_at_gap(double gap, double tol) const { return std::exp(log_tail_at_gap(gap, tol)); }

double RadialWeight::log_tail_at_gap(double gap, double tol) const {
  check_gap(gap, "tail");
  if (!(tol > 0.0)) throw DomainError("tail: tol must be positive");
  if (auto v = model_->log_tail(gap, tol)) return *v;
  return generic_log_integrate(*model_, [](double, double ld) { return ld; }, 0.0, gap, tol);
}

double RadialWeight::log_tail_in_segment(std::size_t seg, double s, double tol) const {
  const auto& segs = model_->segments;
  if (seg >= segs.size()) throw DomainError("log_tail_in_segment: no such segment");
  if (!(s >= 0.0 && s <= segs[seg].width)) throw DomainError("log_tail_in_segment: offset outside the segment");
  if (auto v = model_->log_tail_in_segment(seg, s, tol)) return *v;
  return log_tail_at_gap(segs[seg].hi - s, tol);
}

double RadialWeight::moment(double x, double tol) const { return std::exp(log_moment(x, tol)); }

double RadialWeight::log_moment(double x, double tol) const {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("moment: x must be finite and >= 0");
  if (!(tol > 0.0)) throw DomainError("moment: tol must be positive");
  if (auto v = model_->log_moment(x, tol)) return *v;
  return generic_log_integrate(
      *model_, [x](double g, double ld) { return x == 0.0 ? ld : x * std::log1p(-g) + ld; }, 0.0, 1.0,
      tol);
}

const RadialWeight::Model& RadialWeight::model_ref() const { return *model_; }

bool RadialWeight::has_closed_form_tail() const { return model_->closed_tail(); }
bool RadialWeight::has_closed_form_moment() const { return model_->closed_moment(); }
const std::vector<WeightSegment>& RadialWeight::segments() const { return model_->segments; }
const OscillatingKnots* RadialWeight::oscillating_knots() const { return model_->knots(); }

double RadialWeight::integrate_against(const std::function<double(double)>& G, double lo, double hi,
                                       double tol) const {
  if (const auto* ch = model_->terms()) {
    double t = 0.0;
    for (const auto& c : *ch) t += c.integrate_against(G, lo, hi, tol);
    return t;
  }
  return generic_integrate(*model_, [&](double g, double d) { return G(g) * d; }, lo, hi, tol);
}

double RadialWeight::log_integrate_against(const std::function<double(double)>& logG, double lo,
                                           double hi, double tol) const {
  if (const auto* ch = model_->terms()) {
    double t = -kInf;
    for (const auto& c : *ch) t = log_add_exp(t, c.log_integrate_against(logG, lo, hi, tol));
    return t;
  }
  return generic_log_integrate(*model_, [&](double g, double ld) { return ld == -kInf ? ld : logG(g) + ld; },
                               lo, hi, tol);
}

double RadialWeight::log_integrate_power(double q, double lo, double hi, double tol) const {
  return generic_log_integrate(*model_, [q](double, double ld) { return q * ld; }, lo, hi, tol);
}

// ---------------------------------------------------------------- free functions

double eval_density(const RadialWeight& w, double r) { return w.density(r); }
double tail(const RadialWeight& w, double r, double tol) { return w.tail(r, tol); }
double moment(const RadialWeight& w, double x, double tol) { return w.moment(x, tol); }

double quadrature_log_tail_at_gap(const RadialWeight& w, double gap, double tol) {
  check_gap(gap, "tail");
  return generic_log_integrate(w.model_ref(), [](double, double ld) { return ld; }, 0.0, gap, tol);
}

double quadrature_log_moment(const RadialWeight& w, double x, double tol) {
  if (!(x >= 0.0)) throw DomainError("moment: x must be >= 0");
  return generic_log_integrate(
      w.model_ref(), [x](double g, double ld) { return x == 0.0 ? ld : x * std::log1p(-g) + ld; }, 0.0, 1.0, tol);
}

double quadrature_tail(const RadialWeight& w, double r, double tol) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("tail: r must lie in [0, 1)");
  return std::exp(quadrature_log_tail_at_gap(w, 1.0 - r, tol));
}

double quadrature_moment(const RadialWeight& w, double x, double tol) {
  return std::exp(quadrature_log_moment(w, x, tol));
}

MomentTable moment_table(const RadialWeight& w, int x_max_index, double tol) {
  if (x_max_index < 1) throw DomainError("moment_table: x_max_index must be >= 1");
  MomentTable t;
  t.weight = w.spec();
  t.tol = tol;
  const std::size_t n = static_cast<std::size_t>(x_max_index) + 1;
  t.indices.resize(n);
  t.values.resize(n);
  t.log_values.resize(n);
  parallel_for(n, [&](std::size_t i) {
    t.indices[i] = static_cast<double>(i);
    t.log_values[i] = w.log_moment(static_cast<double>(i), tol);
    t.values[i] = std::exp(t.log_values[i]);
  });
  // Moments of a positive weight are strictly decreasing; quadrature noise at
  // the 1e-15 level must not break that for consumers.
  for (std::size_t i = 1; i < n; ++i) {
    if (t.log_values[i] >= t.log_values[i - 1]) {
      throw AccuracyError("moment_table: moments not decreasing at index " + std::to_string(i),
                          t.values[i], std::abs(t.values[i] - t.values[i - 1]));
    }
  }
  return t;
}

RadialWeight tilde_transform(const RadialWeight& w) { return RadialWeight(WeightSpec::tilde(w.spec())); }

double default_oscillation_dilation(const RadialWeight& base) {
  const RadialWeight nu = tilde_transform(base);
  const double need = std::log(1.1);
  for (int e = 1; e <= 20; ++e) {
    const double K = std::ldexp(1.0, e);
    bool ok = true;
    for (int j = 0; j <= 80 && ok; ++j) {
      const double u = std::exp2(-j / 4.0);
      ok = nu.log_tail_at_gap(u) - nu.log_tail_at_gap(u / K) >= need;
    }
    if (ok) return K;
  }
  throw DomainError("oscillating weight: no dilation K <= 2^20 satisfies the lower doubling test");
}

RadialWeight build_oscillating_weight(const RadialWeight& base, double p, double K, int n_max) {
  if (!(p > 1.0)) throw DomainError("oscillating weight needs p > 1");
  if (K == 0.0) K = default_oscillation_dilation(base);
  if (!(K > 1.0)) throw DomainError("oscillating weight needs K > 1");
  if (n_max < 0) throw DomainError("oscillating weight needs n_max >= 0");
  const bool until_underflow = n_max == 0;
  const int n_cap = until_underflow ? 400 : n_max;
  const double log_floor = std::log(1e-300);

  RadialWeight nu = tilde_transform(base);
  OscillatingKnots kn;
  kn.K = K;
  kn.p = p;
  auto gap_at = [K](int n) { return std::pow(K, -static_cast<double>(n)); };
  kn.gap.push_back(1.0);
  kn.log_nu_tail.push_back(nu.log_tail_at_gap(1.0));
  int n = 0;
  for (; n <= n_cap; ++n) {
    const double u_next = gap_at(n + 1);
    if (!(u_next > 0.0)) {
      if (until_underflow) break;
      throw ConstructionError("oscillating weight: knot gap underflows at depth " + std::to_string(n), n);
    }
    const double u = kn.gap[n];
    const double L = kn.log_nu_tail[n];
    const double log_a = std::log(0.5) + std::min(std::log(u - u_next), p * L - (p - 1.0) * std::log(n + 1.0));
    if (log_a < log_floor) {
      if (until_underflow) break;
      throw ConstructionError("oscillating weight: plateau width a_n underflows at depth " + std::to_string(n) +
                                  " before n_max = " + std::to_string(n_max),
                              n);
    }
    const double a = std::exp(log_a);
    const double L_next = nu.log_tail_at_gap(u_next);
    // Plateau integral of nu~ in local coordinates s = u - gap.
    const double ref = nu.log_density_at_gap(u);
    auto local = [&](double s) { return std::exp(nu.log_density_at_gap(u - s) - ref); };
    const double log_plateau = ref + std::log(quad::gauss_kronrod(local, 0.0, a, options_for(1e-13)).value);
    const double log_num = L + std::log(-std::expm1(L_next - L));
    kn.width.push_back(a);
    kn.log_plateau.push_back(log_plateau);
    kn.height.push_back(std::exp(log_num - log_plateau));
    kn.gap.push_back(u_next);
    kn.log_nu_tail.push_back(L_next);
  }
  kn.n_max = static_cast<int>(kn.width.size()) - 1;
  if (kn.n_max < 0) throw ConstructionError("oscillating weight: no plateau could be built", 0);
  kn.gap.resize(kn.n_max + 2);
  kn.log_nu_tail.resize(kn.n_max + 2);

  WeightSpec spec;
  spec.kind = WeightKind::oscillating;
  spec.base = std::make_shared<const WeightSpec>(base.spec());
  spec.p = p;
  spec.K = K;
  spec.n_max = until_underflow ? 0 : kn.n_max;
  return RadialWeight(std::move(spec), std::make_shared<OscillatingModel>(std::move(nu), std::move(kn)));
}

}  // namespace weightlab
