#include "doctest.h"

#include "weightlab/errors.hpp"
#include "weightlab/radial_weight.hpp"

#include <cmath>
#include <random>

using namespace weightlab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<WeightSpec> builtin_specs() {
  return {WeightSpec::constant(),
          WeightSpec::standard(0.5),
          WeightSpec::standard(1.0),
          WeightSpec::standard(2.0),
          WeightSpec::standard(-0.5),
          WeightSpec::exponential(1.0),
          WeightSpec::piecewise_step({0.0, 0.3, 0.6}, {1.0, 0.0, 2.0}),
          WeightSpec::sum({WeightSpec::standard(1.0), WeightSpec::exponential(0.5)}),
          WeightSpec::tilde(WeightSpec::exponential(1.0)),
          WeightSpec::oscillating(WeightSpec::standard(1.0), 2.0, 2.0, 12)};
}

}  // namespace

TEST_CASE("densities") {
  CHECK(RadialWeight(WeightSpec::constant()).density(0.3) == 1.0);
  CHECK(RadialWeight(WeightSpec::standard(2.0)).density(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(RadialWeight(WeightSpec::exponential(1.0)).density(0.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(RadialWeight(WeightSpec::constant()).density(1.0), DomainError);
  CHECK_THROWS_AS(RadialWeight(WeightSpec::constant()).density(-0.1), DomainError);
}

TEST_CASE("piecewise step weights are right-continuous at knots") {
  RadialWeight w(WeightSpec::piecewise_step({0.0, 0.5}, {1.0, 3.0}));
  CHECK(rel(w.density(0.5), 3.0) < 1e-15);
  CHECK(rel(w.density(0.5 - 1e-12), 1.0) < 1e-15);
  CHECK(rel(w.tail(0.25), 0.25 + 1.5) < 1e-15);
  // moment x=1: int_0^.5 r dr + 3 int_.5^1 r dr
  CHECK(rel(w.moment(1.0), 0.125 + 3 * 0.375) < 1e-14);
}

TEST_CASE("tails") {
  CHECK(rel(RadialWeight(WeightSpec::constant()).tail(0.75), 0.25) < 1e-15);
  CHECK(rel(RadialWeight(WeightSpec::standard(2.0)).tail(0.5), 0.125 / 3.0) < 1e-14);
  // u E_2(c/u) at u = 0.1, c = 1, from an independent high-precision quadrature
  CHECK(rel(RadialWeight(WeightSpec::exponential(1.0)).tail(0.9), 3.83024046563160897e-7) < 1e-12);
}

TEST_CASE("moments") {
  CHECK(rel(RadialWeight(WeightSpec::constant()).moment(5.0), 1.0 / 6.0) < 1e-15);
  CHECK(rel(RadialWeight(WeightSpec::standard(1.0)).moment(3.0), 0.05) < 1e-13);
  RadialWeight e(WeightSpec::exponential(1.0));
  CHECK(rel(e.moment(2.0), 0.0151740637049625025) < 1e-10);
  CHECK(rel(e.moment(0.0), 0.148495506775922048) < 1e-10);
}

TEST_CASE("moment tables") {
  auto c = moment_table(RadialWeight(WeightSpec::constant()), 3);
  REQUIRE(c.size() == 4);
  for (int n = 0; n < 4; ++n) CHECK(rel(c[n], 1.0 / (n + 1)) < 1e-15);
  auto s = moment_table(RadialWeight(WeightSpec::standard(1.0)), 2);
  CHECK(rel(s[0], 0.5) < 1e-14);
  CHECK(rel(s[1], 1.0 / 6) < 1e-14);
  CHECK(rel(s[2], 1.0 / 12) < 1e-14);
  auto e = moment_table(RadialWeight(WeightSpec::exponential(1.0)), 64);
  for (std::size_t n = 1; n < e.size(); ++n) CHECK(e[n] < e[n - 1]);
  CHECK_THROWS_AS(moment_table(RadialWeight(WeightSpec::constant()), 0), DomainError);
}

TEST_CASE("tilde transform") {
  RadialWeight t1(tilde_transform(RadialWeight(WeightSpec::constant())));
  for (double r : {0.0, 0.3, 0.9, 0.999}) {
    CHECK(rel(t1.density(r), 1.0) < 1e-15);
    CHECK(rel(t1.tail(r), 1.0 - r) < 1e-15);
    CHECK(rel(quadrature_tail(t1, r), 1.0 - r) < 1e-10);
  }
  for (double beta : {-0.5, 1.0, 2.5}) {
    RadialWeight t(tilde_transform(RadialWeight(WeightSpec::standard(beta))));
    for (double r : {0.1, 0.5, 0.99}) {
      CHECK(rel(t.density(r), std::pow(1 - r, beta) / (beta + 1)) < 1e-13);
      CHECK(rel(t.tail(r), quadrature_tail(t, r)) < 1e-9);
    }
  }
}

TEST_CASE("closed-form tails agree with quadrature of the density on random radii") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& spec : builtin_specs()) {
    RadialWeight w(spec);
    INFO(spec.label());
    for (int i = 0; i < 100; ++i) {
      // Mix uniform radii with radii close to the boundary.
      const double r = (i % 2 == 0) ? unif(rng) : 1.0 - std::pow(10.0, -8.0 * unif(rng));
      // Compared in log scale: the exponential tails underflow near r = 1.
      const double a = w.log_tail_at_gap(1.0 - r);
      const double b = quadrature_log_tail_at_gap(w, 1.0 - r);
      // Near r = 1 the log of an exponential tail is ~ -1e8, whose spacing
      // of doubles alone is ~1.5e-8; allow a few units in the last place.
      CHECK(std::abs(a - b) < 1e-8 + 4 * std::abs(a) * 2.2e-16);
    }
  }
}

TEST_CASE("moments are decreasing and start at the total mass") {
  for (const auto& spec : builtin_specs()) {
    RadialWeight w(spec);
    INFO(spec.label());
    CHECK(rel(w.moment(0.0), w.tail(0.0)) < 1e-9);
    double prev = w.moment(0.0);
    for (double x : {0.5, 1.0, 3.0, 10.0, 40.0, 200.0, 1000.0}) {
      const double m = w.moment(x);
      CHECK(m < prev);
      prev = m;
    }
  }
}

TEST_CASE("Beta closed form against quadrature") {
  for (double beta : {0.0, 1.0, 2.5}) {
    RadialWeight w(WeightSpec::standard(beta));
    for (double x : {0.0, 1.0, 10.0, 100.0}) {
      const double exact = std::exp(std::lgamma(x + 1) + std::lgamma(beta + 1) - std::lgamma(x + beta + 2));
      CHECK(rel(quadrature_moment(w, x), exact) < 1e-8);
      CHECK(rel(w.moment(x), exact) < 1e-12);
    }
  }
}

TEST_CASE("sum weights add termwise") {
  RadialWeight a(WeightSpec::standard(1.0)), b(WeightSpec::exponential(0.5));
  RadialWeight s(WeightSpec::sum({a.spec(), b.spec()}));
  for (double r : {0.0, 0.4, 0.95}) {
    CHECK(rel(s.density(r), a.density(r) + b.density(r)) < 1e-14);
    CHECK(rel(s.tail(r), a.tail(r) + b.tail(r)) < 1e-14);
  }
  CHECK(rel(s.moment(7.0), a.moment(7.0) + b.moment(7.0)) < 1e-14);
}

TEST_CASE("oscillating weight from the constant base") {
  RadialWeight w = build_oscillating_weight(RadialWeight(WeightSpec::constant()), 2.0, 16.0, 24);
  const OscillatingKnots* kn = w.oscillating_knots();
  REQUIRE(kn != nullptr);
  CHECK(kn->n_max == 24);
  RadialWeight nu = tilde_transform(RadialWeight(WeightSpec::constant()));
  for (int n = 0; n <= kn->n_max; ++n) {
    const double u = kn->gap[n];
    CHECK(u == std::pow(16.0, -n));
    // The tail at each knot is that of the tilde transform of the base.
    CHECK(rel(w.tail_at_gap(u), nu.tail_at_gap(u)) < 1e-14);
    // a_n = min(u_n - u_{n+1}, u_n^2 / (n+1)) / 2 for the constant base.
    CHECK(rel(kn->width[n], 0.5 * std::min(u - u / 16.0, u * u / (n + 1))) < 1e-13);
  }
  // Total mass is that of nu~ (the construction continues with nu~ past the last knot).
  CHECK(rel(w.tail(0.0), 1.0) < 1e-12);
  CHECK(rel(quadrature_tail(w, 0.0), 1.0) < 1e-9);

  // Running integral of w^{p'} up to t_n (plateaus 0..n) dominates sum_{m<=n} (m+1).
  double running = 0.0;
  for (int n = 0; n <= 9; ++n) {
    running = std::exp(w.log_integrate_power(2.0, kn->gap[n + 1], 1.0));
    CHECK(running >= (n + 1) * (n + 2) / 2.0);
  }
  CHECK(running >= 55.0);
}

TEST_CASE("oscillating tail stays comparable to the base tail") {
  RadialWeight base(WeightSpec::standard(1.0));
  RadialWeight w = build_oscillating_weight(base, 2.0, 0.0, 30);
  CHECK(w.spec().K == 2.0);
  double lo = 1e300, hi = 0.0;
  for (int j = 0; j <= 4 * 30; ++j) {
    const double u = std::exp2(-j / 4.0);
    const double q = w.tail_at_gap(u) / base.tail_at_gap(u);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo < 20.0);
}

TEST_CASE("oscillating construction reports underflow depth") {
  // Exponential base: the tail of nu~ underflows long before n = 200.
  try {
    build_oscillating_weight(RadialWeight(WeightSpec::exponential(1.0)), 2.0, 2.0, 200);
    FAIL("expected ConstructionError");
  } catch (const ConstructionError& e) {
    CHECK(e.achieved_depth() > 0);
    CHECK(e.achieved_depth() < 200);
  }
}

TEST_CASE("weight spec JSON round trip and validation") {
  for (const auto& spec : builtin_specs()) {
    nlohmann::json j = spec;
    const WeightSpec back = j.get<WeightSpec>();
    CHECK(back == spec);
    CHECK(nlohmann::json(back).dump() == j.dump());
  }
  auto j = nlohmann::json::parse(R"({"kind":"oscillating","base":{"kind":"constant"},"p":2.0,"K":16.0,"n_max":24})");
  CHECK(j.get<WeightSpec>().K == 16.0);
  CHECK_THROWS_AS(WeightSpec::standard(-1.0), DomainError);
  CHECK_THROWS_AS(WeightSpec::exponential(0.0), DomainError);
  CHECK_THROWS_AS(WeightSpec::piecewise_step({0.5, 0.2}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"kind":"nope"})").get<WeightSpec>(), DomainError);
}

TEST_CASE("log moments stay accurate at huge indices") {
  // references from 40-digit log Beta
  CHECK(RadialWeight(WeightSpec::standard(-0.5)).log_moment(999.0) ==
        doctest::Approx(-2.881387696571576770726).epsilon(1e-13));
  CHECK(RadialWeight(WeightSpec::standard(1.5)).log_moment(1e8 - 1.0) ==
        doctest::Approx(-45.76701900815799439573).epsilon(1e-13));
  CHECK(RadialWeight(WeightSpec::standard(2.0)).log_moment(49999.0) ==
        doctest::Approx(-31.76624767167092802192).epsilon(1e-13));
  const double huge = RadialWeight(WeightSpec::standard(-0.5)).log_moment(1e200);
  CHECK(huge == doctest::Approx(std::lgamma(0.5) - 0.5 * std::log(1e200)).epsilon(1e-14));
}

TEST_CASE("tilde of an oscillating weight resolves its narrow plateaus") {
  RadialWeight w = build_oscillating_weight(RadialWeight(WeightSpec::standard(1.0)), 2.0, 2.0, 48);
  RadialWeight t = tilde_transform(w);
  std::vector<double> ratio;
  for (int j = 0; j <= 80; ++j) {
    const double u = std::exp2(-j / 4.0);
    ratio.push_back(std::exp(t.log_tail_at_gap(u) - w.log_tail_at_gap(u)));
    CHECK(ratio.back() > 0.2);
    CHECK(ratio.back() < 1.0);
  }
  // power base and K = 2: the profile repeats under u -> u / 2 (4 grid steps) once the knots are dense
  for (int j = 40; j + 4 <= 80; ++j) CHECK(ratio[j + 4] == doctest::Approx(ratio[j]).epsilon(1e-6));
  // mass check: the tilde tail at u = 1 is the integral of the tail against du/u
  CHECK(t.tail_at_gap(1.0) == doctest::Approx(w.integrate_against([](double u) { return -std::log(u); }, 0.0, 1.0)).epsilon(1e-7));
}
