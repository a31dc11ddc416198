#include "doctest.h"

#include "weightlab/errors.hpp"
#include "weightlab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace weightlab;

namespace {

CoefficientSeries random_poly(std::mt19937_64& rng, int degree, bool nonneg) {
  std::uniform_real_distribution<double> u(nonneg ? 0.0 : -1.0, 1.0);
  std::vector<double> c(degree + 1);
  for (auto& v : c) v = u(rng);
  return CoefficientSeries(c);
}

}  // namespace

TEST_CASE("coefficient series arithmetic") {
  CoefficientSeries a(std::vector<double>{1.0, 2.0});
  CoefficientSeries b(std::vector<double>{0.5, 0.0, 3.0});
  const auto s = a + b;
  CHECK(s.degree() == 2);
  CHECK(s[0] == 1.5);
  CHECK(s[2] == 3.0);
  CHECK((2.0 * a)[1] == 4.0);
  CHECK((b - b).degree() == 2);
  CHECK(b.evaluate(2.0) == doctest::Approx(12.5));
  CHECK(b.evaluate(std::complex<double>(0.0, 1.0)) == std::complex<double>(-2.5, 0.0));
  CHECK(b.derivative().to_vector() == std::vector<double>{0.0, 6.0});
  CHECK(CoefficientSeries::monomial(3).degree() == 3);
  nlohmann::json j = b;
  CHECK(j.get<CoefficientSeries>() == b);
  CHECK(to_csv(a) == "n,coefficient\n0,1\n1,2\n");
}

TEST_CASE("matrix recovers the classical Hilbert matrix") {
  const auto m = matrix(RadialWeight(WeightSpec::constant()), 64);
  double err = 0.0;
  for (int n = 0; n < 64; ++n) {
    for (int k = 0; k < 64; ++k) err = std::max(err, std::abs(m.entries(n, k) - 1.0 / (n + k + 1)));
  }
  CHECK(err < 1e-12);
  CHECK(m.entries(2, 1) == doctest::Approx(0.25).epsilon(1e-14));

  RadialWeight b1(WeightSpec::standard(1.0));
  const auto mb = matrix(b1, 16);
  CHECK(mb.entries(0, 0) == doctest::Approx(1.5).epsilon(1e-13));
  for (int n = 0; n < 16; ++n) {
    for (int k = 0; k < 16; ++k) {
      CHECK(mb.entries(n, k) > 0.0);
      const double rebuilt = mb.entries(n, k) * 2.0 * (n + 1) * b1.moment(2.0 * n + 1);
      CHECK(rebuilt == doctest::Approx(b1.moment(n + k)).epsilon(1e-12));
    }
  }
  nlohmann::json j = mb;
  CHECK(j["entries"].size() == 16);
  const std::string csv = to_csv(matrix(RadialWeight(WeightSpec::constant()), 2));
  CHECK(csv.rfind("1,0.5\n0.5,0.333333333333333", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("apply_series") {
  RadialWeight one(WeightSpec::constant());
  const auto h1 = apply_series(one, CoefficientSeries::monomial(0), 50);
  for (int n = 0; n < 50; ++n) CHECK(h1[n] == doctest::Approx(1.0 / (n + 1)).epsilon(1e-13));
  const auto hk = apply_series(one, CoefficientSeries::monomial(7), 20);
  for (int n = 0; n < 20; ++n) CHECK(hk[n] == doctest::Approx(1.0 / (n + 8)).epsilon(1e-13));

  std::mt19937_64 rng(7);
  for (const auto& spec : {WeightSpec::standard(1.0), WeightSpec::exponential(1.0)}) {
    RadialWeight w(spec);
    const auto f = random_poly(rng, 20, false), g = random_poly(rng, 30, false);
    const auto lhs = apply_series(w, 2.0 * f + g, 24);
    const auto rhs = 2.0 * apply_series(w, f, 24) + apply_series(w, g, 24);
    for (int n = 0; n < 24; ++n) CHECK(lhs[n] == doctest::Approx(rhs[n]).epsilon(1e-10).scale(1.0));
    const auto pos = apply_series(w, random_poly(rng, 25, true), 40);
    CHECK(pos.nonnegative());
  }
  CHECK_THROWS_AS(apply_series(one, CoefficientSeries::monomial(0), 0), DomainError);
}

TEST_CASE("sublinear and quadrature paths") {
  RadialWeight one(WeightSpec::constant());
  const CoefficientSeries lin(std::vector<double>{1.0, -1.0});
  const auto s = apply_sublinear(one, lin, 20);
  for (int n = 0; n < 20; ++n) CHECK(s[n] == doctest::Approx(1.0 / ((n + 1.0) * (n + 2.0))).epsilon(1e-10));

  const auto q1 = apply_quadrature(one, [](double) { return 1.0; }, 20);
  for (int n = 0; n < 20; ++n) CHECK(q1[n] == doctest::Approx(1.0 / (n + 1)).epsilon(1e-10));

  std::mt19937_64 rng(11);
  for (const auto& spec : {WeightSpec::constant(), WeightSpec::standard(1.0), WeightSpec::exponential(1.0)}) {
    RadialWeight w(spec);
    const auto f = random_poly(rng, 40, true);
    const auto a = apply_series(w, f, 32);
    const auto b = apply_sublinear(w, f, 32);
    const auto c = apply_quadrature(w, [&](double t) { return f.evaluate(t); }, 32);
    for (int n = 0; n < 32; ++n) {
      CHECK(std::abs(a[n] - b[n]) < 1e-8);
      CHECK(std::abs(a[n] - c[n]) < 1e-8);
    }
    const auto g = random_poly(rng, 40, false);
    const auto gs = apply_series(w, g, 32);
    const auto gl = apply_sublinear(w, g, 32);
    for (int n = 0; n < 32; ++n) CHECK(gl[n] >= std::abs(gs[n]) - 1e-10);
  }
}

TEST_CASE("series and quadrature paths agree on random polynomials") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> deg(0, 64);
  for (const auto& spec : {WeightSpec::constant(), WeightSpec::standard(1.0), WeightSpec::exponential(1.0)}) {
    RadialWeight w(spec);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto f = random_poly(rng, deg(rng), false);
      const auto a = apply_series(w, f, 16);
      const auto c = apply_quadrature(w, [&](double t) { return f.evaluate(t); }, 16);
      for (int n = 0; n < 16; ++n) worst = std::max(worst, std::abs(a[n] - c[n]));
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("kernel series") {
  RadialWeight one(WeightSpec::constant());
  CHECK(kernel_eval(one, KernelKind::B, 0.0, {0.3, 0.4}, 10).value == std::complex<double>(1.0, 0.0));
  // unit weight: 2(n+1) w_{2n+1} = 1, so K(t, z) = 1 / (1 - tz)
  const auto k = kernel_eval(one, KernelKind::K, 0.5, 0.5, 1000);
  CHECK(k.value.real() == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  CHECK(k.tail_bound <= 1e-10);
  CHECK(kernel_eval(one, KernelKind::G, 0.0, 0.7, 10).value == std::complex<double>(0.0, 0.0));

  const std::complex<double> z(0.3, -0.5);
  const double t = 0.8;
  const auto kz = kernel_eval(one, KernelKind::K, t, z, 5000);
  const std::complex<double> tz = t * z;
  CHECK(std::abs(kz.value - 1.0 / (1.0 - tz)) < 1e-9);
  const auto bz = kernel_eval(one, KernelKind::B, t, z, 5000);
  const std::complex<double> b_exact = 1.0 / ((1.0 - tz) * (1.0 - tz));
  CHECK(std::abs(bz.value - b_exact) < 1e-9);

  RadialWeight b1(WeightSpec::standard(1.0));
  const double h = 1e-5;
  const auto gp = kernel_eval(b1, KernelKind::G, t, z, 5000);
  const auto kp = kernel_eval(b1, KernelKind::K, t, z + h, 5000, 1e-13);
  const auto km = kernel_eval(b1, KernelKind::K, t, z - h, 5000, 1e-13);
  CHECK(std::abs(gp.value - (kp.value - km.value) / (2 * h)) < 1e-6);

  CHECK_THROWS_AS(kernel_eval(one, KernelKind::K, 0.999999, 0.999999, 100), AccuracyError);
  CHECK_THROWS_AS(kernel_eval(one, KernelKind::K, 1.0, 0.5, 100), DomainError);
  CHECK_THROWS_AS(kernel_eval(one, KernelKind::K, 0.5, 1.0, 100), DomainError);
  CHECK(kernel_kind_from_string("G") == KernelKind::G);
  CHECK_THROWS_AS(kernel_kind_from_string("X"), DomainError);
}

TEST_CASE("H(1) dominates the logarithmic lower bound") {
  for (const auto& spec : {WeightSpec::constant(), WeightSpec::standard(0.5), WeightSpec::standard(2.0),
                           WeightSpec::exponential(1.0)}) {
    const auto h = apply_series(RadialWeight(spec), CoefficientSeries::monomial(0), 4096);
    for (double x : {0.1, 0.5, 0.9, 0.99}) {
      CHECK(h.evaluate(x) >= std::log(1.0 / (1.0 - x)) / (2.0 * x));
    }
  }
}
