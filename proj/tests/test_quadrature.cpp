#include "doctest.h"

#include "weightlab/errors.hpp"
#include "weightlab/quadrature.hpp"

#include <cmath>

using namespace weightlab;

TEST_CASE("endpoint-singular integrals") {
  CHECK(integrate_endpoint_singular([](double) { return 1.0; }, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Two-argument form receives the exact distance to the endpoint.
  const double v = integrate_endpoint_singular([](double, double gap) { return 1.0 / std::sqrt(gap); }, 0.0, 1.0);
  CHECK(std::abs(v - 2.0) < 2e-10);
  const double p = integrate_endpoint_singular([](double t) { return std::pow(t, 100); }, 0.0, 1.0);
  CHECK(std::abs(p * 101.0 - 1.0) < 1e-10);
  const double l = integrate_endpoint_singular([](double, double gap) { return std::log(gap); }, 0.0, 1.0);
  CHECK(std::abs(l + 1.0) < 1e-10);
}

TEST_CASE("divergent endpoint integral is reported as divergence") {
  bool divergent = false;
  try {
    integrate_endpoint_singular([](double, double gap) { return 1.0 / gap; }, 0.0, 1.0);
  } catch (const AccuracyError& e) {
    divergent = e.divergent();
  }
  CHECK(divergent);
}

TEST_CASE("log-domain integration far below the double range") {
  // int_0^1 exp(-1000/u) du = E_2(1000); log value from an independent
  // high-precision evaluation.
  const double v = quad::log_integrate_gap([](double u) { return -1000.0 / u; }, 0.0, 1.0);
  CHECK(std::abs(v - (-1006.90975129357526)) < 1e-9);
}

TEST_CASE("geometric splitting on wide interior ranges") {
  const auto e = quad::integrate_gap([](double u) { return 1.0 / u; }, 1e-12, 1.0);
  CHECK(std::abs(e.value - 12.0 * std::log(10.0)) < 1e-9);
}

TEST_CASE("Gauss rules are exact on polynomials") {
  const auto gl = quad::gauss_legendre(8);
  for (int k = 0; k < 16; ++k) {
    const double s = (gl.weights.array() * gl.nodes.array().pow(k)).sum();
    CHECK(std::abs(s - 1.0 / (k + 1)) < 1e-14);
  }
  for (double alpha : {-0.5, 0.0, 1.5}) {
    const auto gj = quad::gauss_jacobi(8, alpha);
    for (int k = 0; k < 16; ++k) {
      const double s = (gj.weights.array() * gj.nodes.array().pow(k)).sum();
      CHECK(std::abs(s - 1.0 / (k + alpha + 1.0)) < 1e-13);
    }
  }
}

TEST_CASE("adaptive Gauss-Kronrod on a peaked integrand") {
  // int_0^1 1/(1e-4 + (x-0.3)^2) dx
  const double e = 1e-2;
  const auto r = quad::gauss_kronrod([&](double x) { return 1.0 / (e * e + (x - 0.3) * (x - 0.3)); }, 0.0, 1.0);
  const double exact = (std::atan(0.7 / e) + std::atan(0.3 / e)) / e;
  CHECK(std::abs(r.value / exact - 1.0) < 1e-10);
}
