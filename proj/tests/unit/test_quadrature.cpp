#include <cmath>
#include <numeric>

#include "doctest.h"
#include "dcrm/errors.hpp"
#include "dcrm/quadrature.hpp"
#include "oracles.hpp"

using namespace dcrm;

TEST_SUITE("quadrature") {
  TEST_CASE("Simpson 2D weights follow the tensor pattern") {
    const std::size_t n = 33;
    const ScalarField2D w = simpson_weights_2d(n);
    const double c = 1.0 / (9.0 * 32.0 * 32.0);
    CHECK(w(0, 0) == c);
    CHECK(w(0, 1) == 4.0 * c);
    CHECK(w(1, 1) == 16.0 * c);
    CHECK(w(2, 1) == 8.0 * c);
    CHECK(w(2, 2) == 4.0 * c);
    CHECK(w(32, 32) == c);
    const auto ref = oracle::simpson_1d(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k)
        CHECK(w(r, k) == doctest::Approx(ref[r] * ref[k]).epsilon(1e-15));
  }

  TEST_CASE("Simpson integrates cubic monomials exactly") {
    const std::size_t n = 33;
    const GridSpec g(n);
    const QuadratureRule rule = QuadratureRule::make(QuadratureKind::kSimpson, g);
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b) {
        const ScalarField2D f =
            ScalarField2D::sample(g, [&](double x, double y) { return std::pow(x, a) * std::pow(y, b); });
        const double exact = 1.0 / ((a + 1.0) * (b + 1.0));
        CHECK(std::abs(integrate_2d(rule, f) - exact) <= 1e-12);
      }
  }

  TEST_CASE("trapezoid weights and exactness on bilinear fields") {
    const GridSpec g(9);
    const auto w = trapezoid_weights_1d(9);
    const auto ref = oracle::trapezoid_1d(9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(w[i] == doctest::Approx(ref[i]).epsilon(1e-15));
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    const QuadratureRule rule = QuadratureRule::make(QuadratureKind::kTrapezoid, g);
    const ScalarField2D f = ScalarField2D::sample(g, [](double x, double y) { return 1 + x + 2 * x * y; });
    CHECK(integrate_2d(rule, f) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(trapezoid_weights_2d(8).rows() == 8);
  }

  TEST_CASE("boundary integral along an edge") {
    const GridSpec g(17);
    const QuadratureRule rule = QuadratureRule::make(QuadratureKind::kSimpson, g);
    std::vector<double> edge(17);
    for (std::size_t i = 0; i < 17; ++i) edge[i] = std::pow(g.coord(static_cast<std::ptrdiff_t>(i)), 3);
    CHECK(integrate_boundary(rule, edge) == doctest::Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("Simpson needs an odd number of points") {
    CHECK_THROWS_AS(simpson_weights_1d(32), ConfigError);
    CHECK_THROWS_AS(simpson_weights_2d(128), ConfigError);
    CHECK_THROWS_AS(simpson_weights_1d(1), ConfigError);
    CHECK_NOTHROW(simpson_weights_1d(3));
  }

  TEST_CASE("names") {
    CHECK(parse_quadrature("simpson") == QuadratureKind::kSimpson);
    CHECK(parse_quadrature("trapezoid") == QuadratureKind::kTrapezoid);
    CHECK(to_string(QuadratureKind::kSimpson) == "simpson");
    CHECK_THROWS_AS(parse_quadrature("gauss"), ConfigError);
  }
}
