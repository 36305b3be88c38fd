#include "catch_amalgamated.hpp"

#include <cmath>

#include "expbasis/quadrature.hpp"

using namespace expbasis;
using Catch::Approx;

TEST_CASE("gauss_legendre node basics", "[quadrature]") {
  for (int n : {1, 2, 5, 16, 64}) {
    const GLRule& r = gauss_legendre(n);
    REQUIRE(r.x.size() == std::size_t(n));
    double wsum = 0.0;
    for (double w : r.w) {
      REQUIRE(w > 0.0);
      wsum += w;
    }
    REQUIRE(wsum == Approx(2.0).epsilon(1e-14));
    // nodes sorted, symmetric
    for (std::size_t i = 0; i + 1 < r.x.size(); ++i) REQUIRE(r.x[i] < r.x[i + 1]);
    for (std::size_t i = 0; i < r.x.size(); ++i)
      REQUIRE(r.x[i] == Approx(-r.x[r.x.size() - 1 - i]).margin(1e-15));
  }
  REQUIRE(gauss_legendre(5).x[2] == 0.0);
  REQUIRE_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  REQUIRE_THROWS_AS(gauss_legendre(5000), std::invalid_argument);
}

TEST_CASE("known 3-point rule", "[quadrature]") {
  const GLRule& r = gauss_legendre(3);
  REQUIRE(r.x[2] == Approx(std::sqrt(0.6)).epsilon(1e-15));
  REQUIRE(r.w[2] == Approx(5.0 / 9.0).epsilon(1e-15));
  REQUIRE(r.w[1] == Approx(8.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("polynomial exactness up to degree 2n-1", "[quadrature]") {
  const GLRule& r = gauss_legendre(5);
  // int_{-1}^{1} x^8 dx = 2/9, degree 8 <= 9
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    s += r.w[i] * std::pow(r.x[i], 8);
  REQUIRE(s == Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("integrate_panel on smooth integrands", "[quadrature]") {
  const GLRule& r = gauss_legendre(20);
  double v = integrate_panel([](double x) { return std::cos(x); }, 0.0,
                             M_PI / 2.0, r);
  REQUIRE(v == Approx(1.0).epsilon(1e-15));
  v = integrate_panel([](double x) { return std::exp(-x * x); }, -6.0, 6.0,
                      gauss_legendre(64));
  REQUIRE(v == Approx(std::sqrt(M_PI)).epsilon(1e-13));
}

TEST_CASE("integrate_edges splits into panels", "[quadrature]") {
  const GLRule& r = gauss_legendre(8);
  std::vector<double> edges = {0.0, 0.7, 2.0};
  double v = integrate_edges([](double x) { return x * x * x; }, edges, r);
  REQUIRE(v == Approx(4.0).epsilon(1e-14));
}

TEST_CASE("integrate_adaptive resolves a sharp peak", "[quadrature]") {
  // int_{-1}^{1} dx/(x^2 + a^2) = (2/a) atan(1/a), brutal for a fixed rule
  double a = 0.01;
  double exact = 2.0 / a * std::atan(1.0 / a);
  double v = integrate_adaptive([a](double x) { return 1.0 / (x * x + a * a); },
                                -1.0, 1.0, gauss_legendre(12), 1e-12);
  REQUIRE(v == Approx(exact).epsilon(1e-10));
  // zero integrand terminates through the absolute floor
  double z = integrate_adaptive([](double) { return 0.0; }, 0.0, 1.0,
                                gauss_legendre(4), 1e-12);
  REQUIRE(z == 0.0);
}
