#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meshopt/quadrature.hpp"

using namespace meshopt;

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// int over the master triangle of x^a y^b, and master tet of x^a y^b z^c
double tri_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }
double tet_monomial(int a, int b, int c) { return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3); }

double integrate(const QuadratureRule& r, int a, int b, int c) {
  double s = 0;
  for (int q = 0; q < r.size(); ++q) {
    const double* p = r.point(q);
    double v = 1;
    for (int t = 0; t < a; ++t) v *= p[0];
    for (int t = 0; t < b; ++t) v *= p[1];
    if (r.dim == 3)
      for (int t = 0; t < c; ++t) v *= p[2];
    s += r.weights[static_cast<size_t>(q)] * v;
  }
  return s;
}

}  // namespace

TEST_CASE("weights sum to the simplex measure") {
  CHECK(integrate(quadrature_for(2, 1), 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate(quadrature_for(3, 1), 0, 0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("degree-2 rule integrates xi1^2 xi2^2 exactly") {
  const QuadratureRule r = quadrature_for(2, 2);
  CHECK(integrate(r, 2, 2, 0) == doctest::Approx(1.0 / 180.0).epsilon(1e-13));
}

TEST_CASE("rules are exact for all monomials up to their stated order") {
  for (int deg = 1; deg <= 8; ++deg) {
    const QuadratureRule r = quadrature_for(2, deg);
    REQUIRE(r.exactness >= 2 * deg + 2);
    for (int a = 0; a + 0 <= r.exactness; ++a)
      for (int b = 0; a + b <= r.exactness; ++b)
        CHECK(integrate(r, a, b, 0) == doctest::Approx(tri_monomial(a, b)).epsilon(1e-11));
  }
  for (int deg = 1; deg <= 4; ++deg) {
    const QuadratureRule r = quadrature_for(3, deg);
    for (int a = 0; a <= r.exactness; ++a)
      for (int b = 0; a + b <= r.exactness; ++b)
        for (int c = 0; a + b + c <= r.exactness; ++c)
          CHECK(integrate(r, a, b, c) == doctest::Approx(tet_monomial(a, b, c)).epsilon(1e-11));
  }
}

TEST_CASE("points interior, weights positive") {
  for (int dim : {2, 3})
    for (int deg : {1, 4, 8}) {
      const QuadratureRule r = quadrature_for(dim, deg);
      for (int q = 0; q < r.size(); ++q) {
        CHECK(r.weights[static_cast<size_t>(q)] > 0.0);
        double s = 0;
        for (int a = 0; a < dim; ++a) {
          CHECK(r.point(q)[a] > 0.0);
          s += r.point(q)[a];
        }
        CHECK(s < 1.0);
      }
    }
}
