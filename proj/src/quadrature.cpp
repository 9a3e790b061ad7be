#include "meshopt/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace meshopt {

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be positive");
  x.assign(static_cast<size_t>(n), 0.0);
  w.assign(static_cast<size_t>(n), 0.0);
  // Nodes on [-1,1] by Newton iteration from the Chebyshev initial guess.
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      if (n == 1) p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? t : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (t * pn - pm) / (t * t - 1.0);
      const double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[static_cast<size_t>(i)] = 0.5 * (1.0 + t);
    w[static_cast<size_t>(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

static int points_for_degree(int deg) { return deg / 2 + 1; }  // 2n-1 >= deg

QuadratureRule simplex_quadrature(int dim, int order) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("simplex_quadrature: dim must be 2 or 3");
  QuadratureRule rule;
  rule.dim = dim;
  rule.exactness = order;
  if (dim == 2) {
    // xi = (u (1-v), v); the Jacobian (1-v) raises the v-degree by one.
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre_01(points_for_degree(order), xu, wu);
    gauss_legendre_01(points_for_degree(order + 1), xv, wv);
    for (size_t j = 0; j < xv.size(); ++j)
      for (size_t i = 0; i < xu.size(); ++i) {
        const double u = xu[i], v = xv[j];
        rule.points.push_back(u * (1.0 - v));
        rule.points.push_back(v);
        rule.weights.push_back(wu[i] * wv[j] * (1.0 - v));
      }
  } else {
    // xi1 = a, xi2 = b (1-a), xi3 = c (1-a)(1-b); Jacobian (1-a)^2 (1-b).
    std::vector<double> xa, wa, xb, wb, xc, wc;
    gauss_legendre_01(points_for_degree(order + 2), xa, wa);
    gauss_legendre_01(points_for_degree(order + 1), xb, wb);
    gauss_legendre_01(points_for_degree(order), xc, wc);
    for (size_t k = 0; k < xc.size(); ++k)
      for (size_t j = 0; j < xb.size(); ++j)
        for (size_t i = 0; i < xa.size(); ++i) {
          const double a = xa[i], b = xb[j], c = xc[k];
          rule.points.push_back(a);
          rule.points.push_back(b * (1.0 - a));
          rule.points.push_back(c * (1.0 - a) * (1.0 - b));
          rule.weights.push_back(wa[i] * wb[j] * wc[k] * (1.0 - a) * (1.0 - a) * (1.0 - b));
        }
  }
  return rule;
}

QuadratureRule quadrature_for(int dim, int degree) {
  return simplex_quadrature(dim, 2 * degree + 2);
}

}  // namespace meshopt
