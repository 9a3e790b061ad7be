#pragma once

#include <vector>

namespace meshopt {

// Quadrature rule on the master simplex {xi_i >= 0, sum xi_i <= 1}.
// Weights sum to the simplex measure (1/2 in 2D, 1/6 in 3D).
struct QuadratureRule {
  int dim = 0;
  int exactness = 0;                 // polynomial order integrated exactly
  std::vector<double> points;        // n_q * dim, point-major
  std::vector<double> weights;       // n_q

  int size() const { return static_cast<int>(weights.size()); }
  const double* point(int q) const { return points.data() + static_cast<size_t>(q) * static_cast<size_t>(dim); }
};

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

// Rule exact for all polynomials of total order `order` on the master simplex,
// built by collapsing tensor-product Gauss rules. All points are interior and
// all weights positive.
QuadratureRule simplex_quadrature(int dim, int order);

// Rule used by the distortion integrals for elements of the given degree:
// exact at least to order 2*degree + 2.
QuadratureRule quadrature_for(int dim, int degree);

}  // namespace meshopt
