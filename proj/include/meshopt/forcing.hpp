#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "meshopt/linear.hpp"

namespace meshopt {

// Dynamic residual and curvature tolerances for the inexact Newton direction.
// The values of the first accepted step are cached on first use.
struct ForcingState {
  double eta = 0.5;
  double tau = 0.01;
  double eta_max = 0.5;
  double tau_max = 0.01;
  bool have_initial = false;
  double s0_norm = 0.0;
  double kappa0 = 0.0;
};

// Constant tolerances of the baseline inexact Newton method.
inline std::pair<double, double> standard_forcing() { return {1e-9, 0.0}; }

// Orthonormal basis of span{v1, v2}; the second column is dropped when v2 is
// numerically parallel to v1 (or zero).
struct OrthoBasis {
  int cols = 0;
  std::vector<double> z1, z2;
};

OrthoBasis gram_schmidt_2(std::span<const double> v1, std::span<const double> v2);

struct RestrictedNewton {
  int dim = 0;           // 1 or 2
  double q[2] = {0, 0};  // coordinates of the restricted direction in the basis
  double q_norm = 0;
  double kappa = 0;      // normalized curvature of the pre-projected direction
};

// Newton equation projected onto the basis Z; the products H z_j flow through
// the operator and are charged to its counter.
RestrictedNewton restricted_newton(std::span<const double> g, const LinearOperator& h, const OrthoBasis& z);

// eta_k = |q_k| / |s_0|, tau_k = |kappa_k| / |kappa_0|, clamped by the
// safeguards eta <= eta_max and tau <= min(tau_max, eta). Throws when either
// restricted system degenerates; the caller keeps the previous values.
std::pair<double, double> forcing_update(ForcingState& state, std::span<const double> s0,
                                         std::span<const double> g0, const LinearOperator& h0,
                                         std::span<const double> s_k, std::span<const double> g_k,
                                         const LinearOperator& h_k);

// Rayleigh quotient of the preconditioner solve M q = -g, approximating the
// curvature of the Newton direction.
double incomplete_newton_curvature(std::span<const double> g,
                                   const std::function<void(std::span<const double>, std::span<double>)>& preconfun);

inline bool limited_curvature_violated(double php, double pp, double eps) { return std::abs(php) > 100.0 * eps * pp; }

// |p^T H p| > 100 eps p^T p; the product is charged to the operator.
bool limited_curvature_check(std::span<const double> p, const LinearOperator& h, double eps);

}  // namespace meshopt
