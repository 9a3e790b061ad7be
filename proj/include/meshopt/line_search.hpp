#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace meshopt {

struct LineSearchConfig {
  double c_min = 1e-4;
  double c_max = 0.25;
  double gamma_ls = 2.0;
  double alpha_min = std::pow(2.0, -20);
  int max_amplify = 60;
};

struct LineSearchResult {
  std::vector<double> step;
  double alpha_used = 0.0;  // step = alpha_used * p
  double next_alpha = 1.0;
  int ls_iterations = 0;  // step-length updates performed in the loops
  bool accepted = false;
  double f_new = 0.0;
  double rho = 0.0;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

// rho = (f(x) - f(x+s)) / (-s^T g); equals the Armijo margin ratio for a
// descent step. An infinite trial value maps to -infinity.
double predictor(double f_x, double f_xs, double s_dot_g);

// Halve the step until the Armijo condition with c_min holds or alpha
// underflows; the next initial step length resets to one.
LineSearchResult standard_bls(std::span<const double> x, std::span<const double> p, double alpha, double f_x,
                              const ObjectiveFn& f, std::span<const double> g, const LineSearchConfig& cfg);

// Predictor-driven search: reduce like the standard loop when rho < c_min,
// otherwise amplify while the predictor stays above c_max and the objective
// keeps decreasing. The final step length is kept across nonlinear
// iterations, halved once when the predictor ends below c_max.
LineSearchResult specific_ls(std::span<const double> x, std::span<const double> p, double alpha, double f_x,
                             const ObjectiveFn& f, std::span<const double> g, const LineSearchConfig& cfg);

}  // namespace meshopt
