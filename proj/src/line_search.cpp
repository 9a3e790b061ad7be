#include "meshopt/line_search.hpp"

#include <limits>
#include <stdexcept>

#include "meshopt/linalg.hpp"

namespace meshopt {

double predictor(double f_x, double f_xs, double s_dot_g) {
  if (s_dot_g >= 0.0) throw std::invalid_argument("predictor: step is not a descent direction");
  if (std::isinf(f_xs)) return -std::numeric_limits<double>::infinity();
  return (f_x - f_xs) / (-s_dot_g);
}

namespace {

std::vector<double> trial_point(std::span<const double> x, std::span<const double> p, double alpha) {
  std::vector<double> xt(x.begin(), x.end());
  axpy(alpha, p, std::span<double>(xt));
  return xt;
}

}  // namespace

LineSearchResult standard_bls(std::span<const double> x, std::span<const double> p, double alpha, double f_x,
                              const ObjectiveFn& f, std::span<const double> g, const LineSearchConfig& cfg) {
  LineSearchResult res;
  const double pg = dot(p, g);
  if (pg >= 0.0) {
    res.step.assign(x.size(), 0.0);
    return res;
  }
  double f_try = f(trial_point(x, p, alpha));
  while (f_try > f_x + cfg.c_min * alpha * pg && alpha > cfg.alpha_min) {
    alpha /= cfg.gamma_ls;
    f_try = f(trial_point(x, p, alpha));
    res.ls_iterations++;
  }
  res.accepted = f_try <= f_x + cfg.c_min * alpha * pg;
  res.step.assign(p.begin(), p.end());
  scale(alpha, std::span<double>(res.step));
  res.alpha_used = alpha;
  res.next_alpha = 1.0;
  res.f_new = f_try;
  res.rho = std::isinf(f_try) ? -std::numeric_limits<double>::infinity() : (f_x - f_try) / (-alpha * pg);
  return res;
}

LineSearchResult specific_ls(std::span<const double> x, std::span<const double> p, double alpha, double f_x,
                             const ObjectiveFn& f, std::span<const double> g, const LineSearchConfig& cfg) {
  LineSearchResult res;
  const double pg = dot(p, g);
  if (pg >= 0.0) {
    res.step.assign(x.size(), 0.0);
    return res;
  }
  double f_s = f(trial_point(x, p, alpha));
  double rho = predictor(f_x, f_s, alpha * pg);

  if (rho < cfg.c_min) {
    while (rho < cfg.c_min && alpha > cfg.alpha_min) {
      alpha /= cfg.gamma_ls;
      f_s = f(trial_point(x, p, alpha));
      rho = predictor(f_x, f_s, alpha * pg);
      res.ls_iterations++;
    }
  } else {
    for (int amp = 0; amp < cfg.max_amplify; ++amp) {
      const double cand = cfg.gamma_ls * alpha;
      const double f_c = f(trial_point(x, p, cand));
      const double rho_c = predictor(f_x, f_c, cand * pg);
      if (!(rho_c > cfg.c_max && f_c < f_s)) break;
      alpha = cand;
      f_s = f_c;
      rho = rho_c;
      res.ls_iterations++;
    }
  }

  res.accepted = rho >= cfg.c_min;
  res.step.assign(p.begin(), p.end());
  scale(alpha, std::span<double>(res.step));
  res.alpha_used = alpha;
  res.next_alpha = rho < cfg.c_max ? alpha / cfg.gamma_ls : alpha;
  res.f_new = f_s;
  res.rho = rho;
  return res;
}

}  // namespace meshopt
