#include "meshopt/metric.hpp"

#include <cmath>
#include <stdexcept>

namespace meshopt {

namespace {

constexpr double two_pi = 2.0 * M_PI;

// k-th derivative of cos(2 pi x).
double cosd(double x, int k) {
  const double f = std::pow(two_pi, k);
  switch (k % 4) {
    case 0: return f * std::cos(two_pi * x);
    case 1: return -f * std::sin(two_pi * x);
    case 2: return -f * std::cos(two_pi * x);
    default: return f * std::sin(two_pi * x);
  }
}

// Cosine factor with derivative order k; index -1 stands for the constant 1.
double cfac(const double* p, int idx, int k) {
  if (idx < 0) return k == 0 ? 1.0 : 0.0;
  return cosd(p[idx], k);
}

double sgn(double t) { return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0); }

}  // namespace

double MapComponent::value(const double* p) const {
  if (linear) return p[a];
  return scale * (10.0 * p[a] - cfac(p, b, 0) * cfac(p, c, 0));
}

double MapComponent::deriv1(const double* p, int m) const {
  if (linear) return m == a ? 1.0 : 0.0;
  double v = m == a ? 10.0 : 0.0;
  const int kb = (m == b), kc = (m == c);
  if (kb + kc == 1) v -= cfac(p, b, kb) * cfac(p, c, kc);
  return scale * v;
}

double MapComponent::deriv2(const double* p, int m, int l) const {
  if (linear) return 0.0;
  const int kb = (m == b) + (l == b), kc = (m == c) + (l == c);
  if (kb + kc != 2) return 0.0;
  return -scale * cfac(p, b, kb) * cfac(p, c, kc);
}

double MapComponent::deriv3(const double* p, int m, int l, int o) const {
  if (linear) return 0.0;
  const int kb = (m == b) + (l == b) + (o == b), kc = (m == c) + (l == c) + (o == c);
  if (kb + kc != 3) return 0.0;
  return -scale * cfac(p, b, kb) * cfac(p, c, kc);
}

double size_h(double t, double h_min, double gamma_metric) { return h_min + gamma_metric * std::abs(t); }

double stretch_H(double t, double h_min, double gamma_metric) {
  return std::log(size_h(t, h_min, gamma_metric) / h_min) / gamma_metric;
}

SmallMat diagonal_metric(const ShearLayerSpec& spec, const double* t) {
  SmallMat d = SmallMat::identity(spec.dim);
  auto w = [&](double x) {
    const double h = size_h(x, spec.h_min, spec.gamma_metric);
    return 1.0 / (h * h);
  };
  if (spec.kind == LayerKind::line) {
    d(spec.dim - 1, spec.dim - 1) = w(t[spec.dim - 1]);
  } else {
    for (int r = 0; r < spec.dim; ++r) d(r, r) = w(t[r]);
  }
  return d;
}

void ShearLayerMetric::eval(const double* p, SmallMat& m) const {
  const int d = spec_.dim;
  double t[3] = {0, 0, 0};
  for (int r = 0; r < d; ++r) t[r] = spec_.map[static_cast<size_t>(r)].value(p);
  const SmallMat dm = diagonal_metric(spec_, t);
  SmallMat jac(d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) jac(r, s) = spec_.map[static_cast<size_t>(r)].deriv1(p, s);
  m = SmallMat(d);
  for (int s = 0; s < d; ++s)
    for (int u = 0; u < d; ++u) {
      double sum = 0;
      for (int r = 0; r < d; ++r) sum += jac(r, s) * dm(r, r) * jac(r, u);
      m(s, u) = sum;
    }
}

void ShearLayerMetric::eval_derivs(const double* p, SmallMat& m, SmallMat* dmc, SmallMat* d2m) const {
  const int d = spec_.dim;
  const auto& map = spec_.map;

  double t[3];
  SmallMat jac(d);
  SmallMat hess[3];
  double third[3][3][3][3];  // third[r](s,c,e)
  for (int r = 0; r < d; ++r) {
    t[r] = map[static_cast<size_t>(r)].value(p);
    hess[r] = SmallMat(d);
    for (int s = 0; s < d; ++s) {
      jac(r, s) = map[static_cast<size_t>(r)].deriv1(p, s);
      for (int c = 0; c < d; ++c) {
        hess[r](s, c) = map[static_cast<size_t>(r)].deriv2(p, s, c);
        for (int e = 0; e < d; ++e) third[r][s][c][e] = map[static_cast<size_t>(r)].deriv3(p, s, c, e);
      }
    }
  }

  // Layer entries d_r depend on a single deformed coordinate t[beta_r]
  // (beta_r = -1 when constant); w(t) = 1/h(t)^2.
  double dval[3], d1[3], d2[3];
  int beta[3];
  for (int r = 0; r < d; ++r) {
    const bool active = spec_.kind == LayerKind::cross || r == d - 1;
    beta[r] = active ? (spec_.kind == LayerKind::cross ? r : d - 1) : -1;
    if (!active) {
      dval[r] = 1.0;
      d1[r] = d2[r] = 0.0;
    } else {
      const double x = t[beta[r]];
      const double h = size_h(x, spec_.h_min, spec_.gamma_metric);
      const double hp = spec_.gamma_metric * sgn(x);
      dval[r] = 1.0 / (h * h);
      d1[r] = -2.0 * hp / (h * h * h);
      d2[r] = 6.0 * hp * hp / (h * h * h * h);
    }
  }

  m = SmallMat(d);
  for (int c = 0; c < d; ++c) dmc[c] = SmallMat(d);
  for (int c = 0; c < d; ++c)
    for (int e = 0; e < d; ++e) d2m[c * d + e] = SmallMat(d);

  for (int s = 0; s < d; ++s)
    for (int u = 0; u < d; ++u) {
      double v = 0;
      for (int r = 0; r < d; ++r) v += jac(r, s) * dval[r] * jac(r, u);
      m(s, u) = v;

      for (int c = 0; c < d; ++c) {
        double g = 0;
        for (int r = 0; r < d; ++r) {
          g += dval[r] * (hess[r](s, c) * jac(r, u) + jac(r, s) * hess[r](u, c));
          if (beta[r] >= 0) g += d1[r] * jac(beta[r], c) * jac(r, s) * jac(r, u);
        }
        dmc[c](s, u) = g;
      }

      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          double q = 0;
          for (int r = 0; r < d; ++r) {
            q += dval[r] * (third[r][s][c][e] * jac(r, u) + hess[r](s, c) * hess[r](u, e) +
                            hess[r](s, e) * hess[r](u, c) + jac(r, s) * third[r][u][c][e]);
            if (beta[r] >= 0) {
              const int br = beta[r];
              q += d1[r] * ((hess[r](s, c) * jac(r, u) + jac(r, s) * hess[r](u, c)) * jac(br, e) +
                            (hess[r](s, e) * jac(r, u) + jac(r, s) * hess[r](u, e)) * jac(br, c) +
                            jac(r, s) * jac(r, u) * hess[br](c, e));
              q += d2[r] * jac(br, c) * jac(br, e) * jac(r, s) * jac(r, u);
            }
          }
          d2m[c * d + e](s, u) = q;
        }
    }
}

SmallMat metric_eval(const ShearLayerSpec& spec, const double* p) {
  ShearLayerMetric field(spec);
  SmallMat m(spec.dim);
  field.eval(p, m);
  return m;
}

double aniso_ratio(const SmallMat& m) {
  const auto ev = sym_eigenvalues(m);
  const double lo = ev[0], hi = ev[static_cast<size_t>(m.d - 1)];
  if (lo <= 0.0) throw std::invalid_argument("aniso_ratio: matrix is not positive definite");
  return std::sqrt(hi / lo);
}

double aniso_quotient(const SmallMat& m) {
  const auto ev = sym_eigenvalues(m);
  const double lo = ev[0];
  if (lo <= 0.0) throw std::invalid_argument("aniso_quotient: matrix is not positive definite");
  return std::sqrt(m.det()) / std::pow(lo, m.d / 2.0);
}

std::vector<ShearLayerSpec> builtin_metrics() {
  const double s2 = 1.0 / std::sqrt(100.0 + 4.0 * M_PI * M_PI);
  const double s3 = 1.0 / std::sqrt(100.0 + 8.0 * M_PI * M_PI);
  std::vector<ShearLayerSpec> specs;
  specs.push_back({"Line", 2, LayerKind::line, 0.01, 2.0, {MapComponent::coord(0), MapComponent::coord(1)}});
  specs.push_back({"Curve", 2, LayerKind::line, 0.01, 2.0,
                   {MapComponent::coord(0), MapComponent::layered(1, 0, -1, s2)}});
  specs.push_back({"Curves", 2, LayerKind::cross, 0.01, 2.0,
                   {MapComponent::layered(0, 1, -1, s2), MapComponent::layered(1, 0, -1, s2)}});
  specs.push_back({"Plane", 3, LayerKind::line, 0.02, 2.0,
                   {MapComponent::coord(0), MapComponent::coord(1), MapComponent::coord(2)}});
  specs.push_back({"Surface", 3, LayerKind::line, 0.02, 2.0,
                   {MapComponent::coord(0), MapComponent::coord(1), MapComponent::layered(2, 1, 0, s3)}});
  specs.push_back({"Surfaces", 3, LayerKind::cross, 0.02, 2.0,
                   {MapComponent::layered(0, 1, 2, s3), MapComponent::layered(1, 2, 0, s3),
                    MapComponent::layered(2, 1, 0, s3)}});
  return specs;
}

ShearLayerSpec builtin_metric(const std::string& name) {
  for (auto& s : builtin_metrics())
    if (s.name == name) return s;
  throw std::invalid_argument("builtin_metric: unknown metric '" + name + "'");
}

}  // namespace meshopt
