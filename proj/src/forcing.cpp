#include "meshopt/forcing.hpp"

#include <cmath>
#include <stdexcept>

#include "meshopt/linalg.hpp"

namespace meshopt {

OrthoBasis gram_schmidt_2(std::span<const double> v1, std::span<const double> v2) {
  OrthoBasis z;
  const double n1 = norm2(v1);
  if (n1 == 0.0) throw std::invalid_argument("gram_schmidt_2: first vector vanishes");
  z.z1.assign(v1.begin(), v1.end());
  scale(1.0 / n1, std::span<double>(z.z1));
  z.cols = 1;

  const double n2 = norm2(v2);
  if (n2 == 0.0) return z;
  z.z2.assign(v2.begin(), v2.end());
  const double proj = dot(z.z1, z.z2);
  axpy(-proj, z.z1, std::span<double>(z.z2));
  const double nw = norm2(z.z2);
  if (nw <= 1e-12 * n2) {
    z.z2.clear();
    return z;
  }
  scale(1.0 / nw, std::span<double>(z.z2));
  z.cols = 2;
  return z;
}

RestrictedNewton restricted_newton(std::span<const double> g, const LinearOperator& h, const OrthoBasis& z) {
  RestrictedNewton out;
  out.dim = z.cols;
  const size_t n = g.size();
  std::vector<double> hz1(n), hz2(n);
  h.apply(z.z1, hz1);
  double ht[2][2] = {{dot(z.z1, hz1), 0}, {0, 0}};
  double gt[2] = {dot(z.z1, g), 0};
  if (z.cols == 2) {
    h.apply(z.z2, hz2);
    ht[0][1] = dot(z.z1, hz2);
    ht[1][0] = dot(z.z2, hz1);
    ht[1][1] = dot(z.z2, hz2);
    gt[1] = dot(z.z2, g);
  }

  double scale_ref = std::abs(ht[0][0]);
  if (z.cols == 2)
    scale_ref = std::max({scale_ref, std::abs(ht[0][1]), std::abs(ht[1][0]), std::abs(ht[1][1])});
  if (z.cols == 1) {
    if (std::abs(ht[0][0]) <= 1e-14 * std::max(scale_ref, 1e-300))
      throw std::runtime_error("restricted_newton: singular restricted system");
    out.q[0] = -gt[0] / ht[0][0];
  } else {
    const double det = ht[0][0] * ht[1][1] - ht[0][1] * ht[1][0];
    if (std::abs(det) <= 1e-28 * std::max(scale_ref * scale_ref, 1e-300))
      throw std::runtime_error("restricted_newton: singular restricted system");
    out.q[0] = (-gt[0] * ht[1][1] + gt[1] * ht[0][1]) / det;
    out.q[1] = (-gt[1] * ht[0][0] + gt[0] * ht[1][0]) / det;
  }

  const double qq = out.q[0] * out.q[0] + out.q[1] * out.q[1];
  if (qq == 0.0) throw std::runtime_error("restricted_newton: zero restricted direction");
  out.q_norm = std::sqrt(qq);
  double qhq = ht[0][0] * out.q[0] * out.q[0];
  if (z.cols == 2)
    qhq += (ht[0][1] + ht[1][0]) * out.q[0] * out.q[1] + ht[1][1] * out.q[1] * out.q[1];
  out.kappa = qhq / qq;
  return out;
}

std::pair<double, double> forcing_update(ForcingState& state, std::span<const double> s0,
                                         std::span<const double> g0, const LinearOperator& h0,
                                         std::span<const double> s_k, std::span<const double> g_k,
                                         const LinearOperator& h_k) {
  if (!state.have_initial) {
    std::vector<double> ng0(g0.size());
    for (size_t i = 0; i < g0.size(); ++i) ng0[i] = -g0[i];
    const OrthoBasis z0 = gram_schmidt_2(ng0, s0);
    const RestrictedNewton r0 = restricted_newton(g0, h0, z0);
    state.kappa0 = r0.kappa;
    state.s0_norm = norm2(s0);
    if (state.s0_norm == 0.0 || state.kappa0 == 0.0)
      throw std::runtime_error("forcing_update: degenerate first-step quantities");
    state.have_initial = true;
  }

  std::vector<double> ngk(g_k.size());
  for (size_t i = 0; i < g_k.size(); ++i) ngk[i] = -g_k[i];
  const OrthoBasis zk = gram_schmidt_2(ngk, s_k);
  const RestrictedNewton rk = restricted_newton(g_k, h_k, zk);

  double eta = rk.q_norm / state.s0_norm;
  double tau = std::abs(rk.kappa) / std::abs(state.kappa0);
  eta = std::min(eta, state.eta_max);
  tau = std::min(std::min(tau, state.tau_max), eta);
  state.eta = eta;
  state.tau = tau;
  return {eta, tau};
}

double incomplete_newton_curvature(std::span<const double> g,
                                   const std::function<void(std::span<const double>, std::span<double>)>& preconfun) {
  const size_t n = g.size();
  std::vector<double> ng(n), q(n);
  for (size_t i = 0; i < n; ++i) ng[i] = -g[i];
  preconfun(ng, q);
  const double qq = dot(q, q);
  if (qq == 0.0) throw std::runtime_error("incomplete_newton_curvature: zero incomplete direction");
  return dot(q, ng) / qq;
}

bool limited_curvature_check(std::span<const double> p, const LinearOperator& h, double eps) {
  std::vector<double> hp(p.size());
  h.apply(p, hp);
  return limited_curvature_violated(dot(p, hp), dot(p, p), eps);
}

}  // namespace meshopt
