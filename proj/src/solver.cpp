#include "meshopt/solver.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "meshopt/linalg.hpp"
#include "meshopt/ordering.hpp"

namespace meshopt {

namespace {

void sign_correct(std::span<const double> g, std::vector<double>& p) {
  if (dot(g, p) > 0.0)
    for (double& v : p) v = -v;
}

std::vector<double> negate(std::span<const double> g) {
  std::vector<double> r(g.size());
  for (size_t i = 0; i < g.size(); ++i) r[i] = -g[i];
  return r;
}

}  // namespace

DirectionInfo newton_direction_standard(std::span<const double> g, const SparseSymMatrix& h,
                                        const LinearOperator& h_op, double eta, double tau) {
  DirectionInfo info;
  const FactorizationResult m = jacobi_precon(h);
  const auto rhs = negate(g);
  const CgOutcome out = cg(
      h_op, rhs, [&m](std::span<const double> r, std::span<double> z) { m.apply(r, z); }, h.n, eta, tau);
  info.p = out.solution;
  info.cg_iters = out.iterations;
  info.cg_termination = to_string(out.termination);
  info.factor_kind = PreconKind::jacobi;
  info.precon_label = "jacobi";
  sign_correct(g, info.p);
  return info;
}

DirectionInfo newton_direction_specific(std::span<const double> g, const SparseSymMatrix& h,
                                        const LinearOperator& h_op, std::span<const int> mdf_perm, double eta,
                                        double tau, double delta) {
  DirectionInfo info;
  const FactorizationResult fact = build_preconditioner(h, mdf_perm, delta, true);
  auto fact_apply = [&fact](std::span<const double> r, std::span<double> z) { fact.apply(r, z); };
  const double mu = incomplete_newton_curvature(g, fact_apply);
  const double eps = tau * std::abs(mu);
  const auto rhs = negate(g);
  CgOutcome out = cg(h_op, rhs, fact_apply, h.n, eta, eps);
  info.p = out.solution;
  info.cg_iters = out.iterations;
  info.cg_termination = to_string(out.termination);
  info.factor_kind = fact.kind;
  info.precon_label = to_string(fact.kind);

  if (fact.kind == PreconKind::ildlt0) {
    std::vector<double> hp(static_cast<size_t>(h.n));
    h_op.apply(info.p, hp);
    const double php = dot(info.p, hp);
    if (php < 0.0) {
      const FactorizationResult jac = jacobi_precon(h);
      auto jac_apply = [&jac](std::span<const double> r, std::span<double> z) { jac.apply(r, z); };
      const double mu2 = incomplete_newton_curvature(g, jac_apply);
      const double eps2 = tau * std::abs(mu2);
      if (limited_curvature_violated(php, dot(info.p, info.p), eps2)) {
        out = cg(h_op, rhs, jac_apply, h.n, eta, eps2);
        info.p = out.solution;
        info.cg_iters += out.iterations;
        info.cg_termination = to_string(out.termination);
        info.jacobi_rerun = true;
        info.precon_label = "ildlt0+jacobi";
      }
    }
  }
  sign_correct(g, info.p);
  return info;
}

DirectionInfo newton_direction_direct(std::span<const double> g, const SparseSymMatrix& h) {
  DirectionInfo info;
  info.p = direct_solve(h, negate(g));
  sign_correct(g, info.p);
  return info;
}

bool validity_guard(const HighOrderMesh& mesh, const DofMap& dofmap, std::span<const double> x) {
  HighOrderMesh work = mesh;
  dofmap.scatter(std::vector<double>(x.begin(), x.end()), work);
  return mesh_is_valid(work);
}

SolverResult optimize_function(const ObjectiveFunction& objective, std::span<const double> x0,
                               const SolverConfig& config) {
  const int n = objective.n();

  SolverResult result;
  SolverStats& stats = result.stats;

  std::vector<double> x(x0.begin(), x0.end());

  ObjectiveEval ev = objective.evaluate(x, true);
  stats.objective_evals++;
  if (!ev.valid) throw std::invalid_argument("optimize: objective is invalid at the initial point");
  if (n == 0) {
    result.x = x;
    result.converged = true;
    return result;
  }

  const std::vector<double> g0 = ev.gradient;
  const SparseSymMatrix h0 = ev.hessian;
  const LinearOperator h0_op = counted_operator(h0, stats.matvec_products);

  std::vector<int> mdf_perm(static_cast<size_t>(n));
  std::iota(mdf_perm.begin(), mdf_perm.end(), 0);
  if (config.mode == SolverMode::specific && config.linear == LinearSolverKind::iterative && config.use_mdf)
    mdf_perm = mdf_ordering(h0);

  const ObjectiveFn fobj = [&](std::span<const double> xv) {
    stats.objective_evals++;
    return objective.value(xv);
  };

  ForcingState forcing;
  double eta = 0.5, tau = 0.01;
  double alpha = 1.0;
  std::vector<double> s0;
  double f = ev.value;
  double rms = norm2(ev.gradient) / std::sqrt(static_cast<double>(n));

  if (rms < config.rms_tol) {  // already at a stationary point
    result.x = x;
    result.converged = true;
    return result;
  }

  int k = 0;
  while (true) {
    const LinearOperator h_op = counted_operator(ev.hessian, stats.matvec_products);
    DirectionInfo dir;
    if (config.linear == LinearSolverKind::direct)
      dir = newton_direction_direct(ev.gradient, ev.hessian);
    else if (config.mode == SolverMode::standard)
      dir = newton_direction_standard(ev.gradient, ev.hessian, h_op, eta, tau);
    else
      dir = newton_direction_specific(ev.gradient, ev.hessian, h_op, mdf_perm, eta, tau, config.delta);

    const LineSearchResult ls = config.mode == SolverMode::standard
                                    ? standard_bls(x, dir.p, alpha, f, fobj, ev.gradient, config.ls)
                                    : specific_ls(x, dir.p, alpha, f, fobj, ev.gradient, config.ls);
    stats.ls_iters += ls.ls_iterations;
    if (!ls.accepted) break;  // no more progress; convergence judged by the residual

    if (k == 0) s0 = ls.step;
    axpy(1.0, ls.step, std::span<double>(x));
    alpha = ls.next_alpha;

    ev = objective.evaluate(x, true);
    stats.objective_evals++;
    if (!ev.valid) throw std::logic_error("optimize: accepted step produced an invalid mesh");
    f = ev.value;
    rms = norm2(ev.gradient) / std::sqrt(static_cast<double>(n));
    if (config.on_accept) config.on_accept(x);

    if (config.mode == SolverMode::standard) {
      std::tie(eta, tau) = standard_forcing();
    } else if (rms >= config.rms_tol) {  // skip once stopped: gradient may vanish
      const LinearOperator hk_op = counted_operator(ev.hessian, stats.matvec_products);
      try {
        std::tie(eta, tau) = forcing_update(forcing, s0, g0, h0_op, ls.step, ev.gradient, hk_op);
      } catch (const std::exception&) {
        // keep previous values
      }
    }

    IterationRecord rec;
    rec.k = k;
    rec.f = f;
    rec.rms_residual = rms;
    rec.alpha = ls.alpha_used;
    rec.rho = ls.rho;
    rec.ls_iters = ls.ls_iterations;
    rec.cg_iters = dir.cg_iters;
    rec.matvecs_cum = stats.matvec_products;
    rec.precon = dir.precon_label;
    rec.cg_termination = dir.cg_termination;
    rec.eta = eta;
    rec.tau = tau;
    stats.trace.push_back(rec);

    ++k;
    stats.nonlinear_iters = k;
    if (rms < config.rms_tol) break;
    if (k >= config.max_nonlinear) break;
  }

  result.x = x;
  result.converged = rms < config.rms_tol;
  return result;
}

SolverResult optimize(const HighOrderMesh& mesh, const MetricField& metric, const SolverConfig& config) {
  const DofMap dofmap = build_dof_map(mesh);
  const DistortionObjective objective(mesh, dofmap, metric);
  std::vector<double> x0;
  dofmap.gather(mesh, x0);
  return optimize_function(objective, x0, config);
}

void write_trace_csv(const SolverStats& stats, std::ostream& os) {
  os << "iteration,f,rms_residual,alpha,rho,ls_iters,cg_iters,matvecs,precon_kind,cg_termination\n";
  os.precision(12);
  for (const auto& r : stats.trace)
    os << r.k << "," << r.f << "," << r.rms_residual << "," << r.alpha << "," << r.rho << "," << r.ls_iters << ","
       << r.cg_iters << "," << r.matvecs_cum << "," << r.precon << "," << r.cg_termination << "\n";
}

}  // namespace meshopt
