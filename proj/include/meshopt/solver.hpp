#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "meshopt/distortion.hpp"
#include "meshopt/forcing.hpp"
#include "meshopt/line_search.hpp"
#include "meshopt/linear.hpp"
#include "meshopt/mesh.hpp"
#include "meshopt/metric.hpp"

namespace meshopt {

enum class SolverMode { standard, specific };
enum class LinearSolverKind { direct, iterative };

struct SolverConfig {
  SolverMode mode = SolverMode::specific;
  LinearSolverKind linear = LinearSolverKind::iterative;
  double rms_tol = 1e-4;
  int max_nonlinear = 5000;
  LineSearchConfig ls;
  double delta = 10.0;  // preconditioner switch threshold
  bool use_mdf = true;
  // Invoked with each accepted iterate; used by verification harnesses.
  std::function<void(std::span<const double>)> on_accept;
};

struct IterationRecord {
  int k = 0;
  double f = 0;
  double rms_residual = 0;
  double alpha = 0;
  double rho = 0;
  int ls_iters = 0;
  int cg_iters = 0;
  long matvecs_cum = 0;
  std::string precon;
  std::string cg_termination;
  double eta = 0;
  double tau = 0;
};

struct SolverStats {
  int nonlinear_iters = 0;
  long ls_iters = 0;           // step-length updates over all line searches
  long matvec_products = 0;    // every H*v product, CG and forcing updates alike
  long objective_evals = 0;
  std::vector<IterationRecord> trace;
};

struct SolverResult {
  std::vector<double> x;
  bool converged = false;
  SolverStats stats;
};

struct DirectionInfo {
  std::vector<double> p;
  PreconKind factor_kind = PreconKind::jacobi;
  bool jacobi_rerun = false;
  int cg_iters = 0;
  std::string cg_termination = "direct";
  std::string precon_label = "direct";
};

// Jacobi-preconditioned CG direction with the curvature threshold eps = tau,
// sign-corrected to descend.
DirectionInfo newton_direction_standard(std::span<const double> g, const SparseSymMatrix& h,
                                        const LinearOperator& h_op, double eta, double tau);

// Switched Jacobi/iLDLT(0) preconditioning with the curvature forcing term
// eps = tau |mu|; a returned direction of negative curvature that violates the
// limited curvature inequality forces one Jacobi-preconditioned rerun.
DirectionInfo newton_direction_specific(std::span<const double> g, const SparseSymMatrix& h,
                                        const LinearOperator& h_op, std::span<const int> mdf_perm, double eta,
                                        double tau, double delta);

DirectionInfo newton_direction_direct(std::span<const double> g, const SparseSymMatrix& h);

// sigma > 0 at every quadrature point for the coordinates x.
bool validity_guard(const HighOrderMesh& mesh, const DofMap& dofmap, std::span<const double> x);

// Second-order driver over any objective with the barrier semantics of
// ObjectiveFunction: signed Newton directions per config, line-search
// globalization per mode, forcing sequences per mode, stopping on the RMS
// residual or on a failed line search.
SolverResult optimize_function(const ObjectiveFunction& objective, std::span<const double> x0,
                               const SolverConfig& config);

SolverResult optimize(const HighOrderMesh& mesh, const MetricField& metric, const SolverConfig& config);

void write_trace_csv(const SolverStats& stats, std::ostream& os);

}  // namespace meshopt
