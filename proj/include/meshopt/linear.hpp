#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshopt/sparse.hpp"

namespace meshopt {

// Matrix-vector product hook; every Hessian product in the solver flows
// through one of these so the global product counter cannot be bypassed.
struct LinearOperator {
  int n = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
};

LinearOperator counted_operator(const SparseSymMatrix& m, long& counter);

enum class PreconKind { jacobi, ildlt0 };
enum class CgTermination { residual, curvature, max_iter };

const char* to_string(PreconKind k);
const char* to_string(CgTermination t);

// Zero-fill incomplete LU factors stored on the pattern of the input matrix:
// strict lower part carries L (unit diagonal implied), upper part carries U.
struct IluFactors {
  SparseSymMatrix combined;
  std::vector<int> diag_pos;

  double diag(int i) const { return combined.vals[static_cast<size_t>(diag_pos[static_cast<size_t>(i)])]; }
};

// Jacobi diagonal or permuted iLDLT(0) factors, plus which kind was selected.
struct FactorizationResult {
  PreconKind kind = PreconKind::jacobi;
  std::vector<double> diag;          // Jacobi diagonal, or the D factor
  std::vector<int> perm;             // ordering used by the factorization
  SparseSymMatrix ltilde;            // strict lower factor rows (unit diagonal implied)
  SparseSymMatrix ltilde_t;          // its transpose, for the backward sweep
  std::optional<double> d_ratio;     // max/min of |D_ii| over negative entries

  void apply(std::span<const double> r, std::span<double> z) const;
  LinearOperator as_operator() const;
};

struct CgOutcome {
  std::vector<double> solution;      // p*
  std::vector<double> last_step;     // d*, present when the curvature exit fired
  CgTermination termination = CgTermination::residual;
  int iterations = 0;
  long matvec_count = 0;
};

// Preconditioned conjugate gradients with a zero initial guess, curvature
// threshold eps and relative residual threshold eta. A step with
// d^T H d < eps d^T d terminates the iteration: the previous iterate is
// returned, except on the first step where the preconditioned right-hand side
// (the scaled steepest-descent direction) is returned instead.
CgOutcome cg(const LinearOperator& h, std::span<const double> rhs,
             const std::function<void(std::span<const double>, std::span<double>)>& preconfun, int i_max, double eta,
             double eps);

FactorizationResult jacobi_precon(const SparseSymMatrix& h);

// Zero-fill incomplete LU; returns nothing when a pivot degenerates.
std::optional<IluFactors> ilu0(const SparseSymMatrix& a);

PreconKind switch_criterion(std::span<const double> d, double delta);

// Symmetrized root-free factors from an iLU(0) of the permuted matrix:
// D = diag(U), Ltilde = (L + D^{-1} U^T) / 2. Falls back to the Jacobi
// diagonal of `h` when D degenerates or the switch criterion rejects the
// factorization.
FactorizationResult ildlt0_from_ilu(const IluFactors& f, std::vector<int> perm, const SparseSymMatrix& h,
                                    double delta);

// Preconditioner assembly: Jacobi, or the permuted iLDLT(0) with the switch.
FactorizationResult build_preconditioner(const SparseSymMatrix& h, std::span<const int> perm, double delta,
                                         bool want_ildlt);

// Up-looking sparse LDL^T without pivoting (factors stored by column).
class SparseLdlt {
 public:
  void factor(const SparseSymMatrix& a);
  void solve(std::span<const double> b, std::span<double> x) const;

 private:
  int n_ = 0;
  std::vector<int> lp_, li_;
  std::vector<double> lx_, d_;
};

// Complete sparse symmetric factorization solve; throws on singular input.
std::vector<double> direct_solve(const SparseSymMatrix& h, std::span<const double> rhs);

}  // namespace meshopt
