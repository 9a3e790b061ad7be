#include "meshopt/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meshopt/linalg.hpp"

namespace meshopt {

const char* to_string(PreconKind k) { return k == PreconKind::jacobi ? "jacobi" : "ildlt0"; }

const char* to_string(CgTermination t) {
  switch (t) {
    case CgTermination::residual: return "residual";
    case CgTermination::curvature: return "curvature";
    default: return "max_iter";
  }
}

LinearOperator counted_operator(const SparseSymMatrix& m, long& counter) {
  return {m.n, [&m, &counter](std::span<const double> x, std::span<double> y) {
            ++counter;
            m.matvec(x, y);
          }};
}

CgOutcome cg(const LinearOperator& h, std::span<const double> rhs,
             const std::function<void(std::span<const double>, std::span<double>)>& preconfun, int i_max, double eta,
             double eps) {
  const int n = h.n;
  CgOutcome out;
  out.solution.assign(static_cast<size_t>(n), 0.0);
  std::vector<double> d(static_cast<size_t>(n), 0.0);
  std::vector<double> r(static_cast<size_t>(n));
  std::vector<double> hd(static_cast<size_t>(n));
  std::vector<double> z(static_cast<size_t>(n));

  h.apply(out.solution, hd);  // initial residual product (null guess)
  ++out.matvec_count;
  for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)] = rhs[static_cast<size_t>(i)] - hd[static_cast<size_t>(i)];
  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    out.termination = CgTermination::residual;
    return out;
  }
  preconfun(r, z);
  double rz = dot(r, z);
  double beta = 0.0;

  for (int i = 1; i <= i_max; ++i) {
    for (int t = 0; t < n; ++t) d[static_cast<size_t>(t)] = z[static_cast<size_t>(t)] + beta * d[static_cast<size_t>(t)];
    h.apply(d, hd);
    ++out.matvec_count;
    const double curv = dot(d, hd);
    if (curv < eps * dot(d, d)) {
      out.termination = CgTermination::curvature;
      out.iterations = i;
      out.last_step = d;
      if (i == 1) out.solution = d;  // scaled steepest descent M p = -g
      return out;
    }
    const double alpha = rz / curv;
    axpy(alpha, d, out.solution);
    axpy(-alpha, hd, r);
    preconfun(r, z);
    const double rnorm = norm2(r);
    if (rnorm < eta * rhs_norm || rnorm == 0.0) {
      out.termination = CgTermination::residual;
      out.iterations = i;
      return out;
    }
    const double rz_new = dot(r, z);
    beta = rz_new / rz;
    rz = rz_new;
  }
  out.termination = CgTermination::max_iter;
  out.iterations = i_max;
  return out;
}

FactorizationResult jacobi_precon(const SparseSymMatrix& h) {
  FactorizationResult f;
  f.kind = PreconKind::jacobi;
  f.diag = h.diagonal();
  for (int i = 0; i < h.n; ++i)
    if (f.diag[static_cast<size_t>(i)] == 0.0)
      throw std::runtime_error("jacobi_precon: zero diagonal entry at row " + std::to_string(i));
  return f;
}

std::optional<IluFactors> ilu0(const SparseSymMatrix& a) {
  IluFactors f;
  f.combined = a;
  const int n = a.n;
  f.diag_pos.assign(static_cast<size_t>(n), -1);
  std::vector<double> row_scale(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    f.diag_pos[static_cast<size_t>(i)] = a.find(i, i);
    if (f.diag_pos[static_cast<size_t>(i)] < 0) return std::nullopt;
    row_scale[static_cast<size_t>(i)] = std::max(a.row_max_abs(i), 1e-300);
  }
  auto& m = f.combined;
  for (int i = 0; i < n; ++i) {
    for (int idx = m.row_ptr[static_cast<size_t>(i)]; idx < m.row_ptr[static_cast<size_t>(i) + 1]; ++idx) {
      const int k = m.col_idx[static_cast<size_t>(idx)];
      if (k >= i) break;
      const double piv = m.vals[static_cast<size_t>(f.diag_pos[static_cast<size_t>(k)])];
      if (std::abs(piv) < 1e-14 * row_scale[static_cast<size_t>(k)]) return std::nullopt;
      const double lik = m.vals[static_cast<size_t>(idx)] / piv;
      m.vals[static_cast<size_t>(idx)] = lik;
      for (int idx2 = f.diag_pos[static_cast<size_t>(k)] + 1; idx2 < m.row_ptr[static_cast<size_t>(k) + 1]; ++idx2) {
        const int j = m.col_idx[static_cast<size_t>(idx2)];
        const int pos = m.find(i, j);
        if (pos >= 0) m.vals[static_cast<size_t>(pos)] -= lik * m.vals[static_cast<size_t>(idx2)];
      }
    }
  }
  return f;
}

PreconKind switch_criterion(std::span<const double> d, double delta) {
  double neg_min = 0, neg_max = 0;
  bool any_neg = false;
  for (double v : d) {
    if (v < 0) {
      const double m = -v;
      if (!any_neg) {
        neg_min = neg_max = m;
        any_neg = true;
      } else {
        neg_min = std::min(neg_min, m);
        neg_max = std::max(neg_max, m);
      }
    }
  }
  if (!any_neg) return PreconKind::ildlt0;
  return (neg_max / neg_min < delta) ? PreconKind::ildlt0 : PreconKind::jacobi;
}

FactorizationResult ildlt0_from_ilu(const IluFactors& f, std::vector<int> perm, const SparseSymMatrix& h,
                                    double delta) {
  const int n = f.combined.n;
  std::vector<double> d(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = f.diag(i);

  std::optional<double> ratio;
  {
    double neg_min = 0, neg_max = 0;
    bool any = false;
    for (double v : d)
      if (v < 0) {
        const double m = -v;
        neg_min = any ? std::min(neg_min, m) : m;
        neg_max = any ? std::max(neg_max, m) : m;
        any = true;
      }
    if (any) ratio = neg_max / neg_min;
  }

  for (double v : d)
    if (v == 0.0) {
      auto fb = jacobi_precon(h);
      fb.d_ratio = ratio;
      return fb;
    }
  if (switch_criterion(d, delta) == PreconKind::jacobi) {
    auto fb = jacobi_precon(h);
    fb.d_ratio = ratio;
    return fb;
  }

  FactorizationResult out;
  out.kind = PreconKind::ildlt0;
  out.diag = d;
  out.perm = std::move(perm);
  out.d_ratio = ratio;

  // Ltilde = (L + D^{-1} U^T) / 2 on the strict lower pattern.
  const auto& m = f.combined;
  std::vector<std::tuple<int, int, double>> lt, ltt;
  for (int i = 0; i < n; ++i)
    for (int idx = m.row_ptr[static_cast<size_t>(i)]; idx < m.row_ptr[static_cast<size_t>(i) + 1]; ++idx) {
      const int j = m.col_idx[static_cast<size_t>(idx)];
      if (j >= i) break;
      const double uji = m.value(j, i);
      const double v = 0.5 * (m.vals[static_cast<size_t>(idx)] + uji / d[static_cast<size_t>(j)]);
      lt.emplace_back(i, j, v);
      ltt.emplace_back(j, i, v);
    }
  out.ltilde = SparseSymMatrix::from_triplets(n, std::move(lt));
  out.ltilde_t = SparseSymMatrix::from_triplets(n, std::move(ltt));
  return out;
}

FactorizationResult build_preconditioner(const SparseSymMatrix& h, std::span<const int> perm, double delta,
                                         bool want_ildlt) {
  if (!want_ildlt) return jacobi_precon(h);
  std::vector<int> p(perm.begin(), perm.end());
  const SparseSymMatrix hp = h.permuted(p);
  auto f = ilu0(hp);
  if (!f) return jacobi_precon(h);
  return ildlt0_from_ilu(*f, std::move(p), h, delta);
}

void FactorizationResult::apply(std::span<const double> r, std::span<double> z) const {
  const int n = static_cast<int>(diag.size());
  if (kind == PreconKind::jacobi) {
    for (int i = 0; i < n; ++i) z[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] / diag[static_cast<size_t>(i)];
    return;
  }
  std::vector<double> y(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] = r[static_cast<size_t>(perm[static_cast<size_t>(i)])];
  for (int i = 0; i < n; ++i) {
    double s = y[static_cast<size_t>(i)];
    for (int k = ltilde.row_ptr[static_cast<size_t>(i)]; k < ltilde.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      s -= ltilde.vals[static_cast<size_t>(k)] * y[static_cast<size_t>(ltilde.col_idx[static_cast<size_t>(k)])];
    y[static_cast<size_t>(i)] = s;
  }
  for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] /= diag[static_cast<size_t>(i)];
  for (int i = n - 1; i >= 0; --i) {
    double s = y[static_cast<size_t>(i)];
    for (int k = ltilde_t.row_ptr[static_cast<size_t>(i)]; k < ltilde_t.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      s -= ltilde_t.vals[static_cast<size_t>(k)] * y[static_cast<size_t>(ltilde_t.col_idx[static_cast<size_t>(k)])];
    y[static_cast<size_t>(i)] = s;
  }
  for (int i = 0; i < n; ++i) z[static_cast<size_t>(perm[static_cast<size_t>(i)])] = y[static_cast<size_t>(i)];
}

LinearOperator FactorizationResult::as_operator() const {
  return {static_cast<int>(diag.size()),
          [this](std::span<const double> r, std::span<double> z) { apply(r, z); }};
}

void SparseLdlt::factor(const SparseSymMatrix& a) {
  const int n = a.n;
  n_ = n;
  std::vector<int> parent(static_cast<size_t>(n), -1);
  std::vector<int> flag(static_cast<size_t>(n), -1);
  std::vector<int> lnz(static_cast<size_t>(n), 0);

  for (int k = 0; k < n; ++k) {
    flag[static_cast<size_t>(k)] = k;
    for (int idx = a.row_ptr[static_cast<size_t>(k)]; idx < a.row_ptr[static_cast<size_t>(k) + 1]; ++idx) {
      int i = a.col_idx[static_cast<size_t>(idx)];
      if (i >= k) break;
      for (; flag[static_cast<size_t>(i)] != k; i = parent[static_cast<size_t>(i)]) {
        if (parent[static_cast<size_t>(i)] == -1) parent[static_cast<size_t>(i)] = k;
        lnz[static_cast<size_t>(i)]++;
        flag[static_cast<size_t>(i)] = k;
      }
    }
  }
  lp_.assign(static_cast<size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) lp_[static_cast<size_t>(i) + 1] = lp_[static_cast<size_t>(i)] + lnz[static_cast<size_t>(i)];
  li_.assign(static_cast<size_t>(lp_[static_cast<size_t>(n)]), 0);
  lx_.assign(static_cast<size_t>(lp_[static_cast<size_t>(n)]), 0.0);
  d_.assign(static_cast<size_t>(n), 0.0);

  std::vector<int> lnz_cur(static_cast<size_t>(n), 0);
  std::vector<int> pattern(static_cast<size_t>(n));
  std::vector<int> stack(static_cast<size_t>(n));
  std::vector<double> y(static_cast<size_t>(n), 0.0);
  std::fill(flag.begin(), flag.end(), -1);

  for (int k = 0; k < n; ++k) {
    int top = n;
    flag[static_cast<size_t>(k)] = k;
    double dkk = 0.0;
    for (int idx = a.row_ptr[static_cast<size_t>(k)]; idx < a.row_ptr[static_cast<size_t>(k) + 1]; ++idx) {
      const int i = a.col_idx[static_cast<size_t>(idx)];
      if (i > k) break;
      if (i == k) {
        dkk = a.vals[static_cast<size_t>(idx)];
        continue;
      }
      y[static_cast<size_t>(i)] += a.vals[static_cast<size_t>(idx)];
      int len = 0;
      for (int t = i; flag[static_cast<size_t>(t)] != k; t = parent[static_cast<size_t>(t)]) {
        stack[static_cast<size_t>(len++)] = t;
        flag[static_cast<size_t>(t)] = k;
      }
      while (len > 0) pattern[static_cast<size_t>(--top)] = stack[static_cast<size_t>(--len)];
    }
    d_[static_cast<size_t>(k)] = dkk;
    for (; top < n; ++top) {
      const int i = pattern[static_cast<size_t>(top)];
      const double yi = y[static_cast<size_t>(i)];
      y[static_cast<size_t>(i)] = 0.0;
      for (int p = lp_[static_cast<size_t>(i)]; p < lp_[static_cast<size_t>(i)] + lnz_cur[static_cast<size_t>(i)]; ++p)
        y[static_cast<size_t>(li_[static_cast<size_t>(p)])] -= lx_[static_cast<size_t>(p)] * yi;
      const double lki = yi / d_[static_cast<size_t>(i)];
      d_[static_cast<size_t>(k)] -= lki * yi;
      li_[static_cast<size_t>(lp_[static_cast<size_t>(i)] + lnz_cur[static_cast<size_t>(i)])] = k;
      lx_[static_cast<size_t>(lp_[static_cast<size_t>(i)] + lnz_cur[static_cast<size_t>(i)])] = lki;
      lnz_cur[static_cast<size_t>(i)]++;
    }
    if (std::abs(d_[static_cast<size_t>(k)]) < 1e-14 * std::max(a.row_max_abs(k), 1e-300))
      throw std::runtime_error("SparseLdlt: numerically singular pivot at row " + std::to_string(k));
  }
}

void SparseLdlt::solve(std::span<const double> b, std::span<double> x) const {
  for (int i = 0; i < n_; ++i) x[static_cast<size_t>(i)] = b[static_cast<size_t>(i)];
  for (int j = 0; j < n_; ++j)
    for (int p = lp_[static_cast<size_t>(j)]; p < lp_[static_cast<size_t>(j) + 1]; ++p)
      x[static_cast<size_t>(li_[static_cast<size_t>(p)])] -= lx_[static_cast<size_t>(p)] * x[static_cast<size_t>(j)];
  for (int j = 0; j < n_; ++j) x[static_cast<size_t>(j)] /= d_[static_cast<size_t>(j)];
  for (int j = n_ - 1; j >= 0; --j)
    for (int p = lp_[static_cast<size_t>(j)]; p < lp_[static_cast<size_t>(j) + 1]; ++p)
      x[static_cast<size_t>(j)] -= lx_[static_cast<size_t>(p)] * x[static_cast<size_t>(li_[static_cast<size_t>(p)])];
}

std::vector<double> direct_solve(const SparseSymMatrix& h, std::span<const double> rhs) {
  SparseLdlt f;
  f.factor(h);
  std::vector<double> x(static_cast<size_t>(h.n));
  f.solve(rhs, x);
  return x;
}

}  // namespace meshopt
