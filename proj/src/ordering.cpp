#include "meshopt/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "meshopt/linalg.hpp"
#include "meshopt/linear.hpp"

namespace meshopt {

namespace {

uint64_t splitmix64(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::pair<SparseSymMatrix, SparseSymMatrix> spectral_pencil(const HighOrderMesh& mesh, const MetricField& metric) {
  const int d = mesh.dim;
  const int nn = mesh.num_nodes();
  const ReferenceSimplex ref(d, mesh.degree);
  const double vol_master = d == 2 ? 0.5 : 1.0 / 6.0;

  std::vector<std::tuple<int, int, double>> kt, bt;
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* ids = mesh.elem(e);
    for (const auto& cell : ref.subcells()) {
      int gl[4];
      for (int v = 0; v <= d; ++v) gl[v] = ids[cell[static_cast<size_t>(v)]];
      SmallMat jac(d);
      double centroid[3] = {0, 0, 0};
      for (int a = 0; a < d; ++a) {
        for (int v = 0; v <= d; ++v) centroid[a] += mesh.node(gl[v])[a] / (d + 1);
        for (int b = 0; b < d; ++b) jac(a, b) = mesh.node(gl[b + 1])[a] - mesh.node(gl[0])[a];
      }
      SmallMat m(d);
      metric.eval(centroid, m);
      const SmallMat g = jac.transposed() * m * jac;
      const double detg = g.det();
      if (detg <= 0.0) continue;  // degenerate sliver, no contribution
      const double sq = std::sqrt(detg);
      const SmallMat ginv = g.inverse();
      // P1 gradients on the sub-element master: grad lam_0 = -1, grad lam_v = e_v
      double gr[4][3] = {};
      for (int a = 0; a < d; ++a) gr[0][a] = -1.0;
      for (int v = 1; v <= d; ++v) gr[v][v - 1] = 1.0;
      for (int v = 0; v <= d; ++v)
        for (int w = 0; w <= d; ++w) {
          double kij = 0;
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) kij += gr[v][a] * ginv(a, b) * gr[w][b];
          kt.emplace_back(gl[v], gl[w], kij * sq * vol_master);
          const double mij = vol_master * sq * (v == w ? 2.0 : 1.0) / static_cast<double>((d + 1) * (d + 2));
          bt.emplace_back(gl[v], gl[w], mij);
        }
    }
  }
  return {SparseSymMatrix::from_triplets(nn, std::move(kt)), SparseSymMatrix::from_triplets(nn, std::move(bt))};
}

NodeOrdering spectral_node_ordering(const HighOrderMesh& mesh, const MetricField& metric) {
  const int nn = mesh.num_nodes();
  const auto [k, b] = spectral_pencil(mesh, metric);

  double tr_k = 0, tr_b = 0;
  for (int i = 0; i < nn; ++i) {
    tr_k += k.value(i, i);
    tr_b += b.value(i, i);
  }
  const double shift = 1e-4 * tr_k / tr_b;

  SparseSymMatrix ks = k;
  for (int i = 0; i < nn; ++i)
    for (int idx = ks.row_ptr[static_cast<size_t>(i)]; idx < ks.row_ptr[static_cast<size_t>(i) + 1]; ++idx)
      ks.vals[static_cast<size_t>(idx)] += shift * b.vals[static_cast<size_t>(b.find(i, ks.col_idx[static_cast<size_t>(idx)]))];

  SparseLdlt fact;
  fact.factor(ks);

  std::vector<double> ones(static_cast<size_t>(nn), 1.0);
  std::vector<double> b_ones(static_cast<size_t>(nn));
  b.matvec(ones, b_ones);
  const double ones_b_ones = dot(ones, b_ones);

  uint64_t seed = 0x5eed5eedULL;
  std::vector<double> u(static_cast<size_t>(nn));
  for (double& v : u) v = static_cast<double>(splitmix64(seed) >> 11) / 9007199254740992.0 - 0.5;

  std::vector<double> bu(static_cast<size_t>(nn)), ku(static_cast<size_t>(nn)), w(static_cast<size_t>(nn));
  double lambda = 0;
  bool converged = false;
  for (int it = 0; it < 2000 && !converged; ++it) {
    const double c = dot(u, b_ones) / ones_b_ones;
    for (int i = 0; i < nn; ++i) u[static_cast<size_t>(i)] -= c;
    b.matvec(u, bu);
    fact.solve(bu, w);
    u = w;
    const double c2 = dot(u, b_ones) / ones_b_ones;
    for (int i = 0; i < nn; ++i) u[static_cast<size_t>(i)] -= c2;
    b.matvec(u, bu);
    const double bnorm = std::sqrt(dot(u, bu));
    if (bnorm == 0.0) throw std::runtime_error("spectral_node_ordering: iterate collapsed");
    scale(1.0 / bnorm, std::span<double>(u));
    k.matvec(u, ku);
    b.matvec(u, bu);
    lambda = dot(u, ku) / dot(u, bu);
    double res = 0;
    double knorm = 0, bnorm2 = 0;
    for (int i = 0; i < nn; ++i) {
      const double r = ku[static_cast<size_t>(i)] - lambda * bu[static_cast<size_t>(i)];
      res += r * r;
      knorm += ku[static_cast<size_t>(i)] * ku[static_cast<size_t>(i)];
      bnorm2 += bu[static_cast<size_t>(i)] * bu[static_cast<size_t>(i)];
    }
    converged = std::sqrt(res) <= 1e-8 * (std::sqrt(knorm) + std::abs(lambda) * std::sqrt(bnorm2));
  }
  if (!converged)
    throw std::runtime_error("spectral_node_ordering: eigen-solver did not reach residual tolerance 1e-8");
  if (lambda <= 0.0) throw std::runtime_error("spectral_node_ordering: deflated eigenvalue is not positive");

  // Sign convention anchored to geometry so relabeled inputs order the same
  // physical sweep: the eigenfunction is non-positive at the node with the
  // lexicographically smallest coordinates among the distinguishable ones.
  double umax = 0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  int anchor = -1;
  auto lex_less = [&](int a2, int b2) {
    for (int c = 0; c < mesh.dim; ++c) {
      if (mesh.node(a2)[c] != mesh.node(b2)[c]) return mesh.node(a2)[c] < mesh.node(b2)[c];
    }
    return a2 < b2;
  };
  for (int i = 0; i < nn; ++i) {
    if (std::abs(u[static_cast<size_t>(i)]) <= 1e-12 * umax) continue;
    if (anchor < 0 || lex_less(i, anchor)) anchor = i;
  }
  if (anchor >= 0 && u[static_cast<size_t>(anchor)] > 0)
    for (double& v : u) v = -v;

  NodeOrdering ord;
  ord.source = "spectral";
  ord.node_perm.resize(static_cast<size_t>(nn));
  std::iota(ord.node_perm.begin(), ord.node_perm.end(), 0);
  std::sort(ord.node_perm.begin(), ord.node_perm.end(), [&](int a2, int b2) {
    if (u[static_cast<size_t>(a2)] != u[static_cast<size_t>(b2)]) return u[static_cast<size_t>(a2)] < u[static_cast<size_t>(b2)];
    return a2 < b2;
  });
  return ord;
}

HighOrderMesh apply_node_ordering(const HighOrderMesh& mesh, const std::vector<int>& node_perm) {
  const int nn = mesh.num_nodes();
  if (static_cast<int>(node_perm.size()) != nn) throw std::invalid_argument("apply_node_ordering: size mismatch");
  std::vector<int> inv(static_cast<size_t>(nn), -1);
  for (int i = 0; i < nn; ++i) inv[static_cast<size_t>(node_perm[static_cast<size_t>(i)])] = i;
  for (int i = 0; i < nn; ++i)
    if (inv[static_cast<size_t>(i)] < 0) throw std::invalid_argument("apply_node_ordering: not a permutation");
  HighOrderMesh out;
  out.dim = mesh.dim;
  out.degree = mesh.degree;
  out.coords.resize(mesh.coords.size());
  out.node_class.resize(static_cast<size_t>(nn));
  for (int i = 0; i < nn; ++i) {
    const int old = node_perm[static_cast<size_t>(i)];
    for (int a = 0; a < mesh.dim; ++a) out.coords[static_cast<size_t>(i) * static_cast<size_t>(mesh.dim) + static_cast<size_t>(a)] = mesh.node(old)[a];
    out.node_class[static_cast<size_t>(i)] = mesh.node_class[static_cast<size_t>(old)];
  }
  out.connectivity.resize(mesh.connectivity.size());
  for (size_t t = 0; t < mesh.connectivity.size(); ++t)
    out.connectivity[t] = inv[static_cast<size_t>(mesh.connectivity[t])];
  return out;
}

std::vector<int> interleave_dofs(const std::vector<int>& node_perm, const DofMap& dofmap) {
  std::vector<int> order;
  order.reserve(static_cast<size_t>(dofmap.n));
  for (int node : node_perm)
    for (int a = 0; a < dofmap.dim; ++a) {
      const int f = dofmap.index(node, a);
      if (f >= 0) order.push_back(f);
    }
  return order;
}

namespace {

struct MdfWork {
  const SparseSymMatrix* a;
  std::vector<double> vals;       // working values on the fixed pattern
  std::vector<char> alive;

  double pivot(int v) const {
    const int idx = a->find(v, v);
    return idx < 0 ? 0.0 : vals[static_cast<size_t>(idx)];
  }

  // Fill mass discarded by eliminating v now, over ordered neighbor pairs.
  double weight(int v) const {
    const double piv = pivot(v);
    if (piv == 0.0) return std::numeric_limits<double>::infinity();
    double sum = 0;
    for (int ki = a->row_ptr[static_cast<size_t>(v)]; ki < a->row_ptr[static_cast<size_t>(v) + 1]; ++ki) {
      const int i = a->col_idx[static_cast<size_t>(ki)];
      if (i == v || !alive[static_cast<size_t>(i)]) continue;
      for (int kj = a->row_ptr[static_cast<size_t>(v)]; kj < a->row_ptr[static_cast<size_t>(v) + 1]; ++kj) {
        const int j = a->col_idx[static_cast<size_t>(kj)];
        if (j == v || j == i || !alive[static_cast<size_t>(j)]) continue;
        if (a->find(i, j) >= 0) continue;
        const double fill = vals[static_cast<size_t>(a->find(i, v))] * vals[static_cast<size_t>(kj)] / piv;
        sum += fill * fill;
      }
    }
    return sum;
  }

  // Zero-fill elimination of v; returns the discarded mass.
  double eliminate(int v) {
    const double piv = pivot(v);
    alive[static_cast<size_t>(v)] = 0;
    if (piv == 0.0) return std::numeric_limits<double>::infinity();
    double discarded = 0;
    for (int ki = a->row_ptr[static_cast<size_t>(v)]; ki < a->row_ptr[static_cast<size_t>(v) + 1]; ++ki) {
      const int i = a->col_idx[static_cast<size_t>(ki)];
      if (i == v || !alive[static_cast<size_t>(i)]) continue;
      const double aiv = vals[static_cast<size_t>(a->find(i, v))];
      for (int kj = a->row_ptr[static_cast<size_t>(v)]; kj < a->row_ptr[static_cast<size_t>(v) + 1]; ++kj) {
        const int j = a->col_idx[static_cast<size_t>(kj)];
        if (j == v || j == i || !alive[static_cast<size_t>(j)]) continue;
        const double fill = aiv * vals[static_cast<size_t>(kj)] / piv;
        const int pos = a->find(i, j);
        if (pos >= 0)
          vals[static_cast<size_t>(pos)] -= fill;
        else
          discarded += fill * fill;
      }
    }
    return discarded;
  }
};

}  // namespace

std::vector<int> mdf_ordering(const SparseSymMatrix& h0) {
  const int n = h0.n;
  MdfWork w{&h0, h0.vals, std::vector<char>(static_cast<size_t>(n), 1)};
  std::vector<double> weight(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) weight[static_cast<size_t>(v)] = w.weight(v);

  std::vector<int> perm;
  perm.reserve(static_cast<size_t>(n));
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!w.alive[static_cast<size_t>(v)]) continue;
      if (best < 0 || weight[static_cast<size_t>(v)] < weight[static_cast<size_t>(best)]) best = v;
    }
    perm.push_back(best);
    w.eliminate(best);
    for (int ki = h0.row_ptr[static_cast<size_t>(best)]; ki < h0.row_ptr[static_cast<size_t>(best) + 1]; ++ki) {
      const int i = h0.col_idx[static_cast<size_t>(ki)];
      if (w.alive[static_cast<size_t>(i)]) weight[static_cast<size_t>(i)] = w.weight(i);
    }
  }
  return perm;
}

double discarded_fill(const SparseSymMatrix& a, std::span<const int> perm) {
  MdfWork w{&a, a.vals, std::vector<char>(static_cast<size_t>(a.n), 1)};
  double total = 0;
  for (int v : perm) total += w.eliminate(v);
  return total;
}

}  // namespace meshopt
