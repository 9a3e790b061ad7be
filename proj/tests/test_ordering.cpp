#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "meshopt/ordering.hpp"
#include "oracles.hpp"

using namespace meshopt;

namespace {

// 1 x n strip of cells on [0, n] x [0, 1]
HighOrderMesh strip_mesh(int cells) {
  HighOrderMesh m;
  m.dim = 2;
  m.degree = 1;
  for (int i = 0; i <= cells; ++i)
    for (int j = 0; j <= 1; ++j) {
      m.coords.push_back(static_cast<double>(i));
      m.coords.push_back(static_cast<double>(j));
    }
  auto id = [&](int i, int j) { return i * 2 + j; };
  for (int i = 0; i < cells; ++i) {
    m.connectivity.insert(m.connectivity.end(), {id(i, 0), id(i + 1, 0), id(i, 1)});
    m.connectivity.insert(m.connectivity.end(), {id(i + 1, 1), id(i, 1), id(i + 1, 0)});
  }
  m.node_class.assign(static_cast<size_t>(m.num_nodes()), 0);
  for (int i = 0; i <= cells; ++i)
    for (int j = 0; j <= 1; ++j)
      m.node_class[static_cast<size_t>(id(i, j))] = (i == 0 || i == cells) ? all_axes_fixed(2) : NodeClass{2};
  m.validate_structure();
  return m;
}

SparseSymMatrix from_dense(const std::vector<double>& d, int n) {
  std::vector<std::tuple<int, int, double>> t;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (d[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] != 0.0)
        t.emplace_back(i, j, d[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)]);
  return SparseSymMatrix::from_triplets(n, std::move(t));
}

double brute_force_min_fill(const SparseSymMatrix& a) {
  std::vector<int> perm(static_cast<size_t>(a.n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, discarded_fill(a, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

SparseSymMatrix random_sparse_sym(oracle::Rng& rng, int n, double density) {
  std::vector<std::tuple<int, int, double>> t;
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, rng.uniform(1.0, 3.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < density) {
        const double v = rng.uniform(-1.0, 1.0);
        t.emplace_back(i, j, v);
        t.emplace_back(j, i, v);
      }
  return SparseSymMatrix::from_triplets(n, std::move(t));
}

}  // namespace

TEST_CASE("spectral pencil: constant vector is stiffness-null") {
  const HighOrderMesh mesh = strip_mesh(6);
  const IdentityMetric id2(2);
  const auto [k, b] = spectral_pencil(mesh, id2);
  std::vector<double> ones(static_cast<size_t>(k.n), 1.0), y(static_cast<size_t>(k.n));
  k.matvec(ones, y);
  double knorm = 0;
  for (int i = 0; i < k.n; ++i) knorm = std::max(knorm, k.row_max_abs(i));
  for (double v : y) CHECK(std::abs(v) < 1e-10 * knorm);
}

TEST_CASE("spectral ordering sweeps a strip and matches the dense eigenproblem") {
  const HighOrderMesh mesh = strip_mesh(8);
  const IdentityMetric id2(2);
  const NodeOrdering ord = spectral_node_ordering(mesh, id2);
  CHECK(ord.source == "spectral");

  // the eigenfunction is monotone along the strip: sorted nodes sweep in x
  std::vector<double> xs;
  for (int i : ord.node_perm) xs.push_back(mesh.node(i)[0]);
  for (size_t t = 1; t < xs.size(); ++t) CHECK(xs[t] >= xs[t - 1] - 1e-9);

  // smallest nonzero eigenvalue is positive and matches a dense solve
  const auto [k, b] = spectral_pencil(mesh, id2);
  const int n = k.n;
  std::vector<double> kd(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
  std::vector<double> bd = kd;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      kd[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] = k.value(i, j);
      bd[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] = b.value(i, j);
    }
  // reduce K u = lambda B u with B = LL^T to a standard problem
  std::vector<double> l = bd;
  for (int jj = 0; jj < n; ++jj) {
    for (int i2 = 0; i2 < jj; ++i2) l[static_cast<size_t>(i2) * static_cast<size_t>(n) + static_cast<size_t>(jj)] = 0;
    double s = l[static_cast<size_t>(jj) * static_cast<size_t>(n) + static_cast<size_t>(jj)];
    for (int k2 = 0; k2 < jj; ++k2) s -= l[static_cast<size_t>(jj) * static_cast<size_t>(n) + static_cast<size_t>(k2)] *
                                         l[static_cast<size_t>(jj) * static_cast<size_t>(n) + static_cast<size_t>(k2)];
    l[static_cast<size_t>(jj) * static_cast<size_t>(n) + static_cast<size_t>(jj)] = std::sqrt(s);
    for (int i2 = jj + 1; i2 < n; ++i2) {
      double v = l[static_cast<size_t>(i2) * static_cast<size_t>(n) + static_cast<size_t>(jj)];
      for (int k2 = 0; k2 < jj; ++k2)
        v -= l[static_cast<size_t>(i2) * static_cast<size_t>(n) + static_cast<size_t>(k2)] *
             l[static_cast<size_t>(jj) * static_cast<size_t>(n) + static_cast<size_t>(k2)];
      l[static_cast<size_t>(i2) * static_cast<size_t>(n) + static_cast<size_t>(jj)] = v / l[static_cast<size_t>(jj) * static_cast<size_t>(n) + static_cast<size_t>(jj)];
    }
  }
  // C = L^{-1} K L^{-T} via triangular solves on columns
  std::vector<double> c(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
  auto fwd = [&](std::vector<double>& v) {
    for (int i2 = 0; i2 < n; ++i2) {
      double s = v[static_cast<size_t>(i2)];
      for (int k2 = 0; k2 < i2; ++k2) s -= l[static_cast<size_t>(i2) * static_cast<size_t>(n) + static_cast<size_t>(k2)] * v[static_cast<size_t>(k2)];
      v[static_cast<size_t>(i2)] = s / l[static_cast<size_t>(i2) * static_cast<size_t>(n) + static_cast<size_t>(i2)];
    }
  };
  for (int col = 0; col < n; ++col) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i2 = 0; i2 < n; ++i2) v[static_cast<size_t>(i2)] = kd[static_cast<size_t>(i2) * static_cast<size_t>(n) + static_cast<size_t>(col)];
    fwd(v);
    for (int i2 = 0; i2 < n; ++i2) c[static_cast<size_t>(i2) * static_cast<size_t>(n) + static_cast<size_t>(col)] = v[static_cast<size_t>(i2)];
  }
  for (int row = 0; row < n; ++row) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int j2 = 0; j2 < n; ++j2) v[static_cast<size_t>(j2)] = c[static_cast<size_t>(row) * static_cast<size_t>(n) + static_cast<size_t>(j2)];
    fwd(v);
    for (int j2 = 0; j2 < n; ++j2) c[static_cast<size_t>(row) * static_cast<size_t>(n) + static_cast<size_t>(j2)] = v[static_cast<size_t>(j2)];
  }
  auto ev = oracle::dense_sym_eigenvalues(c, n);
  CHECK(std::abs(ev[0]) < 1e-8);  // constant mode
  CHECK(ev[1] > 0.0);
}

TEST_CASE("spectral ordering is invariant under input relabeling") {
  const HighOrderMesh mesh = strip_mesh(7);
  const IdentityMetric id2(2);
  const NodeOrdering ord = spectral_node_ordering(mesh, id2);

  // relabel nodes by a fixed permutation and reorder again
  std::vector<int> relabel(static_cast<size_t>(mesh.num_nodes()));
  std::iota(relabel.begin(), relabel.end(), 0);
  std::reverse(relabel.begin(), relabel.end());
  const HighOrderMesh shuffled = apply_node_ordering(mesh, relabel);
  const NodeOrdering ord2 = spectral_node_ordering(shuffled, id2);
  for (int t = 0; t < mesh.num_nodes(); ++t) {
    const double* a = mesh.node(ord.node_perm[static_cast<size_t>(t)]);
    const double* b = shuffled.node(ord2.node_perm[static_cast<size_t>(t)]);
    CHECK(a[0] == doctest::Approx(b[0]));
    CHECK(a[1] == doctest::Approx(b[1]));
  }
}

TEST_CASE("interleave dofs orders node-major, axis-minor") {
  HighOrderMesh m;
  m.dim = 2;
  m.degree = 1;
  m.coords = {0, 0, 1, 0, 0, 1};
  m.connectivity = {0, 1, 2};
  m.node_class = {0, NodeClass{2}, 0};  // node 1 slides with fixed y
  const DofMap map = build_dof_map(m);
  CHECK(map.n == 5);
  const auto order = interleave_dofs({2, 0, 1}, map);
  REQUIRE(order.size() == 5);
  CHECK(order[0] == map.index(2, 0));
  CHECK(order[1] == map.index(2, 1));
  CHECK(order[2] == map.index(0, 0));
  CHECK(order[3] == map.index(0, 1));
  CHECK(order[4] == map.index(1, 0));
}

TEST_CASE("mdf ordering of a diagonal matrix is the identity") {
  std::vector<std::tuple<int, int, double>> t;
  for (int i = 0; i < 5; ++i) t.emplace_back(i, i, 1.0 + i);
  const SparseSymMatrix a = SparseSymMatrix::from_triplets(5, std::move(t));
  const auto perm = mdf_ordering(a);
  for (int i = 0; i < 5; ++i) CHECK(perm[static_cast<size_t>(i)] == i);
}

TEST_CASE("mdf on a tridiagonal matrix discards nothing") {
  oracle::Rng rng(83);
  const int n = 7;
  std::vector<std::tuple<int, int, double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, rng.uniform(2.0, 3.0));
    if (i + 1 < n) {
      const double v = rng.uniform(0.3, 1.0);
      t.emplace_back(i, i + 1, v);
      t.emplace_back(i + 1, i, v);
    }
  }
  const SparseSymMatrix a = SparseSymMatrix::from_triplets(n, std::move(t));
  const auto perm = mdf_ordering(a);
  CHECK(discarded_fill(a, perm) == doctest::Approx(0.0));
  CHECK(discarded_fill(a, perm) == doctest::Approx(brute_force_min_fill(a)));
}

TEST_CASE("mdf eliminates the hub of an arrow matrix last") {
  const int n = 5;
  std::vector<std::tuple<int, int, double>> t;
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, 2.0);
  for (int i = 1; i < n; ++i) {
    t.emplace_back(0, i, 1.0);
    t.emplace_back(i, 0, 1.0);
  }
  const SparseSymMatrix a = SparseSymMatrix::from_triplets(n, std::move(t));
  const auto perm = mdf_ordering(a);
  // spokes go first while eliminating the hub would still create fill; once
  // a single spoke remains the two orders tie at zero discard
  for (int t2 = 0; t2 < n - 2; ++t2) CHECK(perm[static_cast<size_t>(t2)] != 0);
  CHECK(discarded_fill(a, perm) == doctest::Approx(0.0));
  CHECK(brute_force_min_fill(a) == doctest::Approx(0.0));
  // identity ordering eliminates the hub first and discards fill
  std::vector<int> ident(static_cast<size_t>(n));
  std::iota(ident.begin(), ident.end(), 0);
  CHECK(discarded_fill(a, ident) > 0.0);
}

TEST_CASE("mdf beats or matches the identity ordering on random matrices") {
  oracle::Rng rng(89);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.integer(4, 28);
    const SparseSymMatrix a = random_sparse_sym(rng, n, 0.25);
    std::vector<int> ident(static_cast<size_t>(n));
    std::iota(ident.begin(), ident.end(), 0);
    const auto perm = mdf_ordering(a);
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) REQUIRE(sorted[static_cast<size_t>(i)] == i);
    CHECK(discarded_fill(a, perm) <= discarded_fill(a, ident) + 1e-12);
  }
}
