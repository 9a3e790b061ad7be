#include "meshopt/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshopt {

SparseSymMatrix SparseSymMatrix::from_triplets(int n, std::vector<std::tuple<int, int, double>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b) : std::get<1>(a) < std::get<1>(b);
  });
  SparseSymMatrix m;
  m.n = n;
  m.row_ptr.assign(static_cast<size_t>(n) + 1, 0);
  int last_i = -1, last_j = -1;
  for (const auto& [i, j, v] : entries) {
    if (i < 0 || i >= n || j < 0 || j >= n) throw std::invalid_argument("from_triplets: index out of range");
    if (i == last_i && j == last_j) {
      m.vals.back() += v;
    } else {
      m.col_idx.push_back(j);
      m.vals.push_back(v);
      m.row_ptr[static_cast<size_t>(i) + 1]++;
      last_i = i;
      last_j = j;
    }
  }
  for (int i = 0; i < n; ++i) m.row_ptr[static_cast<size_t>(i) + 1] += m.row_ptr[static_cast<size_t>(i)];
  return m;
}

SparseSymMatrix SparseSymMatrix::from_pattern(int n, const std::vector<std::vector<int>>& cols_per_row) {
  SparseSymMatrix m;
  m.n = n;
  m.row_ptr.assign(static_cast<size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto cols = cols_per_row[static_cast<size_t>(i)];
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    for (int j : cols) {
      m.col_idx.push_back(j);
      m.vals.push_back(0.0);
    }
    m.row_ptr[static_cast<size_t>(i) + 1] = static_cast<int>(m.col_idx.size());
  }
  return m;
}

int SparseSymMatrix::find(int i, int j) const {
  const int lo = row_ptr[static_cast<size_t>(i)], hi = row_ptr[static_cast<size_t>(i) + 1];
  auto begin = col_idx.begin() + lo, end = col_idx.begin() + hi;
  auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return -1;
  return static_cast<int>(it - col_idx.begin());
}

double SparseSymMatrix::value(int i, int j) const {
  const int k = find(i, j);
  return k < 0 ? 0.0 : vals[static_cast<size_t>(k)];
}

void SparseSymMatrix::matvec(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
      s += vals[static_cast<size_t>(k)] * x[static_cast<size_t>(col_idx[static_cast<size_t>(k)])];
    y[static_cast<size_t>(i)] = s;
  }
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const int k = find(i, i);
    if (k >= 0) d[static_cast<size_t>(i)] = vals[static_cast<size_t>(k)];
  }
  return d;
}

SparseSymMatrix SparseSymMatrix::permuted(std::span<const int> perm) const {
  std::vector<int> inv(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) inv[static_cast<size_t>(perm[static_cast<size_t>(i)])] = i;
  std::vector<std::tuple<int, int, double>> trips;
  trips.reserve(static_cast<size_t>(nnz()));
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
      trips.emplace_back(inv[static_cast<size_t>(i)], inv[static_cast<size_t>(col_idx[static_cast<size_t>(k)])],
                         vals[static_cast<size_t>(k)]);
  return from_triplets(n, std::move(trips));
}

double SparseSymMatrix::row_max_abs(int i) const {
  double m = 0;
  for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
    m = std::max(m, std::abs(vals[static_cast<size_t>(k)]));
  return m;
}

}  // namespace meshopt
