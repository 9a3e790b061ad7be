#pragma once

#include <span>
#include <tuple>
#include <vector>

namespace meshopt {

// Square sparse matrix in CSR form with a structurally symmetric pattern and
// both triangles stored, so the matvec never mirrors entries.
struct SparseSymMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;  // sorted within each row
  std::vector<double> vals;

  static SparseSymMatrix from_triplets(int n, std::vector<std::tuple<int, int, double>> entries);
  static SparseSymMatrix from_pattern(int n, const std::vector<std::vector<int>>& cols_per_row);

  int nnz() const { return static_cast<int>(col_idx.size()); }
  // Value index of entry (i, j), or -1 if outside the pattern.
  int find(int i, int j) const;
  double value(int i, int j) const;

  void matvec(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;
  // B(i, j) = A(perm_i, perm_j)
  SparseSymMatrix permuted(std::span<const int> perm) const;
  // Largest absolute entry in row i.
  double row_max_abs(int i) const;
};

}  // namespace meshopt
