#include "meshopt/reference_simplex.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace meshopt {

std::vector<std::array<int, 3>> simplex_lattice(int dim, int m) {
  std::vector<std::array<int, 3>> lat;
  if (dim == 2) {
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m - j; ++i) lat.push_back({i, j, 0});
  } else {
    for (int k = 0; k <= m; ++k)
      for (int j = 0; j <= m - k; ++j)
        for (int i = 0; i <= m - k - j; ++i) lat.push_back({i, j, k});
  }
  return lat;
}

namespace {

int lat_find(const std::map<std::array<int, 3>, int>& ix, int i, int j, int k) {
  auto it = ix.find({i, j, k});
  if (it == ix.end()) throw std::logic_error("simplex_subcells: lattice index out of range");
  return it->second;
}

double orient3(const std::vector<std::array<int, 3>>& lat, const std::array<int, 4>& t) {
  double m[3][3];
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r)
      m[r][c] = lat[static_cast<size_t>(t[static_cast<size_t>(c + 1)])][static_cast<size_t>(r)] -
                lat[static_cast<size_t>(t[0])][static_cast<size_t>(r)];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

std::vector<std::array<int, 4>> simplex_subcells(int dim, int m) {
  const auto lat = simplex_lattice(dim, m);
  std::map<std::array<int, 3>, int> ix;
  for (size_t n = 0; n < lat.size(); ++n) ix[lat[n]] = static_cast<int>(n);
  std::vector<std::array<int, 4>> cells;
  if (dim == 2) {
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m - j; ++i) {
        cells.push_back({lat_find(ix, i, j, 0), lat_find(ix, i + 1, j, 0), lat_find(ix, i, j + 1, 0), -1});
        if (i + j + 2 <= m)
          cells.push_back({lat_find(ix, i + 1, j + 1, 0), lat_find(ix, i, j + 1, 0), lat_find(ix, i + 1, j, 0), -1});
      }
  } else {
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m - k; ++j)
        for (int i = 0; i < m - k - j; ++i) {
          cells.push_back({lat_find(ix, i, j, k), lat_find(ix, i + 1, j, k), lat_find(ix, i, j + 1, k),
                           lat_find(ix, i, j, k + 1)});
          if (i + j + k + 2 <= m) {
            // octahedron between the corner tets, split along the a-f diagonal
            const int a = lat_find(ix, i + 1, j, k);
            const int b = lat_find(ix, i, j + 1, k);
            const int c = lat_find(ix, i, j, k + 1);
            const int d = lat_find(ix, i + 1, j + 1, k);
            const int e = lat_find(ix, i + 1, j, k + 1);
            const int f = lat_find(ix, i, j + 1, k + 1);
            cells.push_back({a, f, b, d});
            cells.push_back({a, f, d, e});
            cells.push_back({a, f, e, c});
            cells.push_back({a, f, c, b});
          }
          if (i + j + k + 3 <= m)
            cells.push_back({lat_find(ix, i + 1, j + 1, k), lat_find(ix, i + 1, j, k + 1),
                             lat_find(ix, i, j + 1, k + 1), lat_find(ix, i + 1, j + 1, k + 1)});
        }
    for (auto& t : cells)
      if (orient3(lat, t) < 0) std::swap(t[2], t[3]);
  }
  return cells;
}

ReferenceSimplex::ReferenceSimplex(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("ReferenceSimplex: dim must be 2 or 3");
  if (degree < 1 || degree > 8) throw std::invalid_argument("ReferenceSimplex: degree must be in [1, 8]");

  lattice_ = simplex_lattice(dim, degree);
  num_nodes_ = static_cast<int>(lattice_.size());
  const double p = degree;
  nodes_.reserve(static_cast<size_t>(num_nodes_) * static_cast<size_t>(dim));
  for (const auto& a : lattice_)
    for (int c = 0; c < dim; ++c) nodes_.push_back(a[static_cast<size_t>(c)] / p);

  vertex_nodes_ = {lattice_index(0, 0, 0), lattice_index(degree, 0, 0), lattice_index(0, degree, 0), -1};
  if (dim == 3) vertex_nodes_[3] = lattice_index(0, 0, degree);

  auto edge = [&](std::array<int, 3> a, std::array<int, 3> b) {
    std::vector<int> ids;
    for (int t = 0; t <= degree; ++t)
      ids.push_back(lattice_index(a[0] + t * (b[0] - a[0]) / degree, a[1] + t * (b[1] - a[1]) / degree,
                                  a[2] + t * (b[2] - a[2]) / degree));
    return ids;
  };
  const std::array<int, 3> v0{0, 0, 0}, v1{degree, 0, 0}, v2{0, degree, 0}, v3{0, 0, degree};
  edge_nodes_ = {edge(v0, v1), edge(v1, v2), edge(v2, v0)};
  if (dim == 3) {
    edge_nodes_.push_back(edge(v0, v3));
    edge_nodes_.push_back(edge(v1, v3));
    edge_nodes_.push_back(edge(v2, v3));
    auto face = [&](std::array<int, 3> a, std::array<int, 3> b, std::array<int, 3> c) {
      std::vector<int> ids;
      for (int j = 0; j <= degree; ++j)
        for (int i = 0; i <= degree - j; ++i) {
          std::array<int, 3> m;
          for (int r = 0; r < 3; ++r)
            m[static_cast<size_t>(r)] = a[static_cast<size_t>(r)] +
                                        i * (b[static_cast<size_t>(r)] - a[static_cast<size_t>(r)]) / degree +
                                        j * (c[static_cast<size_t>(r)] - a[static_cast<size_t>(r)]) / degree;
          ids.push_back(lattice_index(m[0], m[1], m[2]));
        }
      return ids;
    };
    face_nodes_ = {face(v0, v1, v2), face(v0, v1, v3), face(v0, v2, v3), face(v1, v2, v3)};
  }
  subcells_ = simplex_subcells(dim, degree);

  // multinomial factors p! / prod(alpha_i!)
  auto fact = [](int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  multinomial_.resize(static_cast<size_t>(num_nodes_));
  for (int m = 0; m < num_nodes_; ++m) {
    const auto& a = lattice_[static_cast<size_t>(m)];
    const int a0 = degree - a[0] - a[1] - a[2];
    multinomial_[static_cast<size_t>(m)] = fact(degree) / (fact(a0) * fact(a[0]) * fact(a[1]) * fact(a[2]));
  }

  // Vandermonde V[k][m] = B_m(node_k), inverted by Gauss-Jordan with partial
  // pivoting; phi_k = sum_m coef_[k][m] B_m.
  const int n = num_nodes_;
  std::vector<double> v(static_cast<size_t>(n) * static_cast<size_t>(n));
  std::vector<double> b(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    bernstein(node(k), b.data(), nullptr);
    for (int m = 0; m < n; ++m) v[static_cast<size_t>(k) * static_cast<size_t>(n) + static_cast<size_t>(m)] = b[static_cast<size_t>(m)];
  }
  std::vector<double> inv(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(i)] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(v[static_cast<size_t>(r) * static_cast<size_t>(n) + static_cast<size_t>(col)]) >
          std::abs(v[static_cast<size_t>(piv) * static_cast<size_t>(n) + static_cast<size_t>(col)]))
        piv = r;
    if (v[static_cast<size_t>(piv) * static_cast<size_t>(n) + static_cast<size_t>(col)] == 0.0)
      throw std::runtime_error("ReferenceSimplex: singular Vandermonde");
    if (piv != col)
      for (int c = 0; c < n; ++c) {
        std::swap(v[static_cast<size_t>(piv) * static_cast<size_t>(n) + static_cast<size_t>(c)],
                  v[static_cast<size_t>(col) * static_cast<size_t>(n) + static_cast<size_t>(c)]);
        std::swap(inv[static_cast<size_t>(piv) * static_cast<size_t>(n) + static_cast<size_t>(c)],
                  inv[static_cast<size_t>(col) * static_cast<size_t>(n) + static_cast<size_t>(c)]);
      }
    const double pv = v[static_cast<size_t>(col) * static_cast<size_t>(n) + static_cast<size_t>(col)];
    for (int c = 0; c < n; ++c) {
      v[static_cast<size_t>(col) * static_cast<size_t>(n) + static_cast<size_t>(c)] /= pv;
      inv[static_cast<size_t>(col) * static_cast<size_t>(n) + static_cast<size_t>(c)] /= pv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = v[static_cast<size_t>(r) * static_cast<size_t>(n) + static_cast<size_t>(col)];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        v[static_cast<size_t>(r) * static_cast<size_t>(n) + static_cast<size_t>(c)] -=
            f * v[static_cast<size_t>(col) * static_cast<size_t>(n) + static_cast<size_t>(c)];
        inv[static_cast<size_t>(r) * static_cast<size_t>(n) + static_cast<size_t>(c)] -=
            f * inv[static_cast<size_t>(col) * static_cast<size_t>(n) + static_cast<size_t>(c)];
      }
    }
  }
  // coef_[k][m] = inv[m][k]
  coef_.resize(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m)
      coef_[static_cast<size_t>(k) * static_cast<size_t>(n) + static_cast<size_t>(m)] =
          inv[static_cast<size_t>(m) * static_cast<size_t>(n) + static_cast<size_t>(k)];
}

int ReferenceSimplex::lattice_index(int i, int j, int k) const {
  for (int m = 0; m < num_nodes_; ++m)
    if (lattice_[static_cast<size_t>(m)][0] == i && lattice_[static_cast<size_t>(m)][1] == j &&
        lattice_[static_cast<size_t>(m)][2] == k)
      return m;
  throw std::invalid_argument("ReferenceSimplex::lattice_index: no such lattice node");
}

void ReferenceSimplex::bernstein(const double* xi, double* b, double* db) const {
  const int nb = dim_ + 1;
  double lam[4] = {1.0, 0.0, 0.0, 0.0};
  for (int c = 0; c < dim_; ++c) {
    lam[c + 1] = xi[c];
    lam[0] -= xi[c];
  }
  for (int m = 0; m < num_nodes_; ++m) {
    const auto& a = lattice_[static_cast<size_t>(m)];
    int alpha[4] = {degree_ - a[0] - a[1] - a[2], a[0], a[1], a[2]};
    double pw[4];
    for (int c = 0; c < nb; ++c) {
      pw[c] = 1.0;
      for (int t = 0; t < alpha[c]; ++t) pw[c] *= lam[c];
    }
    double val = multinomial_[static_cast<size_t>(m)];
    for (int c = 0; c < nb; ++c) val *= pw[c];
    b[m] = val;
    if (db) {
      // d/dlam_c then chain through lam0 = 1 - sum(xi)
      double dlam[4];
      for (int c = 0; c < nb; ++c) {
        if (alpha[c] == 0) {
          dlam[c] = 0.0;
          continue;
        }
        double g = multinomial_[static_cast<size_t>(m)] * alpha[c];
        for (int t = 0; t < alpha[c] - 1; ++t) g *= lam[c];
        for (int o = 0; o < nb; ++o)
          if (o != c) g *= pw[o];
        dlam[c] = g;
      }
      for (int r = 0; r < dim_; ++r) db[m * dim_ + r] = dlam[r + 1] - dlam[0];
    }
  }
}

void ReferenceSimplex::eval_basis(const double* xi, double* phi) const {
  const int n = num_nodes_;
  std::vector<double> b(static_cast<size_t>(n));
  bernstein(xi, b.data(), nullptr);
  for (int k = 0; k < n; ++k) {
    double s = 0;
    const double* ck = coef_.data() + static_cast<size_t>(k) * static_cast<size_t>(n);
    for (int m = 0; m < n; ++m) s += ck[m] * b[static_cast<size_t>(m)];
    phi[k] = s;
  }
}

void ReferenceSimplex::eval_basis_grad(const double* xi, double* phi, double* grad) const {
  const int n = num_nodes_;
  std::vector<double> b(static_cast<size_t>(n));
  std::vector<double> db(static_cast<size_t>(n) * static_cast<size_t>(dim_));
  bernstein(xi, b.data(), db.data());
  for (int k = 0; k < n; ++k) {
    const double* ck = coef_.data() + static_cast<size_t>(k) * static_cast<size_t>(n);
    double s = 0;
    double g[3] = {0, 0, 0};
    for (int m = 0; m < n; ++m) {
      s += ck[m] * b[static_cast<size_t>(m)];
      for (int r = 0; r < dim_; ++r) g[r] += ck[m] * db[static_cast<size_t>(m) * static_cast<size_t>(dim_) + static_cast<size_t>(r)];
    }
    phi[k] = s;
    for (int r = 0; r < dim_; ++r) grad[k * dim_ + r] = g[r];
  }
}

ReferenceSimplex build_reference_simplex(int dim, int degree) { return ReferenceSimplex(dim, degree); }

}  // namespace meshopt
