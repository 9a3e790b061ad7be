#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace meshopt {

// Dense d x d matrix with d in {1,2,3}, row major. Small enough to live on
// the stack everywhere; the spatial dimension is a runtime value.
struct SmallMat {
  int d = 0;
  std::array<double, 9> a{};

  SmallMat() = default;
  explicit SmallMat(int dim) : d(dim) {}

  static SmallMat identity(int dim) {
    SmallMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static SmallMat zero(int dim) { return SmallMat(dim); }

  double& operator()(int i, int j) { return a[static_cast<size_t>(i * d + j)]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i * d + j)]; }

  SmallMat transposed() const {
    SmallMat t(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double trace() const {
    double s = 0;
    for (int i = 0; i < d; ++i) s += (*this)(i, i);
    return s;
  }

  double det() const {
    if (d == 1) return a[0];
    if (d == 2) return a[0] * a[3] - a[1] * a[2];
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
  }

  SmallMat inverse() const {
    SmallMat inv(d);
    const double dt = det();
    if (dt == 0.0) throw std::runtime_error("SmallMat::inverse: singular matrix");
    if (d == 1) {
      inv.a[0] = 1.0 / dt;
    } else if (d == 2) {
      inv.a[0] = a[3] / dt;
      inv.a[1] = -a[1] / dt;
      inv.a[2] = -a[2] / dt;
      inv.a[3] = a[0] / dt;
    } else {
      inv(0, 0) = (a[4] * a[8] - a[5] * a[7]) / dt;
      inv(0, 1) = (a[2] * a[7] - a[1] * a[8]) / dt;
      inv(0, 2) = (a[1] * a[5] - a[2] * a[4]) / dt;
      inv(1, 0) = (a[5] * a[6] - a[3] * a[8]) / dt;
      inv(1, 1) = (a[0] * a[8] - a[2] * a[6]) / dt;
      inv(1, 2) = (a[2] * a[3] - a[0] * a[5]) / dt;
      inv(2, 0) = (a[3] * a[7] - a[4] * a[6]) / dt;
      inv(2, 1) = (a[1] * a[6] - a[0] * a[7]) / dt;
      inv(2, 2) = (a[0] * a[4] - a[1] * a[3]) / dt;
    }
    return inv;
  }
};

inline SmallMat operator*(const SmallMat& x, const SmallMat& y) {
  SmallMat z(x.d);
  for (int i = 0; i < x.d; ++i)
    for (int j = 0; j < x.d; ++j) {
      double s = 0;
      for (int k = 0; k < x.d; ++k) s += x(i, k) * y(k, j);
      z(i, j) = s;
    }
  return z;
}

inline SmallMat operator+(const SmallMat& x, const SmallMat& y) {
  SmallMat z(x.d);
  for (int i = 0; i < x.d * x.d; ++i) z.a[static_cast<size_t>(i)] = x.a[static_cast<size_t>(i)] + y.a[static_cast<size_t>(i)];
  return z;
}

inline SmallMat operator*(double c, const SmallMat& x) {
  SmallMat z(x.d);
  for (int i = 0; i < x.d * x.d; ++i) z.a[static_cast<size_t>(i)] = c * x.a[static_cast<size_t>(i)];
  return z;
}

// Frobenius inner product <X, Y>
inline double frob_dot(const SmallMat& x, const SmallMat& y) {
  double s = 0;
  for (int i = 0; i < x.d * x.d; ++i) s += x.a[static_cast<size_t>(i)] * y.a[static_cast<size_t>(i)];
  return s;
}

// Eigenvalues of a symmetric d x d matrix by cyclic Jacobi rotations,
// returned in ascending order.
inline std::array<double, 3> sym_eigenvalues(const SmallMat& m) {
  SmallMat w = m;
  const int d = m.d;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) off += w(i, j) * w(i, j);
    if (off < 1e-30 * (1.0 + w.trace() * w.trace())) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        if (std::abs(w(p, q)) < 1e-300) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * w(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        SmallMat r = SmallMat::identity(d);
        r(p, p) = c;
        r(q, q) = c;
        r(p, q) = s;
        r(q, p) = -s;
        w = r.transposed() * w * r;
      }
  }
  std::array<double, 3> ev{0, 0, 0};
  for (int i = 0; i < d; ++i) ev[static_cast<size_t>(i)] = w(i, i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (ev[static_cast<size_t>(j)] < ev[static_cast<size_t>(i)]) std::swap(ev[static_cast<size_t>(i)], ev[static_cast<size_t>(j)]);
  return ev;
}

// --- free-vector helpers over std::vector<double> ---

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

}  // namespace meshopt
