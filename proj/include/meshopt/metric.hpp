#pragma once

#include <memory>
#include <string>
#include <vector>

#include "meshopt/linalg.hpp"

namespace meshopt {

// SPD matrix field prescribing target stretching and alignment. The distortion
// Hessian needs the field twice differentiable, so implementations expose the
// first and second derivatives of M with respect to the evaluation point.
class MetricField {
 public:
  virtual ~MetricField() = default;
  virtual int dim() const = 0;
  virtual void eval(const double* p, SmallMat& m) const = 0;
  // dm[c] = dM/dp_c, d2m[c*dim+e] = d2M/dp_c dp_e (filled symmetric).
  virtual void eval_derivs(const double* p, SmallMat& m, SmallMat* dm, SmallMat* d2m) const = 0;
};

class IdentityMetric final : public MetricField {
 public:
  explicit IdentityMetric(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  void eval(const double*, SmallMat& m) const override { m = SmallMat::identity(dim_); }
  void eval_derivs(const double*, SmallMat& m, SmallMat* dm, SmallMat* d2m) const override {
    m = SmallMat::identity(dim_);
    for (int c = 0; c < dim_; ++c) dm[c] = SmallMat::zero(dim_);
    for (int c = 0; c < dim_ * dim_; ++c) d2m[c] = SmallMat::zero(dim_);
  }

 private:
  int dim_;
};

enum class LayerKind { line, cross };

// Component of a deformation map: either the plain coordinate p[a], or
// scale * (10 p[a] - cos(2 pi p[b]) cos(2 pi p[c])) with b or c possibly
// absent (that cosine factor is then the constant 1).
struct MapComponent {
  bool linear = true;
  int a = 0;
  int b = -1;
  int c = -1;
  double scale = 1.0;

  static MapComponent coord(int axis) { return {true, axis, -1, -1, 1.0}; }
  static MapComponent layered(int axis, int cb, int cc, double s) { return {false, axis, cb, cc, s}; }

  double value(const double* p) const;
  double deriv1(const double* p, int m) const;
  double deriv2(const double* p, int m, int l) const;
  double deriv3(const double* p, int m, int l, int o) const;
};

// Shear layer target: M(p) = J(p)^T D(phi(p)) J(p) with J = grad(phi) and a
// diagonal layer matrix D whose stretched entries follow 1/h^2.
struct ShearLayerSpec {
  std::string name;
  int dim = 2;
  LayerKind kind = LayerKind::line;
  double h_min = 0.01;
  double gamma_metric = 2.0;
  std::vector<MapComponent> map;  // dim components
};

double size_h(double t, double h_min, double gamma_metric);
double stretch_H(double t, double h_min, double gamma_metric);

// Layer matrix D evaluated at a deformed point t = phi(p).
SmallMat diagonal_metric(const ShearLayerSpec& spec, const double* t);

class ShearLayerMetric final : public MetricField {
 public:
  explicit ShearLayerMetric(ShearLayerSpec spec) : spec_(std::move(spec)) {}
  int dim() const override { return spec_.dim; }
  const ShearLayerSpec& spec() const { return spec_; }
  void eval(const double* p, SmallMat& m) const override;
  void eval_derivs(const double* p, SmallMat& m, SmallMat* dm, SmallMat* d2m) const override;

 private:
  ShearLayerSpec spec_;
};

SmallMat metric_eval(const ShearLayerSpec& spec, const double* p);

// sqrt(lambda_max / lambda_min); input must be SPD.
double aniso_ratio(const SmallMat& m);
// sqrt(det M) / lambda_min^(d/2); input must be SPD.
double aniso_quotient(const SmallMat& m);

// The six named target metrics: Line, Curve, Curves (2D) and Plane, Surface,
// Surfaces (3D).
std::vector<ShearLayerSpec> builtin_metrics();
ShearLayerSpec builtin_metric(const std::string& name);

}  // namespace meshopt
