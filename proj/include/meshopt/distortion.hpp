#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "meshopt/mesh.hpp"
#include "meshopt/metric.hpp"
#include "meshopt/quadrature.hpp"
#include "meshopt/sparse.hpp"

namespace meshopt {

// Pointwise distortion data at one master point of one element.
// A maps the equilateral element onto the physical one through the master;
// sigma is the signed metric determinant and eta the distortion (infinite for
// non-positive sigma).
struct DistortionSample {
  SmallMat a;
  double sigma = 0;
  double sigma0 = 0;
  double eta = std::numeric_limits<double>::infinity();
};

DistortionSample pointwise_distortion(const ReferenceSimplex& ref, const std::vector<double>& element_coords,
                                      const double* xi, const MetricField& metric);

// L1 mean of eta over the equilateral element, by quadrature. The element
// quality is its reciprocal.
double element_distortion(const ReferenceSimplex& ref, const QuadratureRule& rule,
                          const std::vector<double>& element_coords, const MetricField& metric);

struct ObjectiveEval {
  bool valid = false;  // false encodes the infinite objective; derivatives absent
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> gradient;
  SparseSymMatrix hessian;
};

// Twice-differentiable objective with a barrier region where evaluations are
// flagged invalid instead of returning floating-point infinities.
class ObjectiveFunction {
 public:
  virtual ~ObjectiveFunction() = default;
  virtual int n() const = 0;
  virtual ObjectiveEval evaluate(std::span<const double> x, bool with_derivatives) const = 0;
  double value(std::span<const double> x) const {
    const ObjectiveEval ev = evaluate(x, false);
    return ev.valid ? ev.value : std::numeric_limits<double>::infinity();
  }
};

// Sum over elements of the squared L2 norm of eta over the equilateral
// element, as a function of the free node coordinates, with analytic gradient
// and node-adjacency block-sparse Hessian.
class DistortionObjective final : public ObjectiveFunction {
 public:
  DistortionObjective(const HighOrderMesh& mesh, const DofMap& dofmap, const MetricField& metric);

  int n() const override { return dofmap_.n; }
  const DofMap& dofmap() const { return dofmap_; }

  ObjectiveEval evaluate(std::span<const double> x, bool with_derivatives) const override;

 private:
  const HighOrderMesh& mesh_;
  const MetricField& metric_;
  DofMap dofmap_;
  ReferenceSimplex ref_;
  QuadratureRule rule_;
  SmallMat einv_;
  double det_e_ = 0;
  std::vector<double> phi_;      // nq * np
  std::vector<double> rg_;       // nq * np * d, basis gradients times Einv
  std::vector<int> elem_dofs_;   // per element, np * d free indices (-1 fixed)
  SparseSymMatrix pattern_;
  std::vector<int> scatter_;     // per element, (np*d)^2 value indices (-1 fixed)
};

struct MeasureStats {
  std::string measure;
  double min = 0, max = 0, mean = 0, std_dev = 0;
  int count = 0;
};

// Metric-weighted shape quality, edge length, face area and element volume
// statistics (area doubles as the element measure in 2D).
std::vector<MeasureStats> mesh_statistics(const HighOrderMesh& mesh, const MetricField& metric);
void write_statistics_csv(const std::vector<MeasureStats>& stats, std::ostream& os);

}  // namespace meshopt
