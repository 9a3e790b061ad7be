#pragma once

#include <string>
#include <vector>

#include "meshopt/mesh.hpp"
#include "meshopt/metric.hpp"

namespace meshopt {

// Position t of the VTK Lagrange cell ordering -> local lattice node id.
std::vector<int> vtk_lagrange_permutation(int dim, int degree);

// Legacy ASCII unstructured grid with Lagrange triangle/tetrahedron cells.
void write_vtk_lagrange(const HighOrderMesh& mesh, const std::string& path);

// Element-wise sub-sampled linear cells colored by the pointwise quality
// 1/eta. subdiv <= 0 selects degree+1 subdivisions per edge.
void write_vtk_quality(const HighOrderMesh& mesh, const MetricField& metric, const std::string& path, int subdiv = 0);

}  // namespace meshopt
