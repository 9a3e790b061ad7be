#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "meshopt/linalg.hpp"
#include "meshopt/reference_simplex.hpp"

namespace meshopt {

// Per-node boundary classification as a bitmask of fixed coordinate axes.
// 0 = interior, all-axes = fixed vertex, anything else slides on the boundary
// with the flagged axes held.
using NodeClass = std::uint8_t;

inline NodeClass all_axes_fixed(int dim) { return static_cast<NodeClass>((1 << dim) - 1); }
inline bool axis_fixed(NodeClass c, int axis) { return (c >> axis) & 1; }

struct Box {
  std::array<double, 3> lo{-0.5, -0.5, -0.5};
  std::array<double, 3> hi{0.5, 0.5, 0.5};
};

// Nodal simplicial mesh of fixed polynomial degree. Node coordinates are
// stored node-major; connectivity lists n_p global node ids per element in
// the ReferenceSimplex lattice enumeration.
struct HighOrderMesh {
  int dim = 0;
  int degree = 0;
  std::vector<double> coords;       // num_nodes * dim
  std::vector<int> connectivity;    // num_elems * nodes_per_elem
  std::vector<NodeClass> node_class;

  int num_nodes() const { return static_cast<int>(coords.size()) / dim; }
  int nodes_per_elem() const;
  int num_elems() const { return static_cast<int>(connectivity.size()) / nodes_per_elem(); }
  const int* elem(int e) const { return connectivity.data() + static_cast<size_t>(e) * static_cast<size_t>(nodes_per_elem()); }
  const double* node(int i) const { return coords.data() + static_cast<size_t>(i) * static_cast<size_t>(dim); }
  double* node(int i) { return coords.data() + static_cast<size_t>(i) * static_cast<size_t>(dim); }

  // Structural checks: ids in range and distinct within elements, class sized.
  void validate_structure() const;
};

// Free-coordinate numbering: node-major, axis-minor, fixed axes skipped.
struct DofMap {
  int n = 0;
  int dim = 0;
  std::vector<int> free_index;            // num_nodes * dim, -1 when fixed
  std::vector<std::array<int, 2>> owner;  // per free dof: (node, axis)

  int index(int node, int axis) const { return free_index[static_cast<size_t>(node) * static_cast<size_t>(dim) + static_cast<size_t>(axis)]; }
  void gather(const HighOrderMesh& mesh, std::vector<double>& x) const;
  void scatter(const std::vector<double>& x, HighOrderMesh& mesh) const;
};

DofMap build_dof_map(const HighOrderMesh& mesh);

// point = sum_i phi_i(xi) x_i and its d x d Jacobian.
void physical_map(const ReferenceSimplex& ref, const std::vector<double>& element_coords, const double* xi,
                  double* point, SmallMat* jacobian);

// Constant Jacobian of the affine map from the master simplex onto the
// unit-edge equilateral simplex.
SmallMat equilateral_map(int dim);

// Straight-sided degree-p mesh of an axis-aligned box. `subdivisions` counts
// lattice cells per side and must be a positive multiple of `degree`, so that
// meshes of different degree at the same subdivision count share their nodes.
HighOrderMesh generate_structured_mesh(const Box& box, int subdivisions, int degree, int dim);

// True when det(Dphi_P) > 0 at every quadrature point of every element.
bool mesh_is_valid(const HighOrderMesh& mesh);

// Plain ASCII mesh format. Loading rejects meshes that fail the positivity
// check above.
void write_mesh(const HighOrderMesh& mesh, const std::string& path);
HighOrderMesh read_mesh(const std::string& path);
void write_mesh_stream(const HighOrderMesh& mesh, std::ostream& os);
HighOrderMesh read_mesh_stream(std::istream& is);

}  // namespace meshopt
