#pragma once

#include <array>
#include <vector>

namespace meshopt {

// Equispaced lattice multi-indices (i,j[,k]) with i+j+k <= m, in the canonical
// enumeration (k outer, j middle, i inner).
std::vector<std::array<int, 3>> simplex_lattice(int dim, int m);

// Decomposition of the degree-m lattice into linear sub-simplices with
// positive orientation. Entries index into simplex_lattice(dim, m).
std::vector<std::array<int, 4>> simplex_subcells(int dim, int m);

// Nodal simplex element of a given degree with Lagrange shape functions on the
// equispaced lattice. The basis is represented in Bernstein form; the
// coefficients come from inverting the Bernstein Vandermonde at the lattice.
class ReferenceSimplex {
 public:
  ReferenceSimplex(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int num_nodes() const { return num_nodes_; }

  // Master coordinates of lattice node i.
  const double* node(int i) const { return nodes_.data() + static_cast<size_t>(i) * static_cast<size_t>(dim_); }
  const std::vector<std::array<int, 3>>& lattice() const { return lattice_; }

  // Local ids of the simplex corners.
  const std::array<int, 4>& vertex_nodes() const { return vertex_nodes_; }
  // Lattice nodes along each edge, endpoints included, ordered first to second
  // corner. 2D edges: (0,1), (1,2), (2,0); 3D edges: (0,1), (1,2), (2,0),
  // (0,3), (1,3), (2,3).
  const std::vector<std::vector<int>>& edge_nodes() const { return edge_nodes_; }
  // 3D only: lattice nodes of each face in the 2D lattice enumeration of the
  // face corners. Faces: (0,1,2), (0,1,3), (0,2,3), (1,2,3).
  const std::vector<std::vector<int>>& face_nodes() const { return face_nodes_; }
  // Linear sub-simplices covering the element.
  const std::vector<std::array<int, 4>>& subcells() const { return subcells_; }

  // Shape function values at a master point; phi must hold num_nodes().
  void eval_basis(const double* xi, double* phi) const;
  // Values and gradients; grad is node-major with dim() components per node.
  void eval_basis_grad(const double* xi, double* phi, double* grad) const;

  // Local node index of a lattice multi-index.
  int lattice_index(int i, int j, int k) const;

 private:
  void bernstein(const double* xi, double* b, double* db) const;

  int dim_;
  int degree_;
  int num_nodes_;
  std::vector<std::array<int, 3>> lattice_;
  std::vector<double> nodes_;
  std::array<int, 4> vertex_nodes_{};
  std::vector<std::vector<int>> edge_nodes_;
  std::vector<std::vector<int>> face_nodes_;
  std::vector<std::array<int, 4>> subcells_;
  std::vector<double> multinomial_;
  std::vector<double> coef_;  // coef_[k*n+m]: Bernstein coefficients of phi_k
};

ReferenceSimplex build_reference_simplex(int dim, int degree);

}  // namespace meshopt
