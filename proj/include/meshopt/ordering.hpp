#pragma once

#include <span>
#include <string>
#include <vector>

#include "meshopt/mesh.hpp"
#include "meshopt/metric.hpp"
#include "meshopt/sparse.hpp"

namespace meshopt {

struct NodeOrdering {
  std::vector<int> node_perm;  // node_perm[new_id] = old_id
  std::string source;          // "spectral" or "input"
};

// Stiffness and consistent mass of the Neumann Laplace-Beltrami pencil,
// assembled piecewise-linearly over the element sub-lattices with the
// pullback metric G = Dphi^T M Dphi frozen per sub-element.
std::pair<SparseSymMatrix, SparseSymMatrix> spectral_pencil(const HighOrderMesh& mesh, const MetricField& metric);

// Metric-aware node ordering from the eigenfunction with smallest nonzero
// eigenvalue of K u = lambda B u. Nodes sort ascending by the eigenfunction,
// ties by id; the sign is fixed so the first distinguishable node gets a
// non-positive value.
NodeOrdering spectral_node_ordering(const HighOrderMesh& mesh, const MetricField& metric);

HighOrderMesh apply_node_ordering(const HighOrderMesh& mesh, const std::vector<int>& node_perm);

// Free dofs listed node-major in node_perm order, axis-minor within a node.
std::vector<int> interleave_dofs(const std::vector<int>& node_perm, const DofMap& dofmap);

// Greedy minimum-discarded-fill elimination ordering for a zero-fill
// incomplete factorization: each step eliminates the unknown whose fill mass
// outside the retained pattern is smallest, then refreshes the weights of its
// neighbors.
std::vector<int> mdf_ordering(const SparseSymMatrix& h0);

// Total squared fill mass discarded by zero-fill elimination in the given
// order; the quantity the MDF ordering greedily minimizes.
double discarded_fill(const SparseSymMatrix& a, std::span<const int> perm);

}  // namespace meshopt
