#include "meshopt/vtk.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "meshopt/distortion.hpp"
#include "meshopt/quadrature.hpp"

namespace meshopt {

namespace {

// VTK Lagrange ordering: corners, then edge interiors edge by edge, then the
// face (recursively as an order n-3 triangle), then for tetrahedra the volume
// interior as an order n-4 tetrahedron.
void tri_order(int n, int i0, int j0, std::vector<std::array<int, 2>>& out) {
  if (n < 0) return;
  if (n == 0) {
    out.push_back({i0, j0});
    return;
  }
  out.push_back({i0, j0});
  out.push_back({i0 + n, j0});
  out.push_back({i0, j0 + n});
  for (int t = 1; t < n; ++t) out.push_back({i0 + t, j0});
  for (int t = 1; t < n; ++t) out.push_back({i0 + n - t, j0 + t});
  for (int t = 1; t < n; ++t) out.push_back({i0, j0 + n - t});
  tri_order(n - 3, i0 + 1, j0 + 1, out);
}

void tet_order(int n, int i0, int j0, int k0, std::vector<std::array<int, 3>>& out) {
  if (n < 0) return;
  if (n == 0) {
    out.push_back({i0, j0, k0});
    return;
  }
  const std::array<std::array<int, 3>, 4> v{{{i0, j0, k0}, {i0 + n, j0, k0}, {i0, j0 + n, k0}, {i0, j0, k0 + n}}};
  for (const auto& c : v) out.push_back(c);
  const int edges[6][2] = {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};
  for (const auto& e : edges)
    for (int t = 1; t < n; ++t) {
      std::array<int, 3> pt;
      for (int a = 0; a < 3; ++a)
        pt[static_cast<size_t>(a)] = v[static_cast<size_t>(e[0])][static_cast<size_t>(a)] +
                                     t * (v[static_cast<size_t>(e[1])][static_cast<size_t>(a)] -
                                          v[static_cast<size_t>(e[0])][static_cast<size_t>(a)]) /
                                         n;
      out.push_back(pt);
    }
  const int faces[4][3] = {{0, 1, 3}, {1, 2, 3}, {2, 0, 3}, {0, 2, 1}};
  std::vector<std::array<int, 2>> sub;
  for (const auto& fc : faces) {
    sub.clear();
    tri_order(n - 3, 0, 0, sub);
    for (const auto& s : sub) {
      std::array<int, 3> pt;
      for (int a = 0; a < 3; ++a) {
        const int ea = v[static_cast<size_t>(fc[1])][static_cast<size_t>(a)] - v[static_cast<size_t>(fc[0])][static_cast<size_t>(a)];
        const int eb = v[static_cast<size_t>(fc[2])][static_cast<size_t>(a)] - v[static_cast<size_t>(fc[0])][static_cast<size_t>(a)];
        pt[static_cast<size_t>(a)] =
            v[static_cast<size_t>(fc[0])][static_cast<size_t>(a)] + (s[0] + 1) * ea / n + (s[1] + 1) * eb / n;
      }
      out.push_back(pt);
    }
  }
  tet_order(n - 4, i0 + 1, j0 + 1, k0 + 1, out);
}

}  // namespace

std::vector<int> vtk_lagrange_permutation(int dim, int degree) {
  const ReferenceSimplex ref(dim, degree);
  std::vector<int> perm;
  if (dim == 2) {
    std::vector<std::array<int, 2>> order;
    tri_order(degree, 0, 0, order);
    for (const auto& b : order) perm.push_back(ref.lattice_index(b[0], b[1], 0));
  } else {
    std::vector<std::array<int, 3>> order;
    tet_order(degree, 0, 0, 0, order);
    for (const auto& b : order) perm.push_back(ref.lattice_index(b[0], b[1], b[2]));
  }
  if (static_cast<int>(perm.size()) != ref.num_nodes())
    throw std::logic_error("vtk_lagrange_permutation: ordering does not cover the lattice");
  return perm;
}

void write_vtk_lagrange(const HighOrderMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_vtk_lagrange: cannot open " + path);
  os.precision(12);
  os << "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double* x = mesh.node(i);
    os << x[0] << " " << x[1] << " " << (mesh.dim == 3 ? x[2] : 0.0) << "\n";
  }
  const auto perm = vtk_lagrange_permutation(mesh.dim, mesh.degree);
  const int np = mesh.nodes_per_elem();
  os << "CELLS " << mesh.num_elems() << " " << mesh.num_elems() * (np + 1) << "\n";
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* ids = mesh.elem(e);
    os << np;
    for (int t = 0; t < np; ++t) os << " " << ids[perm[static_cast<size_t>(t)]];
    os << "\n";
  }
  int cell_type;
  if (mesh.degree == 1)
    cell_type = mesh.dim == 2 ? 5 : 10;
  else
    cell_type = mesh.dim == 2 ? 69 : 71;
  os << "CELL_TYPES " << mesh.num_elems() << "\n";
  for (int e = 0; e < mesh.num_elems(); ++e) os << cell_type << "\n";
}

void write_vtk_quality(const HighOrderMesh& mesh, const MetricField& metric, const std::string& path, int subdiv) {
  const int d = mesh.dim;
  const int m = subdiv > 0 ? subdiv : mesh.degree + 1;
  const ReferenceSimplex ref(d, mesh.degree);
  const auto lattice = simplex_lattice(d, m);
  const auto cells = simplex_subcells(d, m);
  const int pts_per_elem = static_cast<int>(lattice.size());

  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_vtk_quality: cannot open " + path);
  os.precision(8);
  os << "# vtk DataFile Version 3.0\npointwise quality\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_elems() * pts_per_elem << " double\n";

  std::vector<double> quality;
  std::vector<double> xe(static_cast<size_t>(ref.num_nodes()) * static_cast<size_t>(d));
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* ids = mesh.elem(e);
    for (int i = 0; i < ref.num_nodes(); ++i)
      for (int a = 0; a < d; ++a)
        xe[static_cast<size_t>(i) * static_cast<size_t>(d) + static_cast<size_t>(a)] = mesh.node(ids[i])[a];
    for (const auto& l : lattice) {
      double xi[3] = {static_cast<double>(l[0]) / m, static_cast<double>(l[1]) / m, static_cast<double>(l[2]) / m};
      const DistortionSample s = pointwise_distortion(ref, xe, xi, metric);
      quality.push_back(std::isfinite(s.eta) ? 1.0 / s.eta : 0.0);
      double pt[3];
      physical_map(ref, xe, xi, pt, nullptr);
      os << pt[0] << " " << pt[1] << " " << (d == 3 ? pt[2] : 0.0) << "\n";
    }
  }

  const int nv = d + 1;
  os << "CELLS " << mesh.num_elems() * static_cast<int>(cells.size()) << " "
     << mesh.num_elems() * static_cast<int>(cells.size()) * (nv + 1) << "\n";
  for (int e = 0; e < mesh.num_elems(); ++e)
    for (const auto& c : cells) {
      os << nv;
      for (int v = 0; v < nv; ++v) os << " " << e * pts_per_elem + c[static_cast<size_t>(v)];
      os << "\n";
    }
  os << "CELL_TYPES " << mesh.num_elems() * static_cast<int>(cells.size()) << "\n";
  for (int e = 0; e < mesh.num_elems() * static_cast<int>(cells.size()); ++e) os << (d == 2 ? 5 : 10) << "\n";
  os << "POINT_DATA " << mesh.num_elems() * pts_per_elem << "\nSCALARS quality double 1\nLOOKUP_TABLE default\n";
  for (double q : quality) os << q << "\n";
}

}  // namespace meshopt
