#include "meshopt/mesh.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "meshopt/quadrature.hpp"

namespace meshopt {

int HighOrderMesh::nodes_per_elem() const {
  return dim == 2 ? (degree + 1) * (degree + 2) / 2 : (degree + 1) * (degree + 2) * (degree + 3) / 6;
}

void HighOrderMesh::validate_structure() const {
  const int np = nodes_per_elem();
  if (static_cast<int>(connectivity.size()) % np != 0)
    throw std::runtime_error("mesh: connectivity size is not a multiple of nodes per element");
  if (static_cast<int>(node_class.size()) != num_nodes())
    throw std::runtime_error("mesh: node classification size mismatch");
  std::vector<int> seen;
  for (int e = 0; e < num_elems(); ++e) {
    const int* ids = elem(e);
    seen.assign(static_cast<size_t>(np), -1);
    for (int t = 0; t < np; ++t) {
      if (ids[t] < 0 || ids[t] >= num_nodes()) throw std::runtime_error("mesh: node id out of range");
      for (int u = 0; u < t; ++u)
        if (ids[u] == ids[t]) throw std::runtime_error("mesh: repeated node id within an element");
    }
  }
}

void DofMap::gather(const HighOrderMesh& mesh, std::vector<double>& x) const {
  x.assign(static_cast<size_t>(n), 0.0);
  for (int f = 0; f < n; ++f) x[static_cast<size_t>(f)] = mesh.node(owner[static_cast<size_t>(f)][0])[owner[static_cast<size_t>(f)][1]];
}

void DofMap::scatter(const std::vector<double>& x, HighOrderMesh& mesh) const {
  for (int f = 0; f < n; ++f) mesh.node(owner[static_cast<size_t>(f)][0])[owner[static_cast<size_t>(f)][1]] = x[static_cast<size_t>(f)];
}

DofMap build_dof_map(const HighOrderMesh& mesh) {
  DofMap map;
  map.dim = mesh.dim;
  map.free_index.assign(static_cast<size_t>(mesh.num_nodes()) * static_cast<size_t>(mesh.dim), -1);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const NodeClass c = mesh.node_class[static_cast<size_t>(i)];
    for (int a = 0; a < mesh.dim; ++a) {
      if (axis_fixed(c, a)) continue;
      map.free_index[static_cast<size_t>(i) * static_cast<size_t>(mesh.dim) + static_cast<size_t>(a)] = map.n++;
      map.owner.push_back({i, a});
    }
  }
  return map;
}

void physical_map(const ReferenceSimplex& ref, const std::vector<double>& element_coords, const double* xi,
                  double* point, SmallMat* jacobian) {
  const int np = ref.num_nodes();
  const int d = ref.dim();
  std::vector<double> phi(static_cast<size_t>(np));
  std::vector<double> grad(static_cast<size_t>(np) * static_cast<size_t>(d));
  if (jacobian)
    ref.eval_basis_grad(xi, phi.data(), grad.data());
  else
    ref.eval_basis(xi, phi.data());
  for (int a = 0; a < d; ++a) point[a] = 0.0;
  if (jacobian) *jacobian = SmallMat(d);
  for (int i = 0; i < np; ++i) {
    const double* x = element_coords.data() + static_cast<size_t>(i) * static_cast<size_t>(d);
    for (int a = 0; a < d; ++a) {
      point[a] += phi[static_cast<size_t>(i)] * x[a];
      if (jacobian)
        for (int b = 0; b < d; ++b) (*jacobian)(a, b) += x[a] * grad[static_cast<size_t>(i) * static_cast<size_t>(d) + static_cast<size_t>(b)];
    }
  }
}

SmallMat equilateral_map(int dim) {
  SmallMat e(dim);
  if (dim == 2) {
    e(0, 0) = 1.0;
    e(0, 1) = 0.5;
    e(1, 0) = 0.0;
    e(1, 1) = std::sqrt(3.0) / 2.0;
  } else {
    e(0, 0) = 1.0;
    e(0, 1) = 0.5;
    e(0, 2) = 0.5;
    e(1, 1) = std::sqrt(3.0) / 2.0;
    e(1, 2) = std::sqrt(3.0) / 6.0;
    e(2, 2) = std::sqrt(6.0) / 3.0;
  }
  return e;
}

namespace {

// Global lattice index for structured meshes: r+1 nodes per side.
inline int grid_id(int i, int j, int k, int r, int dim) {
  return dim == 2 ? j * (r + 1) + i : (k * (r + 1) + j) * (r + 1) + i;
}

NodeClass classify_grid_node(int i, int j, int k, int r, int dim) {
  NodeClass c = 0;
  if (i == 0 || i == r) c |= 1;
  if (j == 0 || j == r) c |= 2;
  if (dim == 3 && (k == 0 || k == r)) c |= 4;
  return c;
}

}  // namespace

HighOrderMesh generate_structured_mesh(const Box& box, int subdivisions, int degree, int dim) {
  if (subdivisions < 1) throw std::invalid_argument("generate_structured_mesh: subdivisions must be positive");
  if (degree < 1 || degree > 8) throw std::invalid_argument("generate_structured_mesh: degree must be in [1, 8]");
  if (subdivisions % degree != 0)
    throw std::invalid_argument("generate_structured_mesh: subdivisions must be a multiple of the degree");
  const int r = subdivisions;
  const int p = degree;
  const int cells = r / p;  // elements per side

  HighOrderMesh mesh;
  mesh.dim = dim;
  mesh.degree = degree;

  const int per_side = r + 1;
  const int n_nodes = dim == 2 ? per_side * per_side : per_side * per_side * per_side;
  mesh.coords.resize(static_cast<size_t>(n_nodes) * static_cast<size_t>(dim));
  mesh.node_class.resize(static_cast<size_t>(n_nodes));
  auto coord = [&](int idx, int axis) {
    return box.lo[static_cast<size_t>(axis)] +
           (box.hi[static_cast<size_t>(axis)] - box.lo[static_cast<size_t>(axis)]) * idx / static_cast<double>(r);
  };
  if (dim == 2) {
    for (int j = 0; j <= r; ++j)
      for (int i = 0; i <= r; ++i) {
        const int id = grid_id(i, j, 0, r, 2);
        mesh.coords[static_cast<size_t>(id) * 2] = coord(i, 0);
        mesh.coords[static_cast<size_t>(id) * 2 + 1] = coord(j, 1);
        mesh.node_class[static_cast<size_t>(id)] = classify_grid_node(i, j, 0, r, 2);
      }
  } else {
    for (int k = 0; k <= r; ++k)
      for (int j = 0; j <= r; ++j)
        for (int i = 0; i <= r; ++i) {
          const int id = grid_id(i, j, k, r, 3);
          mesh.coords[static_cast<size_t>(id) * 3] = coord(i, 0);
          mesh.coords[static_cast<size_t>(id) * 3 + 1] = coord(j, 1);
          mesh.coords[static_cast<size_t>(id) * 3 + 2] = coord(k, 2);
          mesh.node_class[static_cast<size_t>(id)] = classify_grid_node(i, j, k, r, 3);
        }
  }

  const auto lattice = simplex_lattice(dim, p);
  if (dim == 2) {
    // Each grid cell of p lattice units splits into two triangles; element
    // nodes land on global lattice points, so nodes are shared by index.
    auto emit = [&](std::array<int, 2> a, std::array<int, 2> b, std::array<int, 2> c) {
      for (const auto& l : lattice) {
        const int gi = a[0] + l[0] * (b[0] - a[0]) / p + l[1] * (c[0] - a[0]) / p;
        const int gj = a[1] + l[0] * (b[1] - a[1]) / p + l[1] * (c[1] - a[1]) / p;
        mesh.connectivity.push_back(grid_id(gi, gj, 0, r, 2));
      }
    };
    for (int cy = 0; cy < cells; ++cy)
      for (int cx = 0; cx < cells; ++cx) {
        const int x0 = cx * p, y0 = cy * p;
        emit({x0, y0}, {x0 + p, y0}, {x0, y0 + p});
        emit({x0 + p, y0 + p}, {x0, y0 + p}, {x0 + p, y0});
      }
  } else {
    // Six tetrahedra per grid cell along the axis-order paths; odd paths are
    // reflected to keep a positive Jacobian.
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    auto sign_of = [](const int* q) {
      int s = 1;
      int v[3] = {q[0], q[1], q[2]};
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (v[i] > v[j]) {
            std::swap(v[i], v[j]);
            s = -s;
          }
      return s;
    };
    auto emit = [&](const std::array<int, 3>& a, std::array<int, 3> b, std::array<int, 3> c, std::array<int, 3> d) {
      for (const auto& l : lattice) {
        int g[3];
        for (int ax = 0; ax < 3; ++ax)
          g[ax] = a[static_cast<size_t>(ax)] + l[0] * (b[static_cast<size_t>(ax)] - a[static_cast<size_t>(ax)]) / p +
                  l[1] * (c[static_cast<size_t>(ax)] - a[static_cast<size_t>(ax)]) / p +
                  l[2] * (d[static_cast<size_t>(ax)] - a[static_cast<size_t>(ax)]) / p;
        mesh.connectivity.push_back(grid_id(g[0], g[1], g[2], r, 3));
      }
    };
    for (int cz = 0; cz < cells; ++cz)
      for (int cy = 0; cy < cells; ++cy)
        for (int cx = 0; cx < cells; ++cx) {
          const std::array<int, 3> base{cx * p, cy * p, cz * p};
          for (const auto& q : perms) {
            std::array<int, 3> c0 = base, c1 = base, c2 = base, c3 = base;
            c1[static_cast<size_t>(q[0])] += p;
            c2 = c1;
            c2[static_cast<size_t>(q[1])] += p;
            c3 = c2;
            c3[static_cast<size_t>(q[2])] += p;
            if (sign_of(q) > 0)
              emit(c0, c1, c2, c3);
            else
              emit(c0, c1, c3, c2);
          }
        }
  }
  mesh.validate_structure();
  return mesh;
}

bool mesh_is_valid(const HighOrderMesh& mesh) {
  const ReferenceSimplex ref(mesh.dim, mesh.degree);
  const QuadratureRule rule = quadrature_for(mesh.dim, mesh.degree);
  const int np = ref.num_nodes();
  const int d = mesh.dim;
  std::vector<double> phi(static_cast<size_t>(np));
  std::vector<double> grad(static_cast<size_t>(np) * static_cast<size_t>(d));
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* ids = mesh.elem(e);
    for (int q = 0; q < rule.size(); ++q) {
      ref.eval_basis_grad(rule.point(q), phi.data(), grad.data());
      SmallMat jac(d);
      for (int i = 0; i < np; ++i) {
        const double* x = mesh.node(ids[i]);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) jac(a, b) += x[a] * grad[static_cast<size_t>(i) * static_cast<size_t>(d) + static_cast<size_t>(b)];
      }
      if (jac.det() <= 0.0) return false;
    }
  }
  return true;
}

void write_mesh_stream(const HighOrderMesh& mesh, std::ostream& os) {
  os.precision(17);
  os << mesh.dim << " " << mesh.degree << " " << mesh.num_nodes() << " " << mesh.num_elems() << "\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double* x = mesh.node(i);
    for (int a = 0; a < mesh.dim; ++a) os << (a ? " " : "") << x[a];
    os << "\n";
  }
  const int np = mesh.nodes_per_elem();
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* ids = mesh.elem(e);
    for (int t = 0; t < np; ++t) os << (t ? " " : "") << ids[t];
    os << "\n";
  }
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const NodeClass c = mesh.node_class[static_cast<size_t>(i)];
    if (c == 0) {
      os << "i\n";
    } else if (c == all_axes_fixed(mesh.dim)) {
      os << "v\n";
    } else {
      os << "s";
      for (int a = 0; a < mesh.dim; ++a)
        if (axis_fixed(c, a)) os << " " << a;
      os << "\n";
    }
  }
}

void write_mesh(const HighOrderMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_mesh: cannot open " + path);
  write_mesh_stream(mesh, os);
  if (!os) throw std::runtime_error("write_mesh: write failed for " + path);
}

HighOrderMesh read_mesh_stream(std::istream& is) {
  HighOrderMesh mesh;
  int n_nodes = 0, n_elems = 0;
  if (!(is >> mesh.dim >> mesh.degree >> n_nodes >> n_elems)) throw std::runtime_error("read_mesh: bad header");
  if (mesh.dim != 2 && mesh.dim != 3) throw std::runtime_error("read_mesh: dim must be 2 or 3");
  if (mesh.degree < 1 || mesh.degree > 8) throw std::runtime_error("read_mesh: unsupported degree");
  if (n_nodes <= 0 || n_elems < 0) throw std::runtime_error("read_mesh: bad node or element count");
  mesh.coords.resize(static_cast<size_t>(n_nodes) * static_cast<size_t>(mesh.dim));
  for (double& v : mesh.coords)
    if (!(is >> v)) throw std::runtime_error("read_mesh: truncated node coordinates");
  mesh.connectivity.resize(static_cast<size_t>(n_elems) * static_cast<size_t>(mesh.nodes_per_elem()));
  for (int& v : mesh.connectivity)
    if (!(is >> v)) throw std::runtime_error("read_mesh: truncated connectivity");
  mesh.node_class.resize(static_cast<size_t>(n_nodes));
  std::string line;
  std::getline(is, line);  // finish the last connectivity line
  for (int i = 0; i < n_nodes; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("read_mesh: truncated node classes");
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "i") {
      mesh.node_class[static_cast<size_t>(i)] = 0;
    } else if (tag == "v") {
      mesh.node_class[static_cast<size_t>(i)] = all_axes_fixed(mesh.dim);
    } else if (tag == "s") {
      NodeClass c = 0;
      int axis;
      while (ls >> axis) {
        if (axis < 0 || axis >= mesh.dim) throw std::runtime_error("read_mesh: bad slide axis");
        c |= static_cast<NodeClass>(1 << axis);
      }
      if (c == 0 || c == all_axes_fixed(mesh.dim)) throw std::runtime_error("read_mesh: bad slide axis list");
      mesh.node_class[static_cast<size_t>(i)] = c;
    } else {
      throw std::runtime_error("read_mesh: bad node class tag '" + tag + "'");
    }
  }
  mesh.validate_structure();
  if (!mesh_is_valid(mesh)) throw std::runtime_error("read_mesh: mesh has non-positive Jacobians at quadrature points");
  return mesh;
}

HighOrderMesh read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_mesh: cannot open " + path);
  return read_mesh_stream(is);
}

}  // namespace meshopt
