#include "meshopt/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace meshopt {

DistortionSample pointwise_distortion(const ReferenceSimplex& ref, const std::vector<double>& element_coords,
                                      const double* xi, const MetricField& metric) {
  const int d = ref.dim();
  DistortionSample s;
  double point[3];
  SmallMat jac(d);
  physical_map(ref, element_coords, xi, point, &jac);
  s.a = jac * equilateral_map(d).inverse();
  SmallMat m(d);
  metric.eval(point, m);
  s.sigma = s.a.det() * std::sqrt(m.det());
  s.sigma0 = 0.5 * (s.sigma + std::abs(s.sigma));
  if (s.sigma0 <= 0.0) {
    s.eta = std::numeric_limits<double>::infinity();
    return s;
  }
  const double t = frob_dot(s.a, m * s.a);
  s.eta = t / (d * std::pow(s.sigma0, 2.0 / d));
  return s;
}

double element_distortion(const ReferenceSimplex& ref, const QuadratureRule& rule,
                          const std::vector<double>& element_coords, const MetricField& metric) {
  double num = 0, den = 0;
  for (int q = 0; q < rule.size(); ++q) {
    const DistortionSample s = pointwise_distortion(ref, element_coords, rule.point(q), metric);
    if (!std::isfinite(s.eta)) return std::numeric_limits<double>::infinity();
    num += rule.weights[static_cast<size_t>(q)] * s.eta;
    den += rule.weights[static_cast<size_t>(q)];
  }
  return num / den;
}

DistortionObjective::DistortionObjective(const HighOrderMesh& mesh, const DofMap& dofmap, const MetricField& metric)
    : mesh_(mesh),
      metric_(metric),
      dofmap_(dofmap),
      ref_(mesh.dim, mesh.degree),
      rule_(quadrature_for(mesh.dim, mesh.degree)) {
  if (metric.dim() != mesh.dim) throw std::invalid_argument("DistortionObjective: metric/mesh dimension mismatch");
  const int d = mesh.dim;
  const int np = ref_.num_nodes();
  const int nq = rule_.size();
  const SmallMat e = equilateral_map(d);
  einv_ = e.inverse();
  det_e_ = e.det();

  phi_.resize(static_cast<size_t>(nq) * static_cast<size_t>(np));
  rg_.resize(static_cast<size_t>(nq) * static_cast<size_t>(np) * static_cast<size_t>(d));
  std::vector<double> grad(static_cast<size_t>(np) * static_cast<size_t>(d));
  for (int q = 0; q < nq; ++q) {
    ref_.eval_basis_grad(rule_.point(q), phi_.data() + static_cast<size_t>(q) * static_cast<size_t>(np), grad.data());
    for (int i = 0; i < np; ++i)
      for (int b = 0; b < d; ++b) {
        double s = 0;
        for (int c = 0; c < d; ++c) s += grad[static_cast<size_t>(i) * static_cast<size_t>(d) + static_cast<size_t>(c)] * einv_(c, b);
        rg_[(static_cast<size_t>(q) * static_cast<size_t>(np) + static_cast<size_t>(i)) * static_cast<size_t>(d) + static_cast<size_t>(b)] = s;
      }
  }

  const int ne = mesh.num_elems();
  const int ld = np * d;
  elem_dofs_.resize(static_cast<size_t>(ne) * static_cast<size_t>(ld));
  for (int e2 = 0; e2 < ne; ++e2) {
    const int* ids = mesh.elem(e2);
    for (int i = 0; i < np; ++i)
      for (int a = 0; a < d; ++a)
        elem_dofs_[static_cast<size_t>(e2) * static_cast<size_t>(ld) + static_cast<size_t>(i * d + a)] =
            dofmap_.index(ids[i], a);
  }

  std::vector<std::vector<int>> cols(static_cast<size_t>(dofmap_.n));
  for (int e2 = 0; e2 < ne; ++e2) {
    const int* ed = elem_dofs_.data() + static_cast<size_t>(e2) * static_cast<size_t>(ld);
    for (int u = 0; u < ld; ++u) {
      if (ed[u] < 0) continue;
      for (int v = 0; v < ld; ++v)
        if (ed[v] >= 0) cols[static_cast<size_t>(ed[u])].push_back(ed[v]);
    }
  }
  pattern_ = SparseSymMatrix::from_pattern(dofmap_.n, cols);

  scatter_.resize(static_cast<size_t>(ne) * static_cast<size_t>(ld) * static_cast<size_t>(ld));
  for (int e2 = 0; e2 < ne; ++e2) {
    const int* ed = elem_dofs_.data() + static_cast<size_t>(e2) * static_cast<size_t>(ld);
    int* sc = scatter_.data() + static_cast<size_t>(e2) * static_cast<size_t>(ld) * static_cast<size_t>(ld);
    for (int u = 0; u < ld; ++u)
      for (int v = 0; v < ld; ++v)
        sc[u * ld + v] = (ed[u] >= 0 && ed[v] >= 0) ? pattern_.find(ed[u], ed[v]) : -1;
  }
}

ObjectiveEval DistortionObjective::evaluate(std::span<const double> x, bool with_derivatives) const {
  const int d = mesh_.dim;
  const int np = ref_.num_nodes();
  const int nq = rule_.size();
  const int ld = np * d;
  const double inv_d = 1.0 / d;

  ObjectiveEval out;
  std::vector<double> coords = mesh_.coords;
  for (int f = 0; f < dofmap_.n; ++f)
    coords[static_cast<size_t>(dofmap_.owner[static_cast<size_t>(f)][0]) * static_cast<size_t>(d) +
           static_cast<size_t>(dofmap_.owner[static_cast<size_t>(f)][1])] = x[static_cast<size_t>(f)];

  if (with_derivatives) {
    out.gradient.assign(static_cast<size_t>(dofmap_.n), 0.0);
    out.hessian = pattern_;
    std::fill(out.hessian.vals.begin(), out.hessian.vals.end(), 0.0);
  }

  std::vector<double> xe(static_cast<size_t>(ld));
  std::vector<double> ge(static_cast<size_t>(ld));
  std::vector<double> he(static_cast<size_t>(ld) * static_cast<size_t>(ld));
  std::vector<double> deta_dx(static_cast<size_t>(ld));
  SmallMat mc[3], q2[9];

  double total = 0;
  for (int e = 0; e < mesh_.num_elems(); ++e) {
    const int* ids = mesh_.elem(e);
    for (int i = 0; i < np; ++i)
      for (int a = 0; a < d; ++a)
        xe[static_cast<size_t>(i * d + a)] = coords[static_cast<size_t>(ids[i]) * static_cast<size_t>(d) + static_cast<size_t>(a)];

    if (with_derivatives) {
      std::fill(ge.begin(), ge.end(), 0.0);
      std::fill(he.begin(), he.end(), 0.0);
    }

    for (int q = 0; q < nq; ++q) {
      const double* phiq = phi_.data() + static_cast<size_t>(q) * static_cast<size_t>(np);
      const double* rq = rg_.data() + static_cast<size_t>(q) * static_cast<size_t>(np) * static_cast<size_t>(d);

      SmallMat A(d);
      double pphys[3] = {0, 0, 0};
      for (int i = 0; i < np; ++i) {
        for (int a = 0; a < d; ++a) {
          const double xa = xe[static_cast<size_t>(i * d + a)];
          pphys[a] += phiq[i] * xa;
          for (int b = 0; b < d; ++b) A(a, b) += xa * rq[i * d + b];
        }
      }
      const double det_a = A.det();
      if (det_a <= 0.0) {  // invalid: value stays +inf, derivatives absent
        out.gradient.clear();
        out.hessian = SparseSymMatrix{};
        return out;
      }

      SmallMat M(d);
      if (with_derivatives)
        metric_.eval_derivs(pphys, M, mc, q2);
      else
        metric_.eval(pphys, M);
      const double m_half = std::sqrt(M.det());
      const double sigma = det_a * m_half;
      if (sigma <= 0.0) {
        out.gradient.clear();
        out.hessian = SparseSymMatrix{};
        return out;
      }

      const SmallMat MA = M * A;
      const double T = frob_dot(A, MA);
      const double u = inv_d * std::pow(sigma, -2.0 * inv_d);
      const double eta = T * u;
      const double wq = rule_.weights[static_cast<size_t>(q)] * det_e_;
      total += wq * eta * eta;

      if (!with_derivatives) continue;

      const SmallMat Ainv = A.inverse();
      const SmallMat Minv = M.inverse();
      const SmallMat AAT = A * A.transposed();

      double tc[3];
      for (int c = 0; c < d; ++c) tc[c] = frob_dot(Minv, mc[c].transposed()) /* = tr(Minv * mc[c]) */;

      // eta = T u with T = tr(A^T M A), u = (d sigma^{2/d})^{-1}
      double dT_dA[3][3], du_dA[3][3], deta_dA[3][3];
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          dT_dA[a][b] = 2.0 * MA(a, b);
          du_dA[a][b] = -2.0 * inv_d * u * Ainv(b, a);
          deta_dA[a][b] = u * dT_dA[a][b] + T * du_dA[a][b];
        }
      double dT_dp[3], du_dp[3], deta_dp[3];
      for (int c = 0; c < d; ++c) {
        dT_dp[c] = frob_dot(mc[c], AAT);
        du_dp[c] = -u * inv_d * tc[c];
        deta_dp[c] = u * dT_dp[c] + T * du_dp[c];
      }

      double eAA[3][3][3][3], eAp[3][3][3], ePP[3][3];
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int c = 0; c < d; ++c) {
            for (int e2 = 0; e2 < d; ++e2) {
              const double uAA = 2.0 * inv_d * u *
                                 (2.0 * inv_d * Ainv(b, a) * Ainv(e2, c) + Ainv(b, c) * Ainv(e2, a));
              eAA[a][b][c][e2] = u * 2.0 * M(a, c) * (b == e2 ? 1.0 : 0.0) + dT_dA[a][b] * du_dA[c][e2] +
                                 dT_dA[c][e2] * du_dA[a][b] + T * uAA;
            }
            const SmallMat CcA = mc[c] * A;
            const double uAp = 2.0 * inv_d * inv_d * u * tc[c] * Ainv(b, a);
            eAp[a][b][c] = u * 2.0 * CcA(a, b) + dT_dA[a][b] * du_dp[c] + dT_dp[c] * du_dA[a][b] + T * uAp;
          }
      for (int c = 0; c < d; ++c)
        for (int e2 = 0; e2 < d; ++e2) {
          const double tr_q = frob_dot(Minv, q2[c * d + e2].transposed());
          const double tr_cc = frob_dot(Minv * mc[e2] * Minv, mc[c].transposed());
          const double upp = u * inv_d * inv_d * tc[c] * tc[e2] - u * inv_d * (tr_q - tr_cc);
          ePP[c][e2] = u * frob_dot(q2[c * d + e2], AAT) + dT_dp[c] * du_dp[e2] + dT_dp[e2] * du_dp[c] + T * upp;
        }

      for (int i = 0; i < np; ++i)
        for (int a = 0; a < d; ++a) {
          double s = deta_dp[a] * phiq[i];
          for (int b = 0; b < d; ++b) s += deta_dA[a][b] * rq[i * d + b];
          deta_dx[static_cast<size_t>(i * d + a)] = s;
        }

      const double w2 = 2.0 * wq;
      for (int u2 = 0; u2 < ld; ++u2) ge[static_cast<size_t>(u2)] += w2 * eta * deta_dx[static_cast<size_t>(u2)];

      for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
          const double* ri = rq + i * d;
          const double* rj = rq + j * d;
          for (int a = 0; a < d; ++a)
            for (int c = 0; c < d; ++c) {
              double s = ePP[a][c] * phiq[i] * phiq[j];
              for (int b = 0; b < d; ++b) s += eAp[a][b][c] * ri[b] * phiq[j];
              for (int e2 = 0; e2 < d; ++e2) s += eAp[c][e2][a] * rj[e2] * phiq[i];
              for (int b = 0; b < d; ++b)
                for (int e2 = 0; e2 < d; ++e2) s += eAA[a][b][c][e2] * ri[b] * rj[e2];
              he[static_cast<size_t>((i * d + a) * ld + (j * d + c))] +=
                  w2 * (deta_dx[static_cast<size_t>(i * d + a)] * deta_dx[static_cast<size_t>(j * d + c)] + eta * s);
            }
        }
    }

    if (with_derivatives) {
      const int* ed = elem_dofs_.data() + static_cast<size_t>(e) * static_cast<size_t>(ld);
      const int* sc = scatter_.data() + static_cast<size_t>(e) * static_cast<size_t>(ld) * static_cast<size_t>(ld);
      for (int u2 = 0; u2 < ld; ++u2) {
        if (ed[u2] < 0) continue;
        out.gradient[static_cast<size_t>(ed[u2])] += ge[static_cast<size_t>(u2)];
        for (int v = 0; v < ld; ++v)
          if (sc[u2 * ld + v] >= 0) out.hessian.vals[static_cast<size_t>(sc[u2 * ld + v])] += he[static_cast<size_t>(u2 * ld + v)];
      }
    }
  }

  out.valid = true;
  out.value = total;
  return out;
}

namespace {

// 1D Lagrange basis on the equispaced nodes m/p, m = 0..p.
void lagrange_1d(int p, double t, std::vector<double>& val, std::vector<double>& der) {
  const int n = p + 1;
  val.assign(static_cast<size_t>(n), 1.0);
  der.assign(static_cast<size_t>(n), 0.0);
  for (int m = 0; m < n; ++m) {
    const double tm = static_cast<double>(m) / p;
    double v = 1.0;
    double dv = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == m) continue;
      const double tk = static_cast<double>(k) / p;
      dv = dv * (t - tk) + v;
      v *= (t - tk);
      const double w = tm - tk;
      dv /= w;
      v /= w;
    }
    val[static_cast<size_t>(m)] = v;
    der[static_cast<size_t>(m)] = dv;
  }
}

void accumulate(std::vector<double>& samples, MeasureStats& st) {
  st.count = static_cast<int>(samples.size());
  if (samples.empty()) return;
  st.min = *std::min_element(samples.begin(), samples.end());
  st.max = *std::max_element(samples.begin(), samples.end());
  double s = 0;
  for (double v : samples) s += v;
  st.mean = s / st.count;
  double ss = 0;
  for (double v : samples) ss += (v - st.mean) * (v - st.mean);
  st.std_dev = std::sqrt(ss / st.count);
}

}  // namespace

std::vector<MeasureStats> mesh_statistics(const HighOrderMesh& mesh, const MetricField& metric) {
  const int d = mesh.dim;
  const int p = mesh.degree;
  const ReferenceSimplex ref(d, p);
  const QuadratureRule rule = quadrature_for(d, p);

  std::vector<double> quality, lengths, areas, volumes;

  std::vector<double> xe(static_cast<size_t>(ref.num_nodes()) * static_cast<size_t>(d));
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* ids = mesh.elem(e);
    for (int i = 0; i < ref.num_nodes(); ++i)
      for (int a = 0; a < d; ++a)
        xe[static_cast<size_t>(i) * static_cast<size_t>(d) + static_cast<size_t>(a)] = mesh.node(ids[i])[a];
    quality.push_back(1.0 / element_distortion(ref, rule, xe, metric));

    // metric volume (area in 2D)
    double vol = 0;
    for (int q = 0; q < rule.size(); ++q) {
      double pt[3];
      SmallMat jac(d);
      physical_map(ref, xe, rule.point(q), pt, &jac);
      SmallMat m(d);
      metric.eval(pt, m);
      vol += rule.weights[static_cast<size_t>(q)] * std::abs(jac.det()) * std::sqrt(m.det());
    }
    (d == 2 ? areas : volumes).push_back(vol);
  }

  // unique edges keyed by their corner node ids
  std::map<std::pair<int, int>, std::vector<int>> edges;
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* ids = mesh.elem(e);
    for (const auto& en : ref.edge_nodes()) {
      std::vector<int> gl;
      for (int loc : en) gl.push_back(ids[loc]);
      std::pair<int, int> key{std::min(gl.front(), gl.back()), std::max(gl.front(), gl.back())};
      edges.emplace(key, std::move(gl));
    }
  }
  std::vector<double> gx, gw, lval, lder;
  gauss_legendre_01(10, gx, gw);
  for (const auto& [key, gl] : edges) {
    double len = 0;
    for (size_t q = 0; q < gx.size(); ++q) {
      lagrange_1d(p, gx[q], lval, lder);
      double c[3] = {0, 0, 0}, tg[3] = {0, 0, 0};
      for (int m = 0; m <= p; ++m)
        for (int a = 0; a < d; ++a) {
          c[a] += lval[static_cast<size_t>(m)] * mesh.node(gl[static_cast<size_t>(m)])[a];
          tg[a] += lder[static_cast<size_t>(m)] * mesh.node(gl[static_cast<size_t>(m)])[a];
        }
      SmallMat m2(d);
      metric.eval(c, m2);
      double s = 0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s += tg[a] * m2(a, b) * tg[b];
      len += gw[q] * std::sqrt(s);
    }
    lengths.push_back(len);
  }

  if (d == 3) {
    const ReferenceSimplex face_ref(2, p);
    const QuadratureRule face_rule = quadrature_for(2, p);
    std::map<std::array<int, 3>, std::vector<int>> faces;
    for (int e = 0; e < mesh.num_elems(); ++e) {
      const int* ids = mesh.elem(e);
      for (const auto& fn : ref.face_nodes()) {
        std::vector<int> gl;
        for (int loc : fn) gl.push_back(ids[loc]);
        const int np2 = face_ref.num_nodes();
        std::array<int, 3> key{gl[0], gl[static_cast<size_t>(p)], gl[static_cast<size_t>(np2 - 1)]};
        std::sort(key.begin(), key.end());
        faces.emplace(key, std::move(gl));
      }
    }
    std::vector<double> fphi(static_cast<size_t>(face_ref.num_nodes()));
    std::vector<double> fgrad(static_cast<size_t>(face_ref.num_nodes()) * 2);
    for (const auto& [key, gl] : faces) {
      double area = 0;
      for (int q = 0; q < face_rule.size(); ++q) {
        face_ref.eval_basis_grad(face_rule.point(q), fphi.data(), fgrad.data());
        double c[3] = {0, 0, 0};
        double jf[3][2] = {{0, 0}, {0, 0}, {0, 0}};
        for (int m = 0; m < face_ref.num_nodes(); ++m)
          for (int a = 0; a < 3; ++a) {
            c[a] += fphi[static_cast<size_t>(m)] * mesh.node(gl[static_cast<size_t>(m)])[a];
            for (int b = 0; b < 2; ++b) jf[a][b] += fgrad[static_cast<size_t>(m) * 2 + static_cast<size_t>(b)] * mesh.node(gl[static_cast<size_t>(m)])[a];
          }
        SmallMat m3(3);
        metric.eval(c, m3);
        // first fundamental form J^T M J (2 x 2)
        double g[2][2] = {{0, 0}, {0, 0}};
        for (int b = 0; b < 2; ++b)
          for (int b2 = 0; b2 < 2; ++b2)
            for (int a = 0; a < 3; ++a)
              for (int a2 = 0; a2 < 3; ++a2) g[b][b2] += jf[a][b] * m3(a, a2) * jf[a2][b2];
        area += face_rule.weights[static_cast<size_t>(q)] * std::sqrt(std::max(0.0, g[0][0] * g[1][1] - g[0][1] * g[1][0]));
      }
      areas.push_back(area);
    }
  }

  std::vector<MeasureStats> out;
  MeasureStats s;
  s.measure = "shape";
  accumulate(quality, s);
  out.push_back(s);
  s = MeasureStats{};
  s.measure = "length";
  accumulate(lengths, s);
  out.push_back(s);
  s = MeasureStats{};
  s.measure = "area";
  accumulate(areas, s);
  out.push_back(s);
  if (d == 3) {
    s = MeasureStats{};
    s.measure = "volume";
    accumulate(volumes, s);
    out.push_back(s);
  }
  return out;
}

void write_statistics_csv(const std::vector<MeasureStats>& stats, std::ostream& os) {
  os << "measure,min,max,mean,std\n";
  os.precision(10);
  for (const auto& s : stats)
    os << s.measure << "," << s.min << "," << s.max << "," << s.mean << "," << s.std_dev << "\n";
}

}  // namespace meshopt
