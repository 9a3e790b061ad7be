// Batch driver: structured mesh generation, metric-aware optimization runs,
// side-by-side solver benchmarks, and mesh quality reports.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "meshopt/distortion.hpp"
#include "meshopt/mesh.hpp"
#include "meshopt/metric.hpp"
#include "meshopt/ordering.hpp"
#include "meshopt/solver.hpp"
#include "meshopt/vtk.hpp"

namespace fs = std::filesystem;
using namespace meshopt;

namespace {

struct Options {
  std::string config_path;
  std::string metric = "Line";
  std::string mesh_path;
  std::string out_dir = ".";
  std::string mode = "specific";
  std::string linear = "iterative";
  std::vector<std::string> degree_args{"1", "2"};
  int dim = 2;
  int resolution = 0;  // 0: pick per dimension (16 in 2D, 4 in 3D)
  double rms_tol = 1e-4;
  int max_nonlinear = 5000;
  double delta = 10.0;
  bool spectral = true;
  bool mdf = true;
  LineSearchConfig ls;

  std::vector<int> degrees() const {
    std::vector<int> out;
    for (const auto& s : degree_args)
      if (!s.empty()) out.push_back(std::stoi(s));
    return out;
  }
  int resolution_for(int d) const { return resolution > 0 ? resolution : (d == 2 ? 16 : 4); }
};

std::map<std::string, std::string> parse_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return kv;
}

void apply_config(Options& opt) {
  if (opt.config_path.empty()) return;
  const auto kv = parse_config(opt.config_path);
  auto get = [&](const char* key, auto& target) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    std::istringstream ss(it->second);
    ss >> target;
  };
  get("solver.mode", opt.mode);
  get("solver.linear", opt.linear);
  get("solver.rms_tol", opt.rms_tol);
  get("solver.max_nonlinear", opt.max_nonlinear);
  get("solver.delta", opt.delta);
  get("ls.c_min", opt.ls.c_min);
  get("ls.c_max", opt.ls.c_max);
  get("ls.gamma", opt.ls.gamma_ls);
  get("ls.alpha_min", opt.ls.alpha_min);
  std::string flag;
  get("ordering.spectral", flag);
  if (!flag.empty()) opt.spectral = flag == "on" || flag == "true" || flag == "1";
  flag.clear();
  get("ordering.mdf", flag);
  if (!flag.empty()) opt.mdf = flag == "on" || flag == "true" || flag == "1";
  get("bench.resolution", opt.resolution);
}

SolverConfig solver_config(const Options& opt, const std::string& mode) {
  SolverConfig cfg;
  cfg.mode = mode == "standard" ? SolverMode::standard : SolverMode::specific;
  cfg.linear = opt.linear == "direct" ? LinearSolverKind::direct : LinearSolverKind::iterative;
  cfg.rms_tol = opt.rms_tol;
  cfg.max_nonlinear = opt.max_nonlinear;
  cfg.delta = opt.delta;
  cfg.ls = opt.ls;
  cfg.use_mdf = opt.mdf;
  return cfg;
}

std::string mesh_filename(int dim, int degree, int resolution) {
  std::ostringstream ss;
  ss << "mesh_" << dim << "d_p" << degree << "_r" << resolution << ".txt";
  return ss.str();
}

int cmd_generate(const Options& opt) {
  fs::create_directories(opt.out_dir);
  const int res = opt.resolution_for(opt.dim);
  for (int p : opt.degrees()) {
    const HighOrderMesh mesh = generate_structured_mesh(Box{}, res, p, opt.dim);
    const fs::path path = fs::path(opt.out_dir) / mesh_filename(opt.dim, p, res);
    write_mesh(mesh, path.string());
    std::cout << path.string() << ": " << mesh.num_nodes() << " nodes, " << mesh.num_elems() << " elements\n";
  }
  return 0;
}

struct RunArtifacts {
  SolverResult result;
  HighOrderMesh mesh;  // optimized, with ordering applied
};

RunArtifacts run_optimization(HighOrderMesh mesh, const MetricField& metric, const Options& opt,
                              const std::string& mode) {
  if (opt.spectral) {
    const NodeOrdering ord = spectral_node_ordering(mesh, metric);
    mesh = apply_node_ordering(mesh, ord.node_perm);
  }
  RunArtifacts art;
  art.result = optimize(mesh, metric, solver_config(opt, mode));
  const DofMap map = build_dof_map(mesh);
  map.scatter(art.result.x, mesh);
  art.mesh = std::move(mesh);
  return art;
}

int cmd_optimize(const Options& opt) {
  if (opt.mesh_path.empty()) {
    std::cerr << "optimize: --mesh is required\n";
    return 2;
  }
  HighOrderMesh mesh;
  try {
    mesh = read_mesh(opt.mesh_path);
  } catch (const std::exception& e) {
    std::cerr << "optimize: " << e.what() << "\n";
    return 2;
  }
  const ShearLayerMetric metric(builtin_metric(opt.metric));
  if (metric.dim() != mesh.dim) {
    std::cerr << "optimize: metric dimension does not match the mesh\n";
    return 2;
  }
  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);

  write_vtk_quality(mesh, metric, (out / "initial_quality.vtk").string());
  {
    std::ofstream os(out / "initial_stats.csv");
    write_statistics_csv(mesh_statistics(mesh, metric), os);
  }

  RunArtifacts art = run_optimization(std::move(mesh), metric, opt, opt.mode);

  write_mesh(art.mesh, (out / "optimized_mesh.txt").string());
  write_vtk_lagrange(art.mesh, (out / "optimized_mesh.vtk").string());
  write_vtk_quality(art.mesh, metric, (out / "optimized_quality.vtk").string());
  {
    std::ofstream os(out / "optimized_stats.csv");
    write_statistics_csv(mesh_statistics(art.mesh, metric), os);
  }
  {
    std::ofstream os(out / "trace.csv");
    write_trace_csv(art.result.stats, os);
  }
  std::cout << (art.result.converged ? "converged" : "NOT converged") << " after "
            << art.result.stats.nonlinear_iters << " nonlinear iterations, " << art.result.stats.ls_iters
            << " line-search iterations, " << art.result.stats.matvec_products << " matrix-vector products\n";
  return art.result.converged ? 0 : 1;
}

int cmd_bench(const Options& opt) {
  fs::create_directories(opt.out_dir);
  const ShearLayerSpec spec = builtin_metric(opt.metric);
  const ShearLayerMetric metric(spec);

  std::ostringstream csv;
  csv << "metric,degree,nl_std,nl_spec,ls_std,ls_spec,mv_std,mv_spec,speedup\n";
  std::cout << "| metric | deg | NL std | NL spec | LS std | LS spec | MV std | MV spec | speedup |\n"
            << "|--------|-----|--------|---------|--------|---------|--------|---------|---------|\n";
  bool all_ok = true;
  for (int p : opt.degrees()) {
    HighOrderMesh mesh;
    try {
      mesh = generate_structured_mesh(Box{}, opt.resolution_for(spec.dim), p, spec.dim);
    } catch (const std::exception& e) {
      std::cerr << "bench: " << e.what() << "\n";
      return 2;
    }
    SolverStats st_std, st_spec;
    bool ok_std = false, ok_spec = false;
    try {
      const RunArtifacts a = run_optimization(mesh, metric, opt, "standard");
      st_std = a.result.stats;
      ok_std = a.result.converged;
    } catch (const std::exception& e) {
      std::cerr << "bench standard p" << p << ": " << e.what() << "\n";
    }
    try {
      const RunArtifacts a = run_optimization(mesh, metric, opt, "specific");
      st_spec = a.result.stats;
      ok_spec = a.result.converged;
    } catch (const std::exception& e) {
      std::cerr << "bench specific p" << p << ": " << e.what() << "\n";
    }
    all_ok = all_ok && ok_std && ok_spec;
    const double speedup = st_spec.matvec_products > 0
                               ? static_cast<double>(st_std.matvec_products) / static_cast<double>(st_spec.matvec_products)
                               : 0.0;
    auto cell = [](bool ok, long v) { return ok ? std::to_string(v) : std::string("FAILED"); };
    csv << spec.name << "," << p << "," << cell(ok_std, st_std.nonlinear_iters) << ","
        << cell(ok_spec, st_spec.nonlinear_iters) << "," << cell(ok_std, st_std.ls_iters) << ","
        << cell(ok_spec, st_spec.ls_iters) << "," << cell(ok_std, st_std.matvec_products) << ","
        << cell(ok_spec, st_spec.matvec_products) << "," << (ok_std && ok_spec ? std::to_string(speedup) : "FAILED")
        << "\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "| %-6s | %3d | %6ld | %7ld | %6ld | %7ld | %6ld | %7ld | %7.2f |\n",
                  spec.name.c_str(), p, static_cast<long>(st_std.nonlinear_iters),
                  static_cast<long>(st_spec.nonlinear_iters), st_std.ls_iters, st_spec.ls_iters,
                  st_std.matvec_products, st_spec.matvec_products, speedup);
    std::cout << buf;
  }
  std::ofstream os(fs::path(opt.out_dir) / "bench.csv");
  os << csv.str();
  return all_ok ? 0 : 1;
}

int cmd_stats(const Options& opt) {
  if (opt.mesh_path.empty()) {
    std::cerr << "stats: --mesh is required\n";
    return 2;
  }
  HighOrderMesh mesh;
  try {
    mesh = read_mesh(opt.mesh_path);
  } catch (const std::exception& e) {
    std::cerr << "stats: " << e.what() << "\n";
    return 2;
  }
  const ShearLayerMetric metric(builtin_metric(opt.metric));
  if (metric.dim() != mesh.dim) {
    std::cerr << "stats: metric dimension does not match the mesh\n";
    return 2;
  }
  write_statistics_csv(mesh_statistics(mesh, metric), std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric-aware curved high-order mesh optimizer"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "flat key=value configuration file");
    sub->add_option("--metric", opt.metric, "target metric name (Line, Curve, Curves, Plane, Surface, Surfaces)");
    sub->add_option("--out", opt.out_dir, "output directory");
  };

  CLI::App* gen = app.add_subcommand("generate", "write structured meshes of equal resolution per degree");
  add_common(gen);
  gen->add_option("--dim", opt.dim, "spatial dimension (2 or 3)");
  gen->add_option("--degree", opt.degree_args, "polynomial degrees")->delimiter(',');
  gen->add_option("--resolution", opt.resolution, "lattice cells per side (multiple of each degree)");

  CLI::App* run = app.add_subcommand("optimize", "optimize a mesh file against a metric");
  add_common(run);
  run->add_option("--mesh", opt.mesh_path, "input mesh file");
  run->add_option("--mode", opt.mode, "standard | specific")->check(CLI::IsMember({"standard", "specific"}));
  run->add_option("--linear", opt.linear, "iterative | direct")->check(CLI::IsMember({"iterative", "direct"}));
  run->add_option("--rms-tol", opt.rms_tol, "stopping tolerance on the RMS residual");
  run->add_option("--max-nonlinear", opt.max_nonlinear, "nonlinear iteration cap");

  CLI::App* bench = app.add_subcommand("bench", "compare the standard and specific solvers");
  add_common(bench);
  bench->add_option("--degree", opt.degree_args, "polynomial degrees (empty list allowed)")->delimiter(',');
  bench->add_option("--resolution", opt.resolution, "lattice cells per side");
  bench->add_option("--linear", opt.linear, "iterative | direct")->check(CLI::IsMember({"iterative", "direct"}));

  CLI::App* st = app.add_subcommand("stats", "metric-aware quality and geometry statistics of a mesh");
  add_common(st);
  st->add_option("--mesh", opt.mesh_path, "input mesh file");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_config(opt);
    if (gen->parsed()) return cmd_generate(opt);
    if (run->parsed()) return cmd_optimize(opt);
    if (bench->parsed()) return cmd_bench(opt);
    if (st->parsed()) return cmd_stats(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
