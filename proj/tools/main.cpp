// homog3: numerical differential geometry of metric Lie groups diffeomorphic
// to R^3 (semidirect products R^2 x_A R, the universal cover of SL(2,R)) and
// the product spaces S^2(k) x R, H^2(k) x R.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure (e.g. a
// meridian that does not close); failures emit a machine-readable JSON
// object on standard error.

#include "homog3/homog3.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace homog3;

namespace {

LieVector parse_killing_selector(const std::string& s) {
  if (s == "F1" || s == "Fx") return Vec3(1, 0, 0);
  if (s == "F2" || s == "Fy") return Vec3(0, 1, 0);
  if (s == "F3" || s == "Fz") return Vec3(0, 0, 1);
  const auto v = parse_number_list(s, 3);
  return Vec3(v[0], v[1], v[2]);
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  require(x != std::string::npos, "grid: expected ROWSxCOLS, e.g. 64x128");
  return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

void print_matrix_csv(const Eigen::MatrixXd& m, std::ostream& os) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_cell(Cell{m(i, j)});
    os << '\n';
  }
}

void write_rows(const std::vector<std::string>& header, const std::vector<std::vector<Cell>>& rows,
                const std::string& out) {
  if (out.empty()) {
    emit_table(header, rows, std::cout);
  } else {
    emit_table_file(header, rows, out);
  }
}

PlanarProfile profile_from_csv(const std::string& path) {
  PlanarProfile prof;
  for (const auto& row : parse_csv_file(path)) {
    require(row.size() >= 5, "profile csv: need columns s,x,y,chi,dchi");
    require(prof.samples.empty() || row[0] > prof.samples.back().s,
            "profile csv: arclength must be strictly increasing");
    prof.samples.push_back({row[0], row[1], row[2], row[3], row[4]});
  }
  require(prof.samples.size() >= 2, "profile csv: too few samples");
  prof.period = prof.samples.back().s;
  const auto& a = prof.samples.front();
  const auto& b = prof.samples.back();
  prof.closed = std::hypot(a.x - b.x, a.y - b.y) +
                    std::abs(std::remainder(a.chi - b.chi, 2 * M_PI)) <
                1e-4;
  return prof;
}

int run_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  check("expm2 of the zero matrix is the identity",
        (expm2(Mat2::Zero(), 2.0) - Mat2::Identity()).norm() == 0.0);
  {
    Mat2 N;
    N << 0, 1, 0, 0;
    const Mat2 E = expm2(N, 1.5);
    check("expm2 nilpotent branch", E(0, 1) == 1.5 && E(0, 0) == 1.0 && E(1, 0) == 0.0);
  }
  {
    auto s = SpaceSpec::semidirect(Mat2::Zero());
    auto g = multiply(s, GroupPoint::semidirect(1, 2, 3), GroupPoint::semidirect(4, 5, 6));
    check("abelian group law", (g.c - Vec3(5, 7, 9)).norm() == 0.0);
    check("inverse of the identity", (inverse(s, identity(s)).c).norm() == 0.0);
    auto gamma = one_param_subgroup(s, Vec3(0, 0, 1), 1.7);
    check("z-axis one-parameter subgroup", (gamma.c - Vec3(0, 0, 1.7)).norm() < 1e-14);
  }
  {
    auto s = SpaceSpec::semidirect(Mat2::Zero());
    auto f = frame_fields(s, GroupPoint::semidirect(0.3, -0.4, 0.9));
    check("abelian frames are the coordinate fields",
          (f.E[0] - Vec3::UnitX()).norm() == 0.0 && (f.F[2] - Vec3::UnitZ()).norm() == 0.0);
    check("flat metric", (metric_tensor(s, GroupPoint::semidirect(1, 1, 1)) - Mat3::Identity())
                                 .norm() == 0.0);
    check("flat connection", connection_coeffs(s)[0].norm() + connection_coeffs(s)[1].norm() +
                                     connection_coeffs(s)[2].norm() ==
                                 0.0);
    auto K = [](const GroupPoint&) { return Vec3(1, 0, 0); };
    check("coordinate field is Killing in the flat space",
          killing_residual(s, K, GroupPoint::semidirect(0.2, 0.5, -0.3)) < 1e-10);
  }
  {
    Mat2 A;
    A << 0.7, -0.2, 0.4, 0.1;
    auto s = SpaceSpec::semidirect(A);
    AmbientChart ac(s);
    auto leaf = [](double u, double v) { return Vec3(u, v, 0); };
    auto im = Immersion::rectangle(ac, leaf, -1, 1, -1, 1, 12, 12);
    auto n = fundamental_forms(im, 6, 6);
    check("leaf z=0 has H = trace(A)/2", std::abs(n.H - 0.5 * A.trace()) < 1e-7);
    check("leaf Gauss image is the North pole", (n.gauss - Vec3(0, 0, 1)).norm() < 1e-10);
  }
  {
    check("elliptic classification", classify_character(Vec3(0, 0, 1)) == Character::Elliptic);
    check("hyperbolic classification",
          classify_character(Vec3(1, 0, 0)) == Character::Hyperbolic);
    auto sl = SpaceSpec::sl2(1, 1, 1);
    check("identity projects to the disk origin", project_pi(identity(sl)).norm() == 0.0);
  }
  {
    auto sol = solve_rotational_sphere(SpaceSpec::semidirect(Mat2::Zero()), 1.0);
    check("euclidean unit sphere closes",
          sol.closed && std::abs(sol.area - 4 * M_PI) < 1e-5);
    auto c = center_of_symmetry(sol);
    check("sphere center of symmetry", (c.c - Vec3(0, 0, 1)).norm() < 1e-6);
  }
  {
    auto spec = SpaceSpec::semidirect(Mat2::Zero());
    auto prof = solve_profile_cmc(spec, Vec3(0, 0, 1), 0.5, 1.0, 0.0, -M_PI / 2);
    check("euclidean cylinder profile is the unit circle",
          prof.closed && std::abs(prof.period - 2 * M_PI) < 1e-8);
    auto gc = gauss_curve(spec, Vec3(0, 0, 1), prof, 64);
    bool equator = gc.closed && !gc.rank0;
    for (const Vec3& g : gc.values) equator = equator && std::abs(g[2]) < 1e-9;
    check("cylinder Gauss curve is the equator", equator);
    auto prof_line = line_profile(0, -1, M_PI / 2, 2.0, 32);
    check("leaf Gauss curve has rank zero",
          gauss_curve(spec, Vec3(1, 0, 0), prof_line, 32).rank0);
  }
  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homog3: invariant geometry and CMC surfaces of 3-dimensional "
               "metric Lie groups and product spaces"};
  app.require_subcommand(1);

  std::string space_arg, out_path, point_arg, dir_arg, from_arg, lambda_arg, grid_arg = "64x128";
  std::string A_arg, K_arg = "Fz", profile_arg, profile_save_arg, surface_arg = "sphere",
              curve_arg, cap_arg, surf_json_arg, H_range_arg, xrange_arg;
  double z_arg = 1.0, T_arg = 5.0, H_arg = 1.0, nullity_tol = 0.05, t_start = 0.0;
  int steps_arg = 1000, samples_arg = 256, k_arg = 8;
  long long seed_arg = 0;
  bool solve_loop = false;

  auto* sc_space = app.add_subcommand("space", "parse a space and print its normalized JSON");
  sc_space->add_option("--space", space_arg, "built-in name or JSON file")->required();

  auto* sc_expm = app.add_subcommand("expm", "closed-form 2x2 exponential e^{zA}");
  sc_expm->add_option("--A", A_arg, "matrix entries a,b,c,d (row major)")->required();
  sc_expm->add_option("--z", z_arg, "exponent parameter")->required();

  auto* sc_metric = app.add_subcommand("metric", "coordinate metric at a point (3x3 CSV)");
  sc_metric->add_option("--space", space_arg)->required();
  sc_metric->add_option("--point", point_arg, "chart coordinates x,y,z")->required();

  auto* sc_geo = app.add_subcommand("geodesic", "geodesic polyline CSV (t,x,y,z)");
  sc_geo->add_option("--space", space_arg)->required();
  sc_geo->add_option("--from", from_arg, "start point x,y,z")->required();
  sc_geo->add_option("--dir", dir_arg, "initial velocity in the orthonormal frame")->required();
  sc_geo->add_option("--T", T_arg, "integration time")->capture_default_str();
  sc_geo->add_option("--steps", steps_arg, "step count (>= 2)")->capture_default_str();
  sc_geo->add_option("--out", out_path, "output CSV (default: stdout)");

  auto* sc_ups = app.add_subcommand("gaussmap-subgroups",
                                    "Gauss map curve of the H^2_theta family (theta,g1,g2,g3)");
  sc_ups->add_option("--lambda", lambda_arg, "metric weights l1,l2,l3")->required();
  sc_ups->add_option("--samples", samples_arg, "number of theta samples")->capture_default_str();
  sc_ups->add_option("--out", out_path, "output CSV (default: stdout)");

  auto* sc_spec = app.add_subcommand("spectrum",
                                     "stability spectrum of the rotational H-sphere (JSON)");
  sc_spec->add_option("--space", space_arg)->required();
  sc_spec->add_option("--surface", surface_arg, "surface family (sphere)")->capture_default_str();
  sc_spec->add_option("--H", H_arg, "mean curvature")->required();
  sc_spec->add_option("--grid", grid_arg, "grid ROWSxCOLS")->capture_default_str();
  sc_spec->add_option("--k", k_arg, "number of eigenvalues")->capture_default_str();
  sc_spec->add_option("--nullity-tol", nullity_tol, "zero-cluster tolerance")
      ->capture_default_str();

  auto* sc_sphere = app.add_subcommand("sphere", "shoot the rotational H-sphere meridian");
  sc_sphere->add_option("--space", space_arg)->required();
  sc_sphere->add_option("--H", H_arg)->required();
  sc_sphere->add_option("--t-start", t_start, "axis offset of the start pole")
      ->capture_default_str();
  sc_sphere->add_option("--out", out_path, "profile CSV (s,a,b,phi)");

  auto* sc_sweep = app.add_subcommand("sweep", "area sweep over H (CSV)");
  sc_sweep->add_option("--space", space_arg)->required();
  sc_sweep->add_option("--H", H_range_arg, "range a:b:step or comma list")->required();
  sc_sweep->add_option("--out", out_path, "output CSV (default: stdout)");
  sc_sweep
      ->add_option("--seed", seed_arg,
                   "seed for randomized sampling (reserved; the sweep is deterministic)")
      ->capture_default_str();

  auto* sc_gc = app.add_subcommand("gauss-curve",
                                   "Gauss map curve of a K-invariant profile (s,g1,g2,g3)");
  sc_gc->add_option("--space", space_arg)->required();
  sc_gc->add_option("--K", K_arg, "Killing seed: F1|F2|F3 or v1,v2,v3")->capture_default_str();
  sc_gc->add_option("--profile", profile_arg, "profile CSV with columns s,x,y,chi,dchi");
  sc_gc->add_flag("--solve-loop", solve_loop, "find the closed profile for --H instead");
  sc_gc->add_option("--H", H_arg, "target mean curvature for --solve-loop");
  sc_gc->add_option("--x-range", xrange_arg, "bracket lo:hi for the loop search");
  sc_gc->add_option("--samples", samples_arg, "curve samples")->capture_default_str();
  sc_gc->add_option("--out", out_path, "output CSV (default: stdout)");
  sc_gc->add_option("--save-profile", profile_save_arg,
                    "write the solved profile as CSV (s,x,y,chi,dchi)");

  auto* sc_flux = app.add_subcommand("flux", "discrete CMC flux of a chain pair (JSON)");
  sc_flux->add_option("--space", space_arg)->required();
  sc_flux->add_option("--surface", surf_json_arg, "surface JSON with the CMC value {\"H\":..}")
      ->required();
  sc_flux->add_option("--curve", curve_arg, "alpha CSV: x,y,z,eta1,eta2,eta3")->required();
  sc_flux->add_option("--cap", cap_arg, "cap JSON: {\"apex\":[x,y,z]} or explicit triangles")
      ->required();
  sc_flux->add_option("--K", K_arg, "Killing selector")->capture_default_str();

  app.add_subcommand("selftest", "run the built-in fixed-value example suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints the message and usage
    return rc == 0 ? 0 : 2;     // 0 only for --help; other parse errors are validation
  }

  try {
    if (sc_space->parsed()) {
      Json j = space_to_json(resolve_space(space_arg));
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (sc_expm->parsed()) {
      const auto a = parse_number_list(A_arg, 4);
      Mat2 A;
      A << a[0], a[1], a[2], a[3];
      print_matrix_csv(expm2(A, z_arg), std::cout);
      return 0;
    }
    if (sc_metric->parsed()) {
      const auto spec = resolve_space(space_arg);
      const auto p = parse_number_list(point_arg, 3);
      if (spec.is_lie_group()) {
        print_matrix_csv(metric_tensor(spec, GroupPoint(spec.chart(), Vec3(p[0], p[1], p[2]))),
                         std::cout);
      } else {
        print_matrix_csv(AmbientChart(spec).metric(Vec3(p[0], p[1], p[2])), std::cout);
      }
      return 0;
    }
    if (sc_geo->parsed()) {
      const auto spec = resolve_space(space_arg);
      const auto p = parse_number_list(from_arg, 3);
      const auto d = parse_number_list(dir_arg, 3);
      GroupPoint start(spec.chart(), Vec3(p[0], p[1], p[2]));
      TangentVector v{start, Vec3(d[0], d[1], d[2])};
      auto r = geodesic(spec, start, v, T_arg, steps_arg);
      std::vector<std::vector<Cell>> rows;
      for (size_t i = 0; i < r.points.size(); ++i) {
        const double t = T_arg * double(i) / steps_arg;
        rows.push_back({Cell{t}, Cell{r.points[i].c[0]}, Cell{r.points[i].c[1]},
                        Cell{r.points[i].c[2]}});
      }
      write_rows({"t", "x", "y", "z"}, rows, out_path);
      return 0;
    }
    if (sc_ups->parsed()) {
      const auto l = parse_number_list(lambda_arg, 3);
      auto curve = upsilon_curve(Vec3(l[0], l[1], l[2]), samples_arg);
      std::vector<std::vector<Cell>> rows;
      for (const auto& s : curve)
        rows.push_back({Cell{s.theta}, Cell{s.g[0]}, Cell{s.g[1]}, Cell{s.g[2]}});
      write_rows({"theta", "g1", "g2", "g3"}, rows, out_path);
      return 0;
    }
    if (sc_spec->parsed()) {
      require(surface_arg == "sphere", "spectrum: only the rotational sphere family is built in");
      const auto spec = resolve_space(space_arg);
      auto sol = solve_rotational_sphere(spec, H_arg);
      if (!sol.closed) {
        Json err{{"kind", "no_closure"}, {"H", H_arg}, {"residual", sol.closure_residual}};
        std::cerr << err.dump() << "\n";
        return 3;
      }
      const auto [nu, nv] = parse_grid(grid_arg);
      auto r = stability_spectrum(sol.immersion(nu, nv), k_arg, nullity_tol);
      Json j{{"H", H_arg},
             {"eigenvalues", r.eigenvalues},
             {"index", r.index},
             {"nullity", r.nullity},
             {"nullity_tol", r.nullity_tol}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (sc_sphere->parsed()) {
      const auto spec = resolve_space(space_arg);
      ShootParams params;
      params.t_start = t_start;
      auto sol = solve_rotational_sphere(spec, H_arg, params);
      if (!sol.closed) {
        Json err{{"kind", "no_closure"},
                 {"H", H_arg},
                 {"arclength", sol.s_total},
                 {"last_orbit_radius",
                  detail_rot::orbit_m(sol.setup, sol.profile.back().a, sol.profile.back().b)}};
        std::cerr << err.dump() << "\n";
        return 3;
      }
      if (!out_path.empty()) {
        std::vector<std::vector<Cell>> rows;
        for (const auto& p : sol.profile)
          rows.push_back({Cell{p.s}, Cell{p.a}, Cell{p.b}, Cell{p.phi}});
        emit_table_file({"s", "a", "b", "phi"}, rows, out_path);
      }
      auto c = center_of_symmetry(sol);
      Json j{{"H", H_arg},
             {"closed", true},
             {"area", sol.area},
             {"closure_residual", sol.closure_residual},
             {"arclength", sol.s_total},
             {"chart", sol.setup.direct ? "semidirect" : "axisymmetric-model"},
             {"center", {c.c[0], c.c[1], c.c[2]}}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (sc_sweep->parsed()) {
      const auto spec = resolve_space(space_arg);
      auto rows = area_sweep(spec, parse_range(H_range_arg));
      std::vector<std::vector<Cell>> table;
      for (const auto& r : rows)
        table.push_back(
            {Cell{r.H}, Cell{r.closed}, Cell{r.area}, Cell{r.closure_residual}});
      write_rows({"H", "closed", "area", "closure_residual"}, table, out_path);
      return 0;
    }
    if (sc_gc->parsed()) {
      const auto spec = resolve_space(space_arg);
      const LieVector K = parse_killing_selector(K_arg);
      PlanarProfile prof;
      if (solve_loop) {
        ClosedProfileSearch search;
        if (!xrange_arg.empty()) {
          const auto r = parse_number_list(xrange_arg.substr(0, xrange_arg.find(':')), 1);
          search.x_lo = r[0];
          search.x_hi = std::stod(xrange_arg.substr(xrange_arg.find(':') + 1));
        }
        prof = find_closed_profile(spec, K, H_arg, search);
      } else {
        require(!profile_arg.empty(), "gauss-curve: need --profile or --solve-loop");
        prof = profile_from_csv(profile_arg);
      }
      if (!profile_save_arg.empty()) {
        std::vector<std::vector<Cell>> rows;
        for (const auto& p : prof.samples)
          rows.push_back({Cell{p.s}, Cell{p.x}, Cell{p.y}, Cell{p.chi}, Cell{p.dchi}});
        emit_table_file({"s", "x", "y", "chi", "dchi"}, rows, profile_save_arg);
      }
      auto gc = gauss_curve(spec, K, prof, samples_arg);
      if (!out_path.empty()) {
        std::vector<std::vector<Cell>> rows;
        for (size_t i = 0; i < gc.values.size(); ++i)
          rows.push_back({Cell{gc.s[i]}, Cell{gc.values[i][0]}, Cell{gc.values[i][1]},
                          Cell{gc.values[i][2]}});
        emit_table_file({"s", "g1", "g2", "g3"}, rows, out_path);
      }
      Json j{{"rank0", gc.rank0},
             {"closed", gc.closed},
             {"regular", gc.regular},
             {"embedded", gc.embedded},
             {"closure_gap", gc.closure_gap},
             {"min_speed", gc.min_speed},
             {"profile_closed", prof.closed},
             {"profile_period", prof.period},
             {"profile_closure_residual", prof.closure_residual}};
      std::cout << j.dump(2) << "\n";
      if (!prof.closed && !gc.rank0) {
        Json err{{"kind", "no_closure"}, {"residual", prof.closure_residual}};
        std::cerr << err.dump() << "\n";
        return 3;
      }
      return 0;
    }
    if (sc_flux->parsed()) {
      const auto spec = resolve_space(space_arg);
      AmbientChart ac(spec);
      std::ifstream sf(surf_json_arg);
      require(sf.good(), "flux: cannot open surface JSON");
      Json surf;
      sf >> surf;
      FluxInput in;
      in.H = surf.at("H").get<double>();
      for (const auto& row : parse_csv_file(curve_arg)) {
        require(row.size() >= 6, "flux: curve CSV needs x,y,z,eta1,eta2,eta3");
        in.alpha.push_back(Vec3(row[0], row[1], row[2]));
        in.eta.push_back(Vec3(row[3], row[4], row[5]));
      }
      std::ifstream cf(cap_arg);
      require(cf.good(), "flux: cannot open cap JSON");
      Json cap;
      cf >> cap;
      if (cap.contains("apex")) {
        const auto& a = cap["apex"];
        in.beta = cone_cap(ac, in.alpha, in.eta, Vec3(a[0], a[1], a[2]));
      } else {
        const auto& tris = cap.at("triangles");
        const auto& norms = cap.at("normals");
        const auto& areas = cap.at("areas");
        for (size_t i = 0; i < tris.size(); ++i) {
          FluxFace f;
          for (int k = 0; k < 3; ++k)
            f.v[k] = Vec3(tris[i][k][0], tris[i][k][1], tris[i][k][2]);
          f.N = Vec3(norms[i][0], norms[i][1], norms[i][2]);
          f.area = areas[i];
          in.beta.push_back(f);
        }
      }
      const LieVector seed = parse_killing_selector(K_arg);
      require(spec.kind == SpaceKind::Semidirect,
              "flux: Killing selectors are wired for semidirect specs");
      auto K = [&](const Vec3& p) { return detail_inv::killing_field(spec, seed, p); };
      auto terms = cmc_flux_terms(ac, in, K);
      Json j{{"line_term", terms.line_term}, {"cap_term", terms.cap_term},
             {"total", terms.total}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (app.get_subcommand("selftest")->parsed()) {
      return run_selftest();
    }
  } catch (const std::invalid_argument& e) {
    Json err{{"kind", "validation"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    Json err{{"kind", "numerical"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  }
  return 2;
}
