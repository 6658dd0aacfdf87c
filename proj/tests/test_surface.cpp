#include "homog3/surface.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "homog3/subgroups.hpp"
#include "oracles.hpp"

using namespace homog3;

namespace {

Immersion round_sphere(const AmbientChart& ac, double R, const Vec3& center, int nu, int nv,
                       double orient = -1.0) {
  auto chart = [R, center](double u, double v) {
    return (center + R * Vec3(std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u)))
        .eval();
  };
  Immersion im = Immersion::sphere(ac, chart, nu, nv);
  im.orientation = orient;  // -1: inward normal, H = +1/R in flat space
  return im;
}

AmbientChart flat() { return AmbientChart(SpaceSpec::semidirect(Mat2::Zero())); }

}  // namespace

TEST_CASE("round sphere in flat space: H, |sigma|^2, q") {
  auto im = round_sphere(flat(), 1.0, Vec3::Zero(), 1024, 2048);
  for (auto [i, j] : {std::pair{512, 0}, {700, 333}, {120, 1500}, {1000, 17}}) {
    SurfaceNode n = fundamental_forms(im, i, j);
    REQUIRE(!n.degenerate);
    REQUIRE(std::abs(n.H - 1.0) < 1e-5);
    REQUIRE(std::abs(n.sigma2 - 2.0) < 1e-5);
    REQUIRE(std::abs(n.q - 2.0) < 1e-5);
    REQUIRE(std::abs(n.N.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("H converges at second order on the round sphere") {
  double err[3];
  int k = 0;
  for (int nu : {16, 32, 64}) {
    auto im = round_sphere(flat(), 1.0, Vec3::Zero(), nu, 2 * nu);
    double worst = 0;
    for (int i = 1; i < nu; i += std::max(1, nu / 7))
      for (int j = 0; j < 2 * nu; j += std::max(1, nu / 3))
        worst = std::max(worst, std::abs(fundamental_forms(im, i, j).H - 1.0));
    err[k++] = worst;
  }
  REQUIRE(err[0] / err[1] > 3.0);
  REQUIRE(err[1] / err[2] > 3.0);
}

TEST_CASE("leaf z=0 has H = trace(A)/2 and North-pole Gauss image") {
  auto rg = oracles::rng(0x5eed6001);
  for (int it = 0; it < 8; ++it) {
    const Mat2 A = oracles::random_mat2(rg, 1.5);
    AmbientChart ac(SpaceSpec::semidirect(A));
    auto chart = [](double u, double v) { return Vec3(u, v, 0.0); };
    auto im = Immersion::rectangle(ac, chart, -1, 1, -1, 1, 16, 16);
    // orientation: fu x fv = +E3 already
    SurfaceNode n = fundamental_forms(im, 8, 8);
    REQUIRE((n.N - Vec3(0, 0, 1)).norm() < 1e-10);
    REQUIRE(n.H == Catch::Approx(0.5 * A.trace()).margin(1e-7));
    REQUIRE((n.gauss - Vec3(0, 0, 1)).norm() < 1e-10);
  }
}

TEST_CASE("vertical plane in flat space is totally geodesic") {
  auto chart = [](double u, double v) { return Vec3(u, 0.0, v); };
  auto im = Immersion::rectangle(flat(), chart, -1, 1, -1, 1, 12, 12);
  SurfaceNode n = fundamental_forms(im, 5, 7);
  REQUIRE(std::abs(n.H) < 1e-12);
  REQUIRE(n.II.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("H2_theta subgroup surface has the constant Gauss value of the family") {
  auto rg = oracles::rng(0x5eed6002);
  for (const Vec3 lambda : {Vec3(1, 1, 1), Vec3(2, 0.5, 1.5)}) {
    auto spec = SpaceSpec::sl2(lambda[0], lambda[1], lambda[2]);
    AmbientChart ac(spec);
    for (double theta : {0.0, 0.8, 2.4}) {
      const Vec3 vP(-std::sin(theta), std::cos(theta), 1.0);  // parabolic
      const Vec3 vH(std::cos(theta), std::sin(theta), 0.0);   // hyperbolic
      auto chart = [&, vP, vH](double u, double v) {
        return multiply(spec, one_param_subgroup(spec, vH, u), one_param_subgroup(spec, vP, v)).c;
      };
      auto im = Immersion::rectangle(ac, chart, -5e-3, 5e-3, -5e-3, 5e-3, 16, 16);
      const Vec3 want = subgroup_gauss_value(lambda, theta);
      Vec3 first = left_gauss_map(im, 8, 8);
      const double sign = (first - want).norm() < (first + want).norm() ? 1.0 : -1.0;
      for (int i : {2, 8, 14})
        for (int j : {3, 8, 13}) {
          const Vec3 got = sign * left_gauss_map(im, i, j);
          REQUIRE((got - want).norm() < 1e-6);
        }
    }
  }
}

TEST_CASE("gauss map of the round sphere has sampled degree one") {
  // outward orientation makes G the identity-like map of S^2
  auto im = round_sphere(flat(), 1.0, Vec3(0.2, -0.4, 1.0), 24, 48, +1.0);
  std::vector<std::vector<Vec3>> G(im.nu + 1, std::vector<Vec3>(im.nv));
  for (int i = 1; i < im.nu; ++i)
    for (int j = 0; j < im.nv; ++j) G[i][j] = left_gauss_map(im, i, j);
  for (int j = 0; j < im.nv; ++j) {
    G[0][j] = Vec3(0, 0, 1);
    G[im.nu][j] = Vec3(0, 0, -1);
  }
  auto solid = [](const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
  };
  double total = 0;
  for (int i = 0; i < im.nu; ++i)
    for (int j = 0; j < im.nv; ++j) {
      const int j2 = (j + 1) % im.nv;
      total += solid(G[i][j], G[i + 1][j], G[i + 1][j2]);
      total += solid(G[i][j], G[i + 1][j2], G[i][j2]);
    }
  REQUIRE(total / (4 * M_PI) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("orientation flip negates H, II, N, G coherently") {
  Mat2 A;
  A << 0.5, 0.2, -0.1, 0.8;
  AmbientChart ac(SpaceSpec::semidirect(A));
  auto chart = [](double u, double v) {
    return Vec3(u + 0.1 * std::sin(v), v, 0.3 * std::sin(u) * std::cos(v));
  };
  auto im = Immersion::rectangle(ac, chart, -1, 1, -1, 1, 16, 16);
  auto flipped = im;
  flipped.orientation = -1.0;
  for (auto [i, j] : {std::pair{4, 4}, {8, 11}}) {
    SurfaceNode a = fundamental_forms(im, i, j);
    SurfaceNode b = fundamental_forms(flipped, i, j);
    REQUIRE((a.N + b.N).norm() < 1e-12);
    REQUIRE(std::abs(a.H + b.H) < 1e-12);
    REQUIRE((a.II + b.II).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((a.gauss + b.gauss).norm() < 1e-12);
    REQUIRE((a.I - b.I).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE(std::abs(a.q - b.q) < 1e-12);
  }
}

TEST_CASE("left translation leaves Gauss map and forms unchanged") {
  Mat2 A;
  A << 1, 0, 0, -1;
  auto spec = SpaceSpec::semidirect(A);
  AmbientChart ac(spec);
  auto base_chart = [](double u, double v) {
    return Vec3(std::cos(v) * (1 + 0.2 * std::sin(u)), std::sin(v) * (1 + 0.2 * std::sin(u)),
                0.3 * u);
  };
  auto im = Immersion::rectangle(ac, base_chart, -1, 1, 0, 2 * M_PI, 16, 32, false, true);
  const GroupPoint a = GroupPoint::semidirect(0.7, -0.3, 0.4);
  auto translated_chart = [&, a](double u, double v) {
    return multiply(spec, a, GroupPoint(Chart::Semidirect, base_chart(u, v))).c;
  };
  auto im2 = Immersion::rectangle(ac, translated_chart, -1, 1, 0, 2 * M_PI, 16, 32, false, true);
  for (auto [i, j] : {std::pair{4, 7}, {8, 0}, {12, 21}}) {
    SurfaceNode n1 = fundamental_forms(im, i, j);
    SurfaceNode n2 = fundamental_forms(im2, i, j);
    REQUIRE((n1.gauss - n2.gauss).norm() < 1e-9);
    REQUIRE(std::abs(n1.H - n2.H) < 1e-9);
    REQUIRE((n1.I - n2.I).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE(std::abs(n1.q - n2.q) < 1e-9);
  }
}

TEST_CASE("chart smoothness residual flags kinks") {
  auto smooth = [](double u, double v) { return Vec3(u, v, std::sin(u) * std::cos(v)); };
  auto kinked = [](double u, double v) { return Vec3(u, v, std::abs(u - 0.516)); };
  auto im1 = Immersion::rectangle(flat(), smooth, 0, 1, 0, 1, 16, 16);
  auto im2 = Immersion::rectangle(flat(), kinked, 0, 1, 0, 1, 16, 16);
  REQUIRE(chart_smoothness_residual(im1, 8, 8) < 1e-2);
  REQUIRE(chart_smoothness_residual(im2, 8, 8) > 1.0);
}

TEST_CASE("model chart Killing fields") {
  for (auto model : {RotModel::bundle(-1.0, 0.0), RotModel::bundle(0.0, 0.5),
                     RotModel::bundle(-4.0, 1.0), RotModel::hyperbolic_fermi(1.0)}) {
    AmbientChart ac(model);
    auto dpsi = [](const Vec3&) { return Vec3(0, 1, 0); };
    auto dt = [](const Vec3&) { return Vec3(0, 0, 1); };
    for (const Vec3 p : {Vec3(0.5, 0.3, 0.1), Vec3(1.2, -1.0, 0.7)}) {
      REQUIRE(killing_residual_chart(ac, dpsi, p) < 1e-6);
      REQUIRE(killing_residual_chart(ac, dt, p) < 1e-6);
    }
  }
}
