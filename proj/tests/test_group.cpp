#include "homog3/group.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace homog3;

namespace {
double point_gap(const GroupPoint& a, const GroupPoint& b) {
  return (a.c - b.c).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("semidirect multiply fixed values") {
  SECTION("abelian") {
    auto s = SpaceSpec::semidirect(Mat2::Zero());
    auto g = multiply(s, GroupPoint::semidirect(1, 2, 3), GroupPoint::semidirect(4, 5, 6));
    REQUIRE(point_gap(g, GroupPoint::semidirect(5, 7, 9)) == 0.0);
  }
  SECTION("diagonal exponential") {
    auto s = SpaceSpec::semidirect(Mat2::Identity());
    auto g = multiply(s, GroupPoint::semidirect(0, 0, std::log(2.0)),
                      GroupPoint::semidirect(1, 0, 0));
    REQUIRE(point_gap(g, GroupPoint::semidirect(2, 0, std::log(2.0))) < 1e-14);
  }
  SECTION("sol-type diagonal") {
    Mat2 A;
    A << 1, 0, 0, -1;
    auto s = SpaceSpec::semidirect(A);
    auto g = multiply(s, GroupPoint::semidirect(0, 0, 1), GroupPoint::semidirect(1, 1, 0));
    const Mat2 S = oracles::expm_series(A, 1.0);
    REQUIRE(point_gap(g, GroupPoint::semidirect(S(0, 0), S(1, 1), 1)) < 1e-13);
    REQUIRE(g.c[0] == Catch::Approx(std::exp(1.0)).epsilon(1e-13));
    REQUIRE(g.c[1] == Catch::Approx(std::exp(-1.0)).epsilon(1e-13));
  }
}

TEST_CASE("inverse round trips") {
  auto s = SpaceSpec::semidirect(Mat2::Identity());
  REQUIRE(point_gap(inverse(s, identity(s)), identity(s)) == 0.0);
  REQUIRE(point_gap(inverse(s, GroupPoint::semidirect(1, 0, 0)),
                    GroupPoint::semidirect(-1, 0, 0)) < 1e-15);
  auto g = GroupPoint::semidirect(0, 0, 1);
  REQUIRE(point_gap(multiply(s, g, inverse(s, g)), identity(s)) < 1e-12);

  auto sl = SpaceSpec::sl2(1, 1, 1);
  auto rg = oracles::rng(0x5eed0010);
  for (int it = 0; it < 50; ++it) {
    const Complex w = std::polar(oracles::uniform(rg, 0.0, 0.95),
                                 oracles::uniform(rg, 0.0, 2 * M_PI));
    auto h = GroupPoint::sl2(w, oracles::uniform(rg, -9.0, 9.0));
    REQUIRE(point_gap(multiply(sl, h, inverse(sl, h)), identity(sl)) < 1e-12);
    REQUIRE(point_gap(multiply(sl, inverse(sl, h), h), identity(sl)) < 1e-12);
  }
}

TEST_CASE("geometry mismatch rejected") {
  auto s = SpaceSpec::semidirect(Mat2::Zero());
  auto sl = SpaceSpec::sl2(1, 1, 1);
  REQUIRE_THROWS_AS(multiply(s, identity(s), identity(sl)), std::invalid_argument);
  REQUIRE_THROWS_AS(multiply(sl, identity(s), identity(s)), std::invalid_argument);
}

TEST_CASE("one-parameter subgroups: fixed values") {
  SECTION("vertical axis in any semidirect product") {
    Mat2 A;
    A << 0.3, -1.1, 0.7, 0.2;
    auto s = SpaceSpec::semidirect(A);
    for (double t : {-2.0, 0.0, 0.5, 3.0}) {
      auto g = one_param_subgroup(s, Vec3(0, 0, 1), t);
      REQUIRE(point_gap(g, GroupPoint::semidirect(0, 0, t)) < 1e-14);
    }
  }
  SECTION("sl2 elliptic generator: w = 0 and theta = -2t") {
    auto sl = SpaceSpec::sl2(1, 1, 1);
    for (double t : {0.3, 1.0, -2.5, 7.0}) {
      auto g = one_param_subgroup(sl, Vec3(0, 0, 1), t);
      REQUIRE(std::abs(g.w()) < 1e-13);
      REQUIRE(g.theta() == Catch::Approx(-2.0 * t).margin(1e-11));
    }
  }
  SECTION("sl2 hyperbolic generator E1 projects to diag(e^t, e^-t)") {
    auto sl = SpaceSpec::sl2(1, 1, 1);
    const double t = 1.0;
    auto g = one_param_subgroup(sl, Vec3(1, 0, 0), t);
    // group element corresponds to the disk map of diag(e,1/e)
    const DiskMap dm = sl2_disk_map(expm2(sl2_algebra_matrix(Vec3(1, 0, 0)), t));
    REQUIRE(std::abs(g.w() - dm.w) < 1e-12);
    REQUIRE(g.theta() == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(std::abs(g.w() - Complex(std::tanh(t), 0)) < 1e-12);
  }
}

TEST_CASE("one-parameter subgroups: homomorphism property") {
  auto rg = oracles::rng(0x5eed0011);
  Mat2 A;
  A << 1, 2, 0.5, -1;
  const SpaceSpec spaces[] = {SpaceSpec::semidirect(A), SpaceSpec::sl2(2, 0.5, 1.5)};
  for (const auto& s : spaces) {
    for (int it = 0; it < 60; ++it) {
      Vec3 v = oracles::random_vec3(rg, 1.0);
      if (v.norm() < 1e-3) continue;
      const double a = oracles::uniform(rg, -3.0, 3.0);
      const double b = oracles::uniform(rg, -3.0, 3.0);
      auto lhs = multiply(s, one_param_subgroup(s, v, a), one_param_subgroup(s, v, b));
      auto rhs = one_param_subgroup(s, v, a + b);
      const double scale = std::max(1.0, rhs.c.cwiseAbs().maxCoeff());
      REQUIRE(point_gap(lhs, rhs) / scale < 1e-10);
    }
  }
}

TEST_CASE("expm2 semigroup consistency inside multiply") {
  // multiply(g,h) for semidirect uses expm2; associativity stresses it
  auto rg = oracles::rng(0x5eed0012);
  Mat2 A;
  A << 0.2, 1.4, -0.6, 0.1;
  auto s = SpaceSpec::semidirect(A);
  for (int it = 0; it < 60; ++it) {
    auto g1 = GroupPoint::semidirect(oracles::uniform(rg, -2, 2), oracles::uniform(rg, -2, 2),
                                     oracles::uniform(rg, -2, 2));
    auto g2 = GroupPoint::semidirect(oracles::uniform(rg, -2, 2), oracles::uniform(rg, -2, 2),
                                     oracles::uniform(rg, -2, 2));
    auto g3 = GroupPoint::semidirect(oracles::uniform(rg, -2, 2), oracles::uniform(rg, -2, 2),
                                     oracles::uniform(rg, -2, 2));
    auto lhs = multiply(s, multiply(s, g1, g2), g3);
    auto rhs = multiply(s, g1, multiply(s, g2, g3));
    const double scale = std::max(1.0, rhs.c.cwiseAbs().maxCoeff());
    REQUIRE(point_gap(lhs, rhs) / scale < 1e-12);
  }
}

TEST_CASE("sl2 cover: associativity and winding additivity") {
  auto sl = SpaceSpec::sl2(1, 1, 1);
  auto rg = oracles::rng(0x5eed0013);
  auto rand_pt = [&]() {
    return GroupPoint::sl2(std::polar(oracles::uniform(rg, 0.0, 0.9),
                                      oracles::uniform(rg, 0.0, 2 * M_PI)),
                           oracles::uniform(rg, -12.0, 12.0));
  };
  for (int it = 0; it < 100; ++it) {
    auto g1 = rand_pt(), g2 = rand_pt(), g3 = rand_pt();
    auto lhs = multiply(sl, multiply(sl, g1, g2), g3);
    auto rhs = multiply(sl, g1, multiply(sl, g2, g3));
    REQUIRE(point_gap(lhs, rhs) < 1e-12);
  }

  // The central element: the point on the elliptic axis subgroup whose
  // projection is a full turn.  The generator (E3)_e lifts with angle
  // theta(t) = -2t, so the first central element with theta = 2π is reached
  // at t = -π.  Multiplying by it shifts theta by exactly 2π and fixes w --
  // on both sides.
  auto z = one_param_subgroup(sl, Vec3(0, 0, 1), -M_PI);
  REQUIRE(std::abs(z.w()) < 1e-13);
  REQUIRE(z.theta() == Catch::Approx(2 * M_PI).margin(1e-12));
  for (int it = 0; it < 50; ++it) {
    auto g = rand_pt();
    auto gz = multiply(sl, g, z);
    auto zg = multiply(sl, z, g);
    REQUIRE(std::abs(gz.w() - g.w()) < 1e-12);
    REQUIRE(gz.theta() == Catch::Approx(g.theta() + 2 * M_PI).margin(1e-11));
    REQUIRE(std::abs(zg.w() - g.w()) < 1e-12);
    REQUIRE(zg.theta() == Catch::Approx(g.theta() + 2 * M_PI).margin(1e-11));
  }
}

TEST_CASE("one_param_subgroup rejects zero vector") {
  auto s = SpaceSpec::semidirect(Mat2::Zero());
  REQUIRE_THROWS_AS(one_param_subgroup(s, Vec3::Zero(), 1.0), std::invalid_argument);
}
