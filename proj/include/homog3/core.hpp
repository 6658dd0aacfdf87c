#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace homog3 {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Complex = std::complex<double>;

/// Tangent vector at the identity, in the distinguished Lie-algebra basis:
/// {(∂x)_e, (∂y)_e, (∂z)_e} for semidirect products, {(E1)_e, (E2)_e, (E3)_e}
/// for the universal cover of SL(2,R).
using LieVector = Vec3;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline bool finite(double x) { return std::isfinite(x); }

template <typename M>
bool all_finite(const M& m) {
  return m.allFinite();
}

enum class SpaceKind {
  Semidirect,          // R^2 ⋊_A R, canonical left-invariant metric
  SLTwoTilde,          // universal cover of SL(2,R), diagonal λ-metric
  ProductSphereR,      // S^2(κ) × R, κ > 0
  ProductHyperbolicR,  // H^2(κ) × R, κ < 0
};

/// Coordinate chart a point lives in.  Lie-group kinds have their own global
/// charts; product spaces and the internal rotational models use an
/// axisymmetric (rho, psi, t) chart around a distinguished axis.
enum class Chart {
  Semidirect,    // (x, y, z)
  SL2Cover,      // (w1, w2, theta), |w| < 1, theta a continuous winding lift
  Axisymmetric,  // (rho, psi, t), rho >= 0
};

struct SpaceSpec {
  SpaceKind kind = SpaceKind::Semidirect;
  Mat2 A = Mat2::Zero();             // Semidirect only
  Vec3 lambda = Vec3::Ones();        // SLTwoTilde only
  double kappa = 0.0;                // product spaces only

  static SpaceSpec semidirect(const Mat2& A) {
    require(all_finite(A), "semidirect: matrix entries must be finite");
    SpaceSpec s;
    s.kind = SpaceKind::Semidirect;
    s.A = A;
    return s;
  }

  static SpaceSpec sl2(double l1, double l2, double l3) {
    require(finite(l1) && finite(l2) && finite(l3) && l1 > 0 && l2 > 0 && l3 > 0,
            "sl2: lambda_i must be positive and finite");
    SpaceSpec s;
    s.kind = SpaceKind::SLTwoTilde;
    s.lambda = Vec3(l1, l2, l3);
    return s;
  }

  static SpaceSpec s2xr(double kappa) {
    require(finite(kappa) && kappa > 0, "s2xr: kappa must be positive");
    SpaceSpec s;
    s.kind = SpaceKind::ProductSphereR;
    s.kappa = kappa;
    return s;
  }

  static SpaceSpec h2xr(double kappa) {
    require(finite(kappa) && kappa < 0, "h2xr: kappa must be negative");
    SpaceSpec s;
    s.kind = SpaceKind::ProductHyperbolicR;
    s.kappa = kappa;
    return s;
  }

  bool is_lie_group() const {
    return kind == SpaceKind::Semidirect || kind == SpaceKind::SLTwoTilde;
  }

  Chart chart() const {
    switch (kind) {
      case SpaceKind::Semidirect: return Chart::Semidirect;
      case SpaceKind::SLTwoTilde: return Chart::SL2Cover;
      default: return Chart::Axisymmetric;
    }
  }
};

/// A group element (or, for product spaces, a chart point).
///   Semidirect:   c = (x, y, z)
///   SL2Cover:     c = (w1, w2, theta) with w = w1 + i w2 the disk point of the
///                 Moebius map phi(ζ) = ξ(ζ+w)/(1+conj(w)ζ), ξ = e^{iθ}, and
///                 theta the continuous lift of the rotation angle.
///   Axisymmetric: c = (rho, psi, t)
struct GroupPoint {
  Chart chart = Chart::Semidirect;
  Vec3 c = Vec3::Zero();

  GroupPoint() = default;
  GroupPoint(Chart ch, const Vec3& coords) : chart(ch), c(coords) {}

  static GroupPoint semidirect(double x, double y, double z) {
    return GroupPoint(Chart::Semidirect, Vec3(x, y, z));
  }
  static GroupPoint sl2(Complex w, double theta) {
    require(std::abs(w) < 1.0, "sl2 point: |w| must be < 1");
    return GroupPoint(Chart::SL2Cover, Vec3(w.real(), w.imag(), theta));
  }

  Complex w() const { return Complex(c[0], c[1]); }
  double theta() const { return c[2]; }
};

inline GroupPoint identity(const SpaceSpec& spec) {
  return GroupPoint(spec.chart(), Vec3::Zero());
}

inline void check_point(const SpaceSpec& spec, const GroupPoint& g, const char* who) {
  require(g.chart == spec.chart(), std::string(who) + ": point geometry does not match space");
  require(all_finite(g.c), std::string(who) + ": non-finite coordinates");
  if (g.chart == Chart::SL2Cover)
    require(g.c[0] * g.c[0] + g.c[1] * g.c[1] < 1.0, std::string(who) + ": |w| must be < 1");
}

/// Tangent vector at a base point, components in the left-invariant
/// orthonormal frame ({E1,E2,E3} for semidirect products, {λ_i^{-1/2} E_i}
/// for SL2~).
struct TangentVector {
  GroupPoint base;
  Vec3 comps = Vec3::Zero();
};

}  // namespace homog3
