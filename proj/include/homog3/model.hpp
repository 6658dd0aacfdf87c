#pragma once

#include "homog3/core.hpp"

namespace homog3 {

/// Axisymmetric ambient model in coordinates (rho, psi, t), rho >= 0:
///
///   Bundle family:           dρ² + m(ρ)² dψ² + (dt + h(ρ) dψ)²
///     m = sn_κ(ρ), h' = -2τ sn_κ(ρ), h(0) = 0.  Covers M²(κ)×R (τ = 0),
///     Nil-type twisted bundles over flat/hyperbolic base (κ <= 0, τ != 0),
///     and the κ > 0 product slices.
///   HyperbolicFermi family:  dρ² + (sinh(aρ)/a)² dψ² + cosh(aρ)² dt²
///     Fermi coordinates around a geodesic of hyperbolic 3-space of
///     curvature -a².
///
/// Both have exact metric derivatives and an exact Ricci quadratic form.
struct RotModel {
  enum class Family { Bundle, HyperbolicFermi };
  Family family = Family::Bundle;
  double kappa = 0.0;  // Bundle base curvature
  double tau = 0.0;    // Bundle twist
  double a = 1.0;      // Fermi curvature scale (curvature -a^2)

  static RotModel bundle(double kappa, double tau) {
    require(kappa <= 0.0 || tau == 0.0, "rot model: twisted bundle needs kappa <= 0");
    RotModel m;
    m.family = Family::Bundle;
    m.kappa = kappa;
    m.tau = tau;
    return m;
  }
  static RotModel hyperbolic_fermi(double a) {
    require(a > 0, "rot model: fermi scale must be positive");
    RotModel m;
    m.family = Family::HyperbolicFermi;
    m.a = a;
    return m;
  }

  // orbit-circle profile m(rho) and helpers
  double sn(double rho) const {
    if (family == Family::HyperbolicFermi) return std::sinh(a * rho) / a;
    if (kappa > 0) {
      const double r = std::sqrt(kappa);
      return std::sin(r * rho) / r;
    }
    if (kappa < 0) {
      const double r = std::sqrt(-kappa);
      return std::sinh(r * rho) / r;
    }
    return rho;
  }
  double dsn(double rho) const {
    if (family == Family::HyperbolicFermi) return std::cosh(a * rho);
    if (kappa > 0) return std::cos(std::sqrt(kappa) * rho);
    if (kappa < 0) return std::cosh(std::sqrt(-kappa) * rho);
    return 1.0;
  }
  double wlen(double rho) const {
    return family == Family::HyperbolicFermi ? std::cosh(a * rho) : 1.0;
  }
  double dwlen(double rho) const {
    return family == Family::HyperbolicFermi ? a * std::sinh(a * rho) : 0.0;
  }
  double twist(double rho) const {  // h(ρ) = -2τ ∫_0^ρ sn_κ
    if (family == Family::HyperbolicFermi || tau == 0.0) return 0.0;
    if (kappa < 0) {
      const double r = std::sqrt(-kappa);
      return -2.0 * tau * (std::cosh(r * rho) - 1.0) / (-kappa);
    }
    return -tau * rho * rho;  // kappa = 0
  }
  double dtwist(double rho) const { return (family == Family::Bundle) ? -2.0 * tau * sn(rho) : 0.0; }

  /// largest rho for which the chart is sensible (antipodal axis for κ > 0)
  double rho_max() const {
    if (family == Family::Bundle && kappa > 0) return M_PI / std::sqrt(kappa);
    return std::numeric_limits<double>::infinity();
  }

  Mat3 metric(const Vec3& p) const {
    const double rho = p[0];
    Mat3 g = Mat3::Zero();
    g(0, 0) = 1.0;
    if (family == Family::HyperbolicFermi) {
      const double m = sn(rho), w = wlen(rho);
      g(1, 1) = m * m;
      g(2, 2) = w * w;
    } else {
      const double m = sn(rho), h = twist(rho);
      g(1, 1) = m * m + h * h;
      g(1, 2) = g(2, 1) = h;
      g(2, 2) = 1.0;
    }
    return g;
  }

  Mat3 dmetric(const Vec3& p, int axis) const {
    Mat3 dg = Mat3::Zero();
    if (axis != 0) return dg;
    const double rho = p[0];
    if (family == Family::HyperbolicFermi) {
      dg(1, 1) = 2.0 * sn(rho) * dsn(rho);
      dg(2, 2) = 2.0 * wlen(rho) * dwlen(rho);
    } else {
      const double m = sn(rho), h = twist(rho), dh = dtwist(rho);
      dg(1, 1) = 2.0 * m * dsn(rho) + 2.0 * h * dh;
      dg(1, 2) = dg(2, 1) = dh;
    }
    return dg;
  }

  /// Ric(N, N) for a unit chart vector N at p.
  double ricci_normal(const Vec3& p, const Vec3& N) const {
    if (family == Family::HyperbolicFermi) return -2.0 * a * a;
    // E(κ,τ): Ric = (κ-2τ²) on the horizontal plane, 2τ² along the unit
    // fiber ξ = ∂t; product case is τ = 0.
    const Mat3 g = metric(p);
    const double vert = N.dot(g * Vec3(0, 0, 1));  // <N, ξ>, |ξ| = 1
    const double v2 = vert * vert;
    return (kappa - 2.0 * tau * tau) * (1.0 - v2) + 2.0 * tau * tau * v2;
  }
};

}  // namespace homog3
