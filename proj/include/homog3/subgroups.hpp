#pragma once

#include "homog3/group.hpp"

#include <vector>

namespace homog3 {

// ---------------------------------------------------------------------------
// 1-parameter subgroups of SL2~ and the two-dimensional subgroups H²_θ.
// ---------------------------------------------------------------------------

enum class Character { Elliptic, Parabolic, Hyperbolic };

inline const char* to_string(Character c) {
  switch (c) {
    case Character::Elliptic: return "elliptic";
    case Character::Parabolic: return "parabolic";
    case Character::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

/// Character of the subgroup generated by (a,b,c) in the basis
/// (E1,E2,E3): elliptic iff a²+b² < c², parabolic iff equal, hyperbolic iff
/// greater.  Equality is tested with a relative tolerance.
inline Character classify_character(const LieVector& v, double tol = 1e-12) {
  require(all_finite(v) && v.norm() > 0, "classify_character: zero vector");
  const double horiz = v[0] * v[0] + v[1] * v[1];
  const double vert = v[2] * v[2];
  const double scale = std::max(horiz, vert);
  if (std::abs(horiz - vert) <= tol * scale) return Character::Parabolic;
  return horiz < vert ? Character::Elliptic : Character::Hyperbolic;
}

/// Constant left-invariant Gauss map value G_θ of the two-dimensional
/// subgroup H²_θ, in the orthonormal frame {λ_i^{-1/2} (E_i)_e}:
///
///   G_θ = ( -sqrt(λ2 λ3) sin θ, sqrt(λ1 λ3) cos θ, -sqrt(λ1 λ2) ) / norm.
///
/// The free overall sign is fixed so the third component is negative.
inline Vec3 subgroup_gauss_value(const Vec3& lambda, double theta) {
  require((lambda.array() > 0).all(), "subgroup_gauss_value: lambda_i must be positive");
  const double l1 = lambda[0], l2 = lambda[1], l3 = lambda[2];
  Vec3 g(-std::sqrt(l2 * l3) * std::sin(theta), std::sqrt(l1 * l3) * std::cos(theta),
         -std::sqrt(l1 * l2));
  return g.normalized();
}

struct UpsilonSample {
  double theta;
  Vec3 g;
};

/// The Υ curve of Gauss map values of the family {H²_θ}, sampled over one
/// period θ ∈ [0, 2π).
inline std::vector<UpsilonSample> upsilon_curve(const Vec3& lambda, int n_samples) {
  require(n_samples >= 8, "upsilon_curve: need at least 8 samples");
  std::vector<UpsilonSample> out;
  out.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double th = 2.0 * M_PI * double(i) / double(n_samples);
    out.push_back({th, subgroup_gauss_value(lambda, th)});
  }
  return out;
}

/// Riemannian submersion Π : SL2~ → H²(-4), the image of the disk origin
/// under the Moebius map of g (the winding is forgotten).  The target is the
/// unit disk with metric |dζ|²/(1-|ζ|²)², which has curvature -4; Π is
/// Riemannian for the λ = (1,1,1) metric.
inline Vec2 project_pi(const GroupPoint& g) {
  require(g.chart == Chart::SL2Cover, "project_pi: SL2~ point expected");
  const Complex z = std::exp(Complex(0, g.theta())) * g.w();
  return Vec2(z.real(), z.imag());
}

/// Hyperbolic distance in H²(-4) (disk model as above).
inline double h2m4_distance(const Vec2& a, const Vec2& b) {
  const Complex za(a[0], a[1]), zb(b[0], b[1]);
  const double t = std::abs((za - zb) / (1.0 - std::conj(za) * zb));
  return std::atanh(t);  // half of the curvature -1 distance
}

// ---------------------------------------------------------------------------
// The 2-dimensional model group R ⋊_(1) R with (x,y)*(x',y') = (x+e^y x', y+y')
// ---------------------------------------------------------------------------

inline Vec2 model_r_rtimes_r(const Vec2& g, const Vec2& h) {
  return Vec2(g[0] + std::exp(g[1]) * h[0], g[1] + h[1]);
}

inline Vec2 model_r_rtimes_r_inverse(const Vec2& g) {
  return Vec2(-std::exp(-g[1]) * g[0], -g[1]);
}

/// Right-invariant basis fields of R ⋊_(1) R: ∂x and x ∂x + ∂y.
inline Vec2 model_right_field(int which, const Vec2& p) {
  return which == 0 ? Vec2(1, 0) : Vec2(p[0], 1);
}

}  // namespace homog3
