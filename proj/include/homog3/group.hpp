#pragma once

#include "homog3/core.hpp"
#include "homog3/expm2.hpp"

namespace homog3 {

// ---------------------------------------------------------------------------
// SL2~ cover arithmetic.
//
// Group elements are pairs (w, theta): the Moebius automorphism of the unit
// disc phi(ζ) = ξ (ζ + w)/(1 + conj(w) ζ) with ξ = e^{iθ}, together with the
// continuous lift theta of the rotation angle.  Composition of two such maps
// gives
//     w'' = (w' + w conj(ξ'))/(1 + w conj(w') conj(ξ')),
//     ξ'' = ξ ξ' e^{2i arg ν},   ν = 1 + w conj(w') conj(ξ'),
// and since |w|,|w'| < 1 implies Re ν > 0, the principal argument of ν is the
// continuous branch: theta'' = theta + theta' + 2 arg ν is the universal-cover
// group law with no tracking needed.
// ---------------------------------------------------------------------------

inline GroupPoint sl2_multiply(const GroupPoint& g, const GroupPoint& h) {
  const Complex w = g.w(), wp = h.w();
  const Complex xi_p_conj = std::exp(Complex(0, -h.theta()));
  const Complex nu = 1.0 + w * std::conj(wp) * xi_p_conj;
  const Complex w2 = (wp + w * xi_p_conj) / nu;
  const double theta2 = g.theta() + h.theta() + 2.0 * std::arg(nu);
  return GroupPoint::sl2(w2, theta2);
}

inline GroupPoint sl2_inverse(const GroupPoint& g) {
  const Complex w = g.w();
  return GroupPoint::sl2(-w * std::exp(Complex(0, g.theta())), -g.theta());
}

/// Lie algebra element as a traceless 2x2 matrix, basis of (E1,E2,E3):
/// [[1,0],[0,-1]], [[0,1],[1,0]], [[0,-1],[1,0]].
inline Mat2 sl2_algebra_matrix(const LieVector& v) {
  Mat2 B;
  B << v[0], v[1] - v[2], v[1] + v[2], -v[0];
  return B;
}

/// Disk-model data (w, xi) of the Moebius action of M in SL(2,R), via the
/// Cayley transform to SU(1,1): alpha = (m11+m22)/2 + i (m12-m21)/2,
/// beta = (m11-m22)/2 - i (m12+m21)/2; then w = beta/alpha, xi = alpha/conj(alpha).
struct DiskMap {
  Complex w;
  Complex alpha;  // xi = alpha / conj(alpha)
};

inline DiskMap sl2_disk_map(const Mat2& M) {
  const Complex alpha(0.5 * (M(0, 0) + M(1, 1)), 0.5 * (M(0, 1) - M(1, 0)));
  const Complex beta(0.5 * (M(0, 0) - M(1, 1)), -0.5 * (M(0, 1) + M(1, 0)));
  return DiskMap{beta / alpha, alpha};
}

/// Exact exponential exp(t v) in the cover for |t| small enough that the
/// principal branch of 2 arg(alpha) is the continuous lift (|2 t v3| < π/2
/// is safe: d/dt of the lifted angle is -2 v3 / |alpha|^2 with |alpha| >= 1).
inline GroupPoint sl2_exp_small(const LieVector& v, double t) {
  const Mat2 M = expm2(sl2_algebra_matrix(v), t);
  const DiskMap dm = sl2_disk_map(M);
  return GroupPoint::sl2(dm.w, 2.0 * std::arg(dm.alpha));
}

// ---------------------------------------------------------------------------
// Geometry-dispatching group operations
// ---------------------------------------------------------------------------

inline GroupPoint multiply(const SpaceSpec& spec, const GroupPoint& g, const GroupPoint& h) {
  require(spec.is_lie_group(), "multiply: space is not a Lie group");
  check_point(spec, g, "multiply");
  check_point(spec, h, "multiply");
  if (spec.kind == SpaceKind::Semidirect) {
    const Vec2 p1 = g.c.head<2>(), p2 = h.c.head<2>();
    const double z1 = g.c[2], z2 = h.c[2];
    Vec2 p = p1 + expm2(spec.A, z1) * p2;
    return GroupPoint::semidirect(p[0], p[1], z1 + z2);
  }
  return sl2_multiply(g, h);
}

inline GroupPoint inverse(const SpaceSpec& spec, const GroupPoint& g) {
  require(spec.is_lie_group(), "inverse: space is not a Lie group");
  check_point(spec, g, "inverse");
  if (spec.kind == SpaceKind::Semidirect) {
    const Vec2 p = -(expm2(spec.A, -g.c[2]) * g.c.head<2>());
    return GroupPoint::semidirect(p[0], p[1], -g.c[2]);
  }
  return sl2_inverse(g);
}

/// Γ(t) with Γ(0) = e, Γ'(0) = v.  Evaluated by a high-order Taylor base step
/// followed by repeated squaring through the exact group law, so the
/// homomorphism property (and, for SL2~, the winding lift) is inherited from
/// multiply().
inline GroupPoint one_param_subgroup(const SpaceSpec& spec, const LieVector& v, double t) {
  require(spec.is_lie_group(), "one_param_subgroup: space is not a Lie group");
  require(all_finite(v) && v.norm() > 0, "one_param_subgroup: zero vector");
  require(finite(t), "one_param_subgroup: non-finite parameter");

  int k = 0;
  double scale = std::abs(t) * std::max(1.0, v.lpNorm<Eigen::Infinity>());
  while (scale > 1e-3 && k < 60) {
    scale *= 0.5;
    ++k;
  }
  const double te = std::ldexp(t, -k);

  GroupPoint g(spec.chart(), Vec3::Zero());
  if (spec.kind == SpaceKind::Semidirect) {
    // base step: (Φ(te) (v1,v2), v3 te) with Φ = te * phi1(te v3 A)
    const Vec2 p = te * (phi1_small(spec.A, te * v[2]) * v.head<2>());
    g = GroupPoint::semidirect(p[0], p[1], v[2] * te);
  } else {
    g = sl2_exp_small(v, te);
  }
  for (int i = 0; i < k; ++i) g = multiply(spec, g, g);
  return g;
}

// ---------------------------------------------------------------------------
// Adjoint action (used for conjugation-invariance checks of the character)
// ---------------------------------------------------------------------------

/// SU(1,1) representative of a cover element (w, theta); defined up to sign,
/// which is irrelevant for the adjoint action.
inline Eigen::Matrix2cd sl2_su11_matrix(const GroupPoint& g) {
  const double a = 1.0 / std::sqrt(1.0 - std::norm(g.w()));
  const Complex alpha = std::polar(a, 0.5 * g.theta());
  const Complex beta = g.w() * alpha;
  Eigen::Matrix2cd M;
  M << alpha, beta, std::conj(beta), std::conj(alpha);
  return M;
}

/// Ad_g(v) for SL2~, computed in the SU(1,1) picture.  The algebra basis
/// (E1,E2,E3) maps through the Cayley transform to
///   e1 = [[0,1],[1,0]], e2 = [[0,-i],[i,0]], e3 = [[-i,0],[0,i]]
/// (traceless, conjugate-symmetric pattern of su(1,1)).
inline LieVector sl2_adjoint(const GroupPoint& g, const LieVector& v) {
  using CM = Eigen::Matrix2cd;
  const Complex i(0, 1);
  CM e1, e2, e3;
  e1 << 0, 1, 1, 0;
  e2 << 0, -i, i, 0;
  e3 << -i, 0, 0, i;
  const CM M = sl2_su11_matrix(g);
  const CM B = v[0] * e1 + v[1] * e2 + v[2] * e3;
  const CM C = M * B * M.inverse();
  // decompose C = a e1 + b e2 + c e3: C(0,1) = a - ib, C(0,0) = -ic
  const Complex c01 = C(0, 1);
  return LieVector(c01.real(), -c01.imag(), C(0, 0).imag() * -1.0);
}

}  // namespace homog3
