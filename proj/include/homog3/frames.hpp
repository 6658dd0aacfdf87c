#pragma once

#include "homog3/group.hpp"

#include <array>
#include <vector>

namespace homog3 {

using Tensor3 = std::array<Mat3, 3>;  // T[k](i,j)

// ---------------------------------------------------------------------------
// Lie algebra data in the orthonormal frame
// ---------------------------------------------------------------------------

/// Structure constants c[k](i,j) with [ê_i, ê_j] = Σ_k c[k](i,j) ê_k, in the
/// orthonormal frame ({E1,E2,E3} for semidirect, {λ_i^{-1/2} E_i} for SL2~).
inline Tensor3 structure_constants(const SpaceSpec& spec) {
  require(spec.is_lie_group(), "structure_constants: space is not a Lie group");
  Tensor3 c;
  for (auto& m : c) m.setZero();
  if (spec.kind == SpaceKind::Semidirect) {
    const double a = spec.A(0, 0), b = spec.A(0, 1), cc = spec.A(1, 0), d = spec.A(1, 1);
    // [E3,E1] = a E1 + c E2, [E3,E2] = b E1 + d E2, [E1,E2] = 0
    c[0](2, 0) = a;
    c[0](0, 2) = -a;
    c[1](2, 0) = cc;
    c[1](0, 2) = -cc;
    c[0](2, 1) = b;
    c[0](1, 2) = -b;
    c[1](2, 1) = d;
    c[1](1, 2) = -d;
  } else {
    // [E1,E2] = -2 E3, [E2,E3] = 2 E1, [E3,E1] = 2 E2, rescaled by
    // sqrt(λ_k)/sqrt(λ_i λ_j) in the orthonormal frame.
    const Vec3 l = spec.lambda;
    auto set = [&](int k, int i, int j, double base) {
      const double v = base * std::sqrt(l[k] / (l[i] * l[j]));
      c[k](i, j) = v;
      c[k](j, i) = -v;
    };
    set(2, 0, 1, -2.0);
    set(0, 1, 2, 2.0);
    set(1, 2, 0, 2.0);
  }
  return c;
}

/// Levi-Civita connection in the orthonormal frame, Γ[k](i,j) = <∇_{ê_i} ê_j, ê_k>.
/// Koszul with constant metric: 2<∇_i j, k> = c^k_{ij} - c^i_{jk} + c^j_{ki}.
inline Tensor3 connection_coeffs(const SpaceSpec& spec) {
  const Tensor3 c = structure_constants(spec);
  Tensor3 G;
  for (auto& m : G) m.setZero();
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        G[k](i, j) = 0.5 * (c[k](i, j) - c[i](j, k) + c[j](k, i));
  return G;
}

/// ∇_u v for constant frame components u, v (covariant derivative of the
/// left-invariant extension of v in the direction u).
inline Vec3 frame_nabla(const Tensor3& G, const Vec3& u, const Vec3& v) {
  Vec3 r = Vec3::Zero();
  for (int k = 0; k < 3; ++k) r[k] = u.dot(G[k] * v);
  return r;
}

struct CurvatureFrame {
  Mat3 ricci;     // Ric(ê_j, ê_k)
  double scalar;  // trace
};

/// Ricci tensor in the orthonormal frame, assembled algebraically from the
/// constant connection and structure constants.
inline CurvatureFrame ricci_frame(const SpaceSpec& spec) {
  const Tensor3 c = structure_constants(spec);
  const Tensor3 G = connection_coeffs(spec);
  // R(ê_i,ê_j)ê_k = ∇_i ∇_j ê_k - ∇_j ∇_i ê_k - ∇_{[ê_i,ê_j]} ê_k
  auto Rcomp = [&](int l, int k, int i, int j) {
    double r = 0;
    for (int m = 0; m < 3; ++m) {
      r += G[m](j, k) * G[l](i, m) - G[m](i, k) * G[l](j, m) - c[m](i, j) * G[l](m, k);
    }
    return r;
  };
  CurvatureFrame out;
  out.ricci.setZero();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      double s = 0;
      for (int i = 0; i < 3; ++i) s += Rcomp(i, k, i, j);
      out.ricci(j, k) = s;
    }
  out.scalar = out.ricci.trace();
  return out;
}

// ---------------------------------------------------------------------------
// Frames and the coordinate metric
// ---------------------------------------------------------------------------

/// Columns = coordinate components of the left-invariant frame {E1,E2,E3}
/// (the distinguished algebra basis, not yet normalised for SL2~).
inline Mat3 frame_matrix_E(const SpaceSpec& spec, const GroupPoint& p) {
  require(spec.is_lie_group(), "frame_matrix_E: space is not a Lie group");
  Mat3 P = Mat3::Zero();
  if (spec.kind == SpaceKind::Semidirect) {
    P.topLeftCorner<2, 2>() = expm2(spec.A, p.c[2]);
    P(2, 2) = 1.0;
    return P;
  }
  const double w1 = p.c[0], w2 = p.c[1];
  P.col(0) = Vec3(1.0 - w1 * w1 + w2 * w2, -2.0 * w1 * w2, 2.0 * w2);
  P.col(1) = Vec3(2.0 * w1 * w2, -(1.0 + w1 * w1 - w2 * w2), 2.0 * w1);
  P.col(2) = Vec3(-2.0 * w2, 2.0 * w1, -2.0);
  return P;
}

inline Mat3 dframe_matrix_E(const SpaceSpec& spec, const GroupPoint& p, int axis) {
  Mat3 dP = Mat3::Zero();
  if (spec.kind == SpaceKind::Semidirect) {
    if (axis == 2) {
      dP.topLeftCorner<2, 2>() = spec.A * expm2(spec.A, p.c[2]);
    }
    return dP;
  }
  const double w1 = p.c[0], w2 = p.c[1];
  if (axis == 0) {
    dP.col(0) = Vec3(-2.0 * w1, -2.0 * w2, 0.0);
    dP.col(1) = Vec3(2.0 * w2, -2.0 * w1, 2.0);
    dP.col(2) = Vec3(0.0, 2.0, 0.0);
  } else if (axis == 1) {
    dP.col(0) = Vec3(2.0 * w2, -2.0 * w1, 2.0);
    dP.col(1) = Vec3(2.0 * w1, 2.0 * w2, 0.0);
    dP.col(2) = Vec3(-2.0, 0.0, 0.0);
  }
  return dP;
}

/// Columns = coordinate components of the orthonormal frame.
inline Mat3 frame_to_chart(const SpaceSpec& spec, const GroupPoint& p) {
  Mat3 P = frame_matrix_E(spec, p);
  if (spec.kind == SpaceKind::SLTwoTilde)
    P = P * spec.lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  return P;
}

/// Right-invariant frame fields F_i (chart components), F_i(e) = E_i(e).
inline Vec3 right_field(const SpaceSpec& spec, const LieVector& v, const GroupPoint& p) {
  require(spec.is_lie_group(), "right_field: space is not a Lie group");
  if (spec.kind == SpaceKind::Semidirect) {
    // F = (a x + b y) ∂x + (c x + d y) ∂z-coefficients per Eq-type formula:
    // seed (v1,v2,v3): F(p) = (v1,v2,0) + v3 * (A p_xy, 1)
    Vec2 h = v.head<2>() + v[2] * (spec.A * p.c.head<2>());
    return Vec3(h[0], h[1], v[2]);
  }
  const Complex wdot(v[0], -v[1]);
  const double thdot = -2.0 * v[2];
  const Complex wp = p.w();
  const Complex xi_conj = std::exp(Complex(0, -p.theta()));
  const Complex dW = wdot * xi_conj * (1.0 - std::norm(wp));
  const double dTh = thdot + 2.0 * std::imag(wdot * std::conj(wp) * xi_conj);
  return Vec3(dW.real(), dW.imag(), dTh);
}

struct FrameFields {
  Vec3 E[3];  // left-invariant (distinguished basis, unnormalised)
  Vec3 F[3];  // right-invariant
};

inline FrameFields frame_fields(const SpaceSpec& spec, const GroupPoint& p) {
  FrameFields f;
  const Mat3 P = frame_matrix_E(spec, p);
  for (int i = 0; i < 3; ++i) {
    f.E[i] = P.col(i);
    f.F[i] = right_field(spec, Vec3::Unit(i), p);
  }
  return f;
}

/// Coordinate metric.  Semidirect: the closed-form coefficients with
/// a_ij(-z) from expm2; SL2~: assembled from the frame matrix.
inline Mat3 metric_tensor(const SpaceSpec& spec, const GroupPoint& p) {
  require(spec.is_lie_group(), "metric_tensor: use chart geometry for product spaces");
  check_point(spec, p, "metric_tensor");
  if (spec.kind == SpaceKind::Semidirect) {
    const Mat2 M = expm2(spec.A, -p.c[2]);
    Mat3 g = Mat3::Zero();
    g.topLeftCorner<2, 2>() = M.transpose() * M;
    g(2, 2) = 1.0;
    return g;
  }
  const Mat3 Q = frame_to_chart(spec, p).inverse();
  return Q.transpose() * Q;
}

inline Mat3 metric_derivative(const SpaceSpec& spec, const GroupPoint& p, int axis) {
  if (spec.kind == SpaceKind::Semidirect) {
    Mat3 dg = Mat3::Zero();
    if (axis == 2) {
      const Mat2 M = expm2(spec.A, -p.c[2]);
      dg.topLeftCorner<2, 2>() =
          -(M.transpose() * (spec.A.transpose() + spec.A) * M);
    }
    return dg;
  }
  if (axis == 2) return Mat3::Zero();
  const Mat3 Phat = frame_to_chart(spec, p);
  Mat3 dP = dframe_matrix_E(spec, p, axis);
  dP = dP * spec.lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  const Mat3 Q = Phat.inverse();
  const Mat3 G = Q.transpose() * Q;
  const Mat3 M = dP * Q;
  return -(M.transpose() * G + G * M);
}

/// Christoffel symbols from an exact metric/derivative pair:
/// Γ[k](i,j) = 1/2 g^{kl} (∂_i g_{lj} + ∂_j g_{li} - ∂_l g_{ij}).
inline Tensor3 christoffel_from_metric(const Mat3& g, const Mat3 dg[3]) {
  const Mat3 ginv = g.inverse();
  Tensor3 out;
  for (auto& m : out) m.setZero();
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int l = 0; l < 3; ++l)
          s += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        out[k](i, j) = 0.5 * s;
      }
  return out;
}

// ---------------------------------------------------------------------------
// Killing residual
// ---------------------------------------------------------------------------

/// max over orthonormal pairs (u,v) of |<∇_u K, v> + <∇_v K, u>|, with the
/// field derivative by centered finite differences (h = 1e-5) and exact
/// Christoffel symbols.
template <typename Field>
double killing_residual(const SpaceSpec& spec, Field&& K, const GroupPoint& p) {
  const double h = 1e-5;
  const Mat3 g = metric_tensor(spec, p);
  Mat3 dg[3];
  for (int a = 0; a < 3; ++a) dg[a] = metric_derivative(spec, p, a);
  const Tensor3 Gamma = christoffel_from_metric(g, dg);

  Mat3 J;  // J(k,i) = ∂_i K^k
  for (int i = 0; i < 3; ++i) {
    GroupPoint pp = p, pm = p;
    pp.c[i] += h;
    pm.c[i] -= h;
    J.col(i) = (K(pp) - K(pm)) / (2.0 * h);
  }
  const Vec3 Kp = K(p);
  const Mat3 B = frame_to_chart(spec, p);  // orthonormal basis columns
  auto nabla = [&](const Vec3& u) {
    Vec3 r = J * u;
    for (int k = 0; k < 3; ++k) r[k] += u.dot(Gamma[k] * Kp);
    return r;
  };
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const Vec3 u = B.col(i), v = B.col(j);
      const double r = u.dot(g * nabla(v)) + v.dot(g * nabla(u));
      worst = std::max(worst, std::abs(r));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

struct GeodesicResult {
  std::vector<GroupPoint> points;
  std::vector<double> speeds;  // |v| in the orthonormal frame, per node
};

/// Geodesic through p with initial velocity v (orthonormal-frame components).
/// Integrates the left-trivialised system: RK4 on the frame velocity
/// v' = -Γ(v,v) (the connection is constant), with the point advanced by
/// multiplication with a short 1-parameter-subgroup step at the midpoint
/// velocity.
inline GeodesicResult geodesic(const SpaceSpec& spec, const GroupPoint& p,
                               const TangentVector& v, double T, int n_steps) {
  require(n_steps >= 2, "geodesic: need at least 2 steps");
  require(v.comps.norm() > 0, "geodesic: zero velocity");
  const Tensor3 G = connection_coeffs(spec);
  const Vec3 to_alg = spec.kind == SpaceKind::SLTwoTilde
                          ? spec.lambda.cwiseSqrt().cwiseInverse().eval()
                          : Vec3::Ones().eval();
  const double h = T / n_steps;
  GeodesicResult out;
  out.points.reserve(n_steps + 1);
  out.speeds.reserve(n_steps + 1);
  GroupPoint g = p;
  Vec3 vel = v.comps;
  out.points.push_back(g);
  out.speeds.push_back(vel.norm());
  auto acc = [&](const Vec3& u) { return (-frame_nabla(G, u, u)).eval(); };
  for (int s = 0; s < n_steps; ++s) {
    const Vec3 k1 = acc(vel);
    const Vec3 k2 = acc(vel + 0.5 * h * k1);
    const Vec3 k3 = acc(vel + 0.5 * h * k2);
    const Vec3 k4 = acc(vel + h * k3);
    const Vec3 vmid = vel + 0.5 * h * k1;
    const Vec3 step_dir = to_alg.asDiagonal() * vmid;
    if (step_dir.norm() > 0) g = multiply(spec, g, one_param_subgroup(spec, step_dir, h));
    vel += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.points.push_back(g);
    out.speeds.push_back(vel.norm());
  }
  return out;
}

}  // namespace homog3
