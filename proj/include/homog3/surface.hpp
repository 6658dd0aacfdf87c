#pragma once

#include "homog3/chart.hpp"

#include <functional>

namespace homog3 {

/// Parametric immersed surface.  The chart callback maps (u,v) to ambient
/// chart coordinates; all geometric fields are produced by grid-spacing
/// centered differences of the chart, so their accuracy refines at second
/// order with the grid.
struct Immersion {
  enum class Domain { Rectangle, Sphere };

  AmbientChart ambient;
  std::function<Vec3(double, double)> chart;
  Domain domain = Domain::Rectangle;
  double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
  bool periodic_v = false;
  bool dirichlet = false;  // Rectangle spectra: Dirichlet boundary
  int nu = 8, nv = 8;
  double orientation = +1.0;

  /// Sphere parametrization: u in [0,π] (poles at the ends), v in [0,2π).
  static Immersion sphere(const AmbientChart& ac, std::function<Vec3(double, double)> f, int nu,
                          int nv) {
    require(nu >= 8 && nv >= 8, "immersion: grid must be at least 8x8");
    Immersion im;
    im.ambient = ac;
    im.chart = std::move(f);
    im.domain = Domain::Sphere;
    im.u0 = 0;
    im.u1 = M_PI;
    im.v0 = 0;
    im.v1 = 2 * M_PI;
    im.periodic_v = true;
    im.nu = nu;
    im.nv = nv;
    return im;
  }

  static Immersion rectangle(const AmbientChart& ac, std::function<Vec3(double, double)> f,
                             double u0, double u1, double v0, double v1, int nu, int nv,
                             bool dirichlet = false, bool periodic_v = false) {
    require(nu >= 8 && nv >= 8, "immersion: grid must be at least 8x8");
    Immersion im;
    im.ambient = ac;
    im.chart = std::move(f);
    im.domain = Domain::Rectangle;
    im.u0 = u0;
    im.u1 = u1;
    im.v0 = v0;
    im.v1 = v1;
    im.nu = nu;
    im.nv = nv;
    im.dirichlet = dirichlet;
    im.periodic_v = periodic_v;
    return im;
  }

  double du() const { return (u1 - u0) / nu; }
  double dv() const { return (v1 - v0) / nv; }
  double unode(int i) const { return u0 + i * du(); }
  // raw parameter value, never wrapped: differences across the periodic seam
  // must see a continuous chart, so periodic charts are evaluated beyond the
  // fundamental period
  double vnode(int j) const { return v0 + j * dv(); }
  Vec3 at(int i, int j) const { return chart(unode(i), vnode(j)); }
};

/// Per-node geometric data.  Sign convention: σ(u,v) = <N, ∇_u ∂_v f>
/// (shape operator S = -∇N), H = tr(I^{-1} σ)/2; the round sphere with
/// inward normal has H = +1 and the leaf z = 0 has H = trace(A)/2 with
/// respect to E3.
struct SurfaceNode {
  Vec3 pos;
  Vec3 fu, fv;
  Mat2 I;
  Mat2 II;
  Vec3 N;      // unit normal, chart components
  double H = 0;
  double sigma2 = 0;  // |σ|² = tr((I^{-1}σ)²)
  double q = 0;       // |σ|² + Ric(N)
  double sqrt_det = 0;
  Vec3 gauss = Vec3::Zero();  // left-invariant Gauss value (Lie ambients)
  bool degenerate = false;
};

inline SurfaceNode fundamental_forms(const Immersion& im, int i, int j) {
  const bool sphere = im.domain == Immersion::Domain::Sphere;
  require(i >= 1 && i <= im.nu - 1, "fundamental_forms: interior row expected");
  if (!im.periodic_v) require(j >= 1 && j <= im.nv - 1, "fundamental_forms: interior column expected");
  (void)sphere;

  const double hu = im.du(), hv = im.dv();
  const Vec3 f00 = im.at(i, j);
  const Vec3 fpu = im.at(i + 1, j), fmu = im.at(i - 1, j);
  const Vec3 fpv = im.at(i, j + 1), fmv = im.at(i, j - 1);
  const Vec3 fpp = im.at(i + 1, j + 1), fpm = im.at(i + 1, j - 1);
  const Vec3 fmp = im.at(i - 1, j + 1), fmm = im.at(i - 1, j - 1);

  SurfaceNode n;
  n.pos = f00;
  n.fu = (fpu - fmu) / (2 * hu);
  n.fv = (fpv - fmv) / (2 * hv);
  const Vec3 fuu = (fpu - 2 * f00 + fmu) / (hu * hu);
  const Vec3 fvv = (fpv - 2 * f00 + fmv) / (hv * hv);
  const Vec3 fuv = (fpp - fpm - fmp + fmm) / (4 * hu * hv);

  const Mat3 g = im.ambient.metric(f00);
  n.I(0, 0) = n.fu.dot(g * n.fu);
  n.I(0, 1) = n.I(1, 0) = n.fu.dot(g * n.fv);
  n.I(1, 1) = n.fv.dot(g * n.fv);
  const double det = n.I.determinant();
  if (det < 1e-14) {
    n.degenerate = true;
    return n;
  }
  n.sqrt_det = std::sqrt(det);
  n.N = im.orientation * im.ambient.unit_normal(f00, n.fu, n.fv);

  const Tensor3 Gamma = im.ambient.christoffel(f00);
  auto covar = [&](const Vec3& fab, const Vec3& a, const Vec3& b) {
    Vec3 r = fab;
    for (int k = 0; k < 3; ++k) r[k] += a.dot(Gamma[k] * b);
    return r;
  };
  const Vec3 cuu = covar(fuu, n.fu, n.fu);
  const Vec3 cuv = covar(fuv, n.fu, n.fv);
  const Vec3 cvv = covar(fvv, n.fv, n.fv);
  n.II(0, 0) = n.N.dot(g * cuu);
  n.II(0, 1) = n.II(1, 0) = n.N.dot(g * cuv);
  n.II(1, 1) = n.N.dot(g * cvv);

  const Mat2 shape = n.I.inverse() * n.II;
  n.H = 0.5 * shape.trace();
  n.sigma2 = (shape * shape).trace();
  n.q = n.sigma2 + im.ambient.ricci_normal(f00, n.N);

  if (im.ambient.has_frame()) {
    n.gauss = im.ambient.frame(f00).partialPivLu().solve(n.N);
    n.gauss.normalize();
  }
  return n;
}

/// Smoothness residual of the chart at an interior node: Richardson defect
/// between second differences at the grid scale and at half that scale.
/// O(h^2) for a C² chart; order-one at a kink.
inline double chart_smoothness_residual(const Immersion& im, int i, int j) {
  const double u = im.unode(i), v = im.vnode(j);
  auto second = [&](double hu, double hv) {
    const Vec3 fuu =
        (im.chart(u + hu, v) - 2 * im.chart(u, v) + im.chart(u - hu, v)) / (hu * hu);
    const Vec3 fvv =
        (im.chart(u, v + hv) - 2 * im.chart(u, v) + im.chart(u, v - hv)) / (hv * hv);
    return std::pair{fuu, fvv};
  };
  const auto [fuu1, fvv1] = second(im.du(), im.dv());
  const auto [fuu2, fvv2] = second(0.5 * im.du(), 0.5 * im.dv());
  const Vec3 fu = (im.chart(u + im.du(), v) - im.chart(u - im.du(), v)) / (2 * im.du());
  const Vec3 fv = (im.chart(u, v + im.dv()) - im.chart(u, v - im.dv())) / (2 * im.dv());
  const double scale = std::max({1.0, fu.norm(), fv.norm()});
  return ((fuu1 - fuu2).norm() + (fvv1 - fvv2).norm()) / scale;
}

/// Left-invariant Gauss map at a node: frame components of the unit normal
/// (the frame is left-invariant, so this is the normal translated to T_e X).
inline Vec3 left_gauss_map(const Immersion& im, int i, int j) {
  require(im.ambient.has_frame(), "left_gauss_map: ambient space has no group frame");
  SurfaceNode n = fundamental_forms(im, i, j);
  require(!n.degenerate, "left_gauss_map: degenerate chart node");
  return n.gauss;
}

/// Exact second-order jet of a parametric surface at one point (chart
/// components of the derivatives in the two surface parameters).  Used where
/// the parametrization is known analytically, e.g. inside the CMC shooters:
/// the resulting mean curvature carries no finite-difference error.
struct SurfaceJet {
  Vec3 f, f1, f2, f11, f12, f22;
};

struct JetForms {
  Mat2 I;
  Vec3 N;
  double H = 0;
  double sqrt_det = 0;
};

inline JetForms jet_forms(const AmbientChart& ac, const SurfaceJet& j) {
  JetForms out;
  const Mat3 g = ac.metric(j.f);
  out.I(0, 0) = j.f1.dot(g * j.f1);
  out.I(0, 1) = out.I(1, 0) = j.f1.dot(g * j.f2);
  out.I(1, 1) = j.f2.dot(g * j.f2);
  const double det = out.I.determinant();
  out.sqrt_det = det > 0 ? std::sqrt(det) : 0.0;
  out.N = ac.unit_normal(j.f, j.f1, j.f2);
  const Tensor3 Gamma = ac.christoffel(j.f);
  auto covar = [&](const Vec3& fab, const Vec3& x, const Vec3& y) {
    Vec3 r = fab;
    for (int k = 0; k < 3; ++k) r[k] += x.dot(Gamma[k] * y);
    return r;
  };
  Mat2 II;
  II(0, 0) = out.N.dot(g * covar(j.f11, j.f1, j.f1));
  II(0, 1) = II(1, 0) = out.N.dot(g * covar(j.f12, j.f1, j.f2));
  II(1, 1) = out.N.dot(g * covar(j.f22, j.f2, j.f2));
  out.H = 0.5 * (out.I.inverse() * II).trace();
  return out;
}

/// Mean curvature as an affine function of a scalar turning-rate parameter
/// that enters f11 linearly: H(λ) = H0 + λ·slope for the jet with
/// f11 = j.f11 + λ df11.  One metric/Christoffel evaluation serves both the
/// solve and the area element.
struct AffineJetForms {
  Mat2 I;
  Vec3 N;
  double H0 = 0, slope = 0;
  double sqrt_det = 0;
};

inline AffineJetForms jet_forms_affine(const AmbientChart& ac, const SurfaceJet& j,
                                       const Vec3& df11) {
  AffineJetForms out;
  const Mat3 g = ac.metric(j.f);
  out.I(0, 0) = j.f1.dot(g * j.f1);
  out.I(0, 1) = out.I(1, 0) = j.f1.dot(g * j.f2);
  out.I(1, 1) = j.f2.dot(g * j.f2);
  const double det = out.I.determinant();
  out.sqrt_det = det > 0 ? std::sqrt(det) : 0.0;
  out.N = ac.unit_normal(j.f, j.f1, j.f2);
  const Tensor3 Gamma = ac.christoffel(j.f);
  auto covar = [&](const Vec3& fab, const Vec3& x, const Vec3& y) {
    Vec3 r = fab;
    for (int k = 0; k < 3; ++k) r[k] += x.dot(Gamma[k] * y);
    return r;
  };
  Mat2 II;
  II(0, 0) = out.N.dot(g * covar(j.f11, j.f1, j.f1));
  II(0, 1) = II(1, 0) = out.N.dot(g * covar(j.f12, j.f1, j.f2));
  II(1, 1) = out.N.dot(g * covar(j.f22, j.f2, j.f2));
  const Mat2 Iinv = out.I.inverse();
  out.H0 = 0.5 * (Iinv * II).trace();
  Mat2 dII = Mat2::Zero();
  dII(0, 0) = out.N.dot(g * df11);
  out.slope = 0.5 * (Iinv * dII).trace();
  return out;
}

/// Killing-equation residual for a vector field on an arbitrary exact chart:
/// max over orthonormal pairs (u,v) of |<∇_u K, v> + <∇_v K, u>| with the
/// field differentiated by centered differences (h = 1e-5).
template <typename Field>
double killing_residual_chart(const AmbientChart& ac, Field&& K, const Vec3& p) {
  const double h = 1e-5;
  const Mat3 g = ac.metric(p);
  const Tensor3 Gamma = ac.christoffel(p);
  Mat3 J;
  for (int i = 0; i < 3; ++i) {
    Vec3 pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    J.col(i) = (K(pp) - K(pm)) / (2.0 * h);
  }
  const Vec3 Kp = K(p);
  // orthonormal basis from the symmetric inverse square root of g
  Eigen::SelfAdjointEigenSolver<Mat3> es(g);
  const Mat3 B = es.eigenvectors() *
                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
  auto nabla = [&](const Vec3& u) {
    Vec3 r = J * u;
    for (int k = 0; k < 3; ++k) r[k] += u.dot(Gamma[k] * Kp);
    return r;
  };
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const Vec3 u = B.col(i), v = B.col(j);
      worst = std::max(worst, std::abs(u.dot(g * nabla(v)) + v.dot(g * nabla(u))));
    }
  return worst;
}

}  // namespace homog3
