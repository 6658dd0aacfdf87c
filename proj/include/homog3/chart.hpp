#pragma once

#include "homog3/frames.hpp"
#include "homog3/model.hpp"

#include <variant>

namespace homog3 {

/// Uniform handle to a coordinate chart with exact metric data: either the
/// native chart of a SpaceSpec (semidirect / SL2~ / product) or an internal
/// axisymmetric model.  Product spaces are served by their RotModel chart.
class AmbientChart {
 public:
  AmbientChart() = default;
  explicit AmbientChart(const SpaceSpec& spec) {
    if (spec.is_lie_group()) {
      src_ = spec;
    } else {
      src_ = RotModel::bundle(spec.kappa, 0.0);
    }
  }
  explicit AmbientChart(const RotModel& model) : src_(model) {}

  bool is_lie() const { return std::holds_alternative<SpaceSpec>(src_); }
  const SpaceSpec& spec() const { return std::get<SpaceSpec>(src_); }
  const RotModel& model() const { return std::get<RotModel>(src_); }

  Chart chart_tag() const {
    return is_lie() ? spec().chart() : Chart::Axisymmetric;
  }

  Mat3 metric(const Vec3& p) const {
    if (is_lie()) return metric_tensor(spec(), GroupPoint(spec().chart(), p));
    return model().metric(p);
  }

  Mat3 dmetric(const Vec3& p, int axis) const {
    if (is_lie()) return metric_derivative(spec(), GroupPoint(spec().chart(), p), axis);
    return model().dmetric(p, axis);
  }

  Tensor3 christoffel(const Vec3& p) const {
    Mat3 dg[3];
    for (int a = 0; a < 3; ++a) dg[a] = dmetric(p, a);
    return christoffel_from_metric(metric(p), dg);
  }

  /// Ric(N, N) for a unit chart vector N at p.
  double ricci_normal(const Vec3& p, const Vec3& N) const {
    if (!is_lie()) return model().ricci_normal(p, N);
    const Mat3 B = frame_to_chart(spec(), GroupPoint(spec().chart(), p));
    const Vec3 n_frame = B.inverse() * N;
    const Mat3 ric = ricci_frame(spec()).ricci;
    return n_frame.dot(ric * n_frame);
  }

  /// Orthonormal left-invariant frame (chart columns); Lie kinds only.
  bool has_frame() const { return is_lie(); }
  Mat3 frame(const Vec3& p) const {
    return frame_to_chart(spec(), GroupPoint(spec().chart(), p));
  }

  /// Metric cross product: unit vector orthogonal to u and v at p,
  /// oriented by the chart volume form.
  Vec3 unit_normal(const Vec3& p, const Vec3& u, const Vec3& v) const {
    const Mat3 g = metric(p);
    const double vol = std::sqrt(g.determinant());
    // (u x v)_k = vol * eps_ijk u^i v^j, raised with g^{-1}
    Vec3 cov = vol * u.cross(v);
    Vec3 n = g.inverse() * cov;
    const double len = std::sqrt(n.dot(g * n));
    require(len > 1e-14, "unit_normal: degenerate tangent pair");
    return n / len;
  }

 private:
  std::variant<SpaceSpec, RotModel> src_;
};

}  // namespace homog3
