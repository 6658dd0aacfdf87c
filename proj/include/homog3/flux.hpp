#pragma once

#include "homog3/surface.hpp"

#include <map>

namespace homog3 {

// ---------------------------------------------------------------------------
// Discrete CMC flux
//
//   Flux(M, α, K) = ∫_α <K, η> + 2 H ∫_β <K, N>
//
// α: closed polyline on the surface with a unit conormal per segment;
// β: triangulated cap with ∂β = α, unit normal and area per face;
// H: the surface's CMC value with respect to the co-orientation compatible
// with the cap normal (<N, η> <= 0 along α).  Midpoint rule on segments,
// centroid rule on faces; fixed summation order.
// ---------------------------------------------------------------------------

struct FluxFace {
  std::array<Vec3, 3> v;
  Vec3 N;       // unit normal (metric)
  double area;  // metric area
};

struct FluxInput {
  std::vector<Vec3> alpha;      // closed polyline: vertex i connects to i+1 (mod n)
  std::vector<Vec3> eta;        // per-segment unit conormal at the segment midpoint
  std::vector<FluxFace> beta;   // triangulated cap
  double H = 0.0;
};

namespace detail_flux {

inline double metric_len(const AmbientChart& ac, const Vec3& at, const Vec3& v) {
  return std::sqrt(v.dot(ac.metric(at) * v));
}

inline void validate(const AmbientChart& ac, const FluxInput& in) {
  const size_t n = in.alpha.size();
  require(n >= 3 && in.eta.size() == n, "cmc_flux: need a closed polyline with one conormal per segment");
  for (size_t i = 0; i < n; ++i) {
    const Vec3 mid = 0.5 * (in.alpha[i] + in.alpha[(i + 1) % n]);
    require(std::abs(metric_len(ac, mid, in.eta[i]) - 1.0) < 1e-6,
            "cmc_flux: non-unit conormal");
  }
  for (const auto& f : in.beta) {
    const Vec3 c = (f.v[0] + f.v[1] + f.v[2]) / 3.0;
    require(std::abs(metric_len(ac, c, f.N) - 1.0) < 1e-6, "cmc_flux: non-unit face normal");
  }
  // combinatorial boundary check: each alpha segment appears as exactly one
  // face edge, and every other face edge appears exactly twice
  auto key = [](const Vec3& a, const Vec3& b) {
    auto quant = [](double x) { return std::llround(x * 1e9); };
    std::array<long long, 6> k = {quant(a[0]), quant(a[1]), quant(a[2]),
                                  quant(b[0]), quant(b[1]), quant(b[2])};
    std::array<long long, 6> r = {k[3], k[4], k[5], k[0], k[1], k[2]};
    return std::min(k, r);
  };
  std::map<std::array<long long, 6>, int> edges;
  for (const auto& f : in.beta)
    for (int e = 0; e < 3; ++e) ++edges[key(f.v[e], f.v[(e + 1) % 3])];
  for (size_t i = 0; i < n; ++i) {
    auto it = edges.find(key(in.alpha[i], in.alpha[(i + 1) % n]));
    require(it != edges.end() && it->second == 1, "cmc_flux: cap boundary does not match alpha");
    edges.erase(it);
  }
  for (const auto& [k, cnt] : edges)
    require(cnt == 2, "cmc_flux: cap has a stray boundary edge");
}

}  // namespace detail_flux

struct FluxBreakdown {
  double line_term = 0;
  double cap_term = 0;  // includes the 2H factor
  double total = 0;
};

template <typename Field>
FluxBreakdown cmc_flux_terms(const AmbientChart& ac, const FluxInput& in, Field&& K,
                             bool validate_killing = true) {
  detail_flux::validate(ac, in);
  const size_t n = in.alpha.size();
  if (validate_killing) {
    for (size_t i = 0; i < n; i += std::max<size_t>(1, n / 5)) {
      const Vec3 mid = 0.5 * (in.alpha[i] + in.alpha[(i + 1) % n]);
      require(killing_residual_chart(ac, K, mid) < 1e-4, "cmc_flux: field is not Killing");
    }
  }
  FluxBreakdown out;
  for (size_t i = 0; i < n; ++i) {
    const Vec3 a = in.alpha[i], b = in.alpha[(i + 1) % n];
    const Vec3 mid = 0.5 * (a + b);
    const double len = detail_flux::metric_len(ac, mid, b - a);
    out.line_term += K(mid).dot(ac.metric(mid) * in.eta[i]) * len;
  }
  for (const auto& f : in.beta) {
    const Vec3 c = (f.v[0] + f.v[1] + f.v[2]) / 3.0;
    out.cap_term += K(c).dot(ac.metric(c) * f.N) * f.area;
  }
  out.cap_term *= 2.0 * in.H;
  out.total = out.line_term + out.cap_term;
  return out;
}

template <typename Field>
double cmc_flux(const AmbientChart& ac, const FluxInput& in, Field&& K) {
  return cmc_flux_terms(ac, in, K).total;
}

// ---------------------------------------------------------------------------
// Cap builder: cone from an apex onto the polyline.  Face normals are
// oriented by sign-flip at assembly so that <N, η> <= 0 along α (the
// compatibility clause); faces away from the boundary follow their
// boundary-adjacent orientation through the fan.
// ---------------------------------------------------------------------------

inline std::vector<FluxFace> cone_cap(const AmbientChart& ac, const std::vector<Vec3>& alpha,
                                      const std::vector<Vec3>& eta, const Vec3& apex) {
  const size_t n = alpha.size();
  std::vector<FluxFace> faces;
  faces.reserve(n);
  double orient = 0.0;
  for (size_t i = 0; i < n; ++i) {
    FluxFace f;
    f.v = {apex, alpha[i], alpha[(i + 1) % n]};
    const Vec3 c = (f.v[0] + f.v[1] + f.v[2]) / 3.0;
    const Vec3 e1 = f.v[1] - f.v[0], e2 = f.v[2] - f.v[0];
    const Mat3 g = ac.metric(c);
    const double a11 = e1.dot(g * e1), a12 = e1.dot(g * e2), a22 = e2.dot(g * e2);
    f.area = 0.5 * std::sqrt(std::max(0.0, a11 * a22 - a12 * a12));
    f.N = ac.unit_normal(c, e1, e2);
    if (orient == 0.0) {
      // fix the global sign from the first face's compatibility with η
      orient = f.N.dot(g * eta[i]) <= 0 ? 1.0 : -1.0;
    }
    f.N *= orient;
    faces.push_back(f);
  }
  return faces;
}

/// Conormal on a Killing-invariant surface: the unit tangent of M that is
/// orthogonal to the curve direction T, taken as the component of ±K
/// orthogonal to T (K is tangent to M and transverse to α).
inline Vec3 surface_conormal(const AmbientChart& ac, const Vec3& p, const Vec3& T,
                             const Vec3& K_at_p, double sign) {
  const Mat3 g = ac.metric(p);
  const Vec3 t = T / std::sqrt(T.dot(g * T));
  Vec3 e = K_at_p - K_at_p.dot(g * t) * t;
  const double len = std::sqrt(e.dot(g * e));
  require(len > 1e-12, "surface_conormal: K parallel to the curve");
  return sign * e / len;
}

/// Flux of two homologous curves with independently built caps; the gap is
/// the discrete homological-invariance defect.
struct HomologyGap {
  double flux1 = 0, flux2 = 0, gap = 0;
};

template <typename Field>
HomologyGap homology_invariance_check(const AmbientChart& ac, const FluxInput& in1,
                                      const FluxInput& in2, Field&& K) {
  HomologyGap out;
  out.flux1 = cmc_flux(ac, in1, K);
  out.flux2 = cmc_flux(ac, in2, K);
  out.gap = std::abs(out.flux1 - out.flux2);
  return out;
}

}  // namespace homog3
