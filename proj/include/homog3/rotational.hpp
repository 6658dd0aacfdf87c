#pragma once

#include "homog3/spectrum.hpp"

#include <atomic>
#include <thread>

namespace homog3 {

// ---------------------------------------------------------------------------
// Rotational geometry dispatch
// ---------------------------------------------------------------------------

/// How a space exposes its rotational structure to the meridian shooter.
///
///  * Semidirect with conformal A (a = d, b = -c): coordinate rotations about
///    the z-axis in the native chart; the profile lives in the (x, z) half
///    plane.  The metric only sees a = trace(A)/2.
///  * Semidirect nilpotent canonical form [[0,b],[0,0]] (Nil-type): the
///    canonical metric is the twisted bundle E(0, b/2); shooting runs in the
///    axisymmetric model chart.
///  * SL2~ with λ1 = λ2: the E(-4/λ1, sqrt(λ3)/λ1) model chart.
///  * Product spaces: their own (rho, psi, t) chart.
struct RotationalSetup {
  bool direct = false;    // native semidirect chart with coordinate rotations
  double a_conf = 0.0;    // conformal exponent for the direct case
  AmbientChart ambient;
  RotModel model;         // valid when !direct
};

inline RotationalSetup rotational_setup(const SpaceSpec& spec) {
  RotationalSetup r;
  if (spec.kind == SpaceKind::Semidirect) {
    const Mat2& A = spec.A;
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if (std::abs(A(0, 0) - A(1, 1)) < 1e-12 * scale &&
        std::abs(A(0, 1) + A(1, 0)) < 1e-12 * scale) {
      r.direct = true;
      r.a_conf = A(0, 0);
      r.ambient = AmbientChart(spec);
      return r;
    }
    if (std::abs(A(0, 0)) < 1e-12 * scale && std::abs(A(1, 1)) < 1e-12 * scale &&
        (A(0, 1) == 0.0 || A(1, 0) == 0.0)) {
      const double b = A(0, 1) != 0.0 ? A(0, 1) : A(1, 0);
      if (b != 0.0) {
        r.model = RotModel::bundle(0.0, 0.5 * std::abs(b));
        r.ambient = AmbientChart(r.model);
        return r;
      }
    }
    throw std::invalid_argument("solve_rotational_sphere: semidirect spec is not rotational "
                                "(need conformal A or the Nil canonical form)");
  }
  if (spec.kind == SpaceKind::SLTwoTilde) {
    const Vec3& l = spec.lambda;
    require(std::abs(l[0] - l[1]) < 1e-12 * std::max(l[0], l[1]),
            "solve_rotational_sphere: sl2 spec needs lambda1 = lambda2");
    r.model = RotModel::bundle(-4.0 / l[0], std::sqrt(l[2]) / l[0]);
    r.ambient = AmbientChart(r.model);
    return r;
  }
  r.model = RotModel::bundle(spec.kappa, 0.0);
  r.ambient = AmbientChart(r.model);
  return r;
}

// ---------------------------------------------------------------------------
// Meridian shooting
// ---------------------------------------------------------------------------

struct ShootParams {
  double ds = 1e-3;             // RK4 arclength step
  double closure_tol = 1e-6;    // tangency defect tolerance at the axis
  double m_end = 1e-4;          // orbit-radius threshold for the axis event
  double max_arclength = -1.0;  // default 50/(H+0.1)
  double t_start = 0.0;         // axis offset of the start pole
};

struct ProfileSample {
  double s;     // arclength
  double a;     // rho (model) or x (direct chart)
  double b;     // t (model) or z
  double phi;   // turning angle; a' = cos φ scaled, b' = sin φ scaled
  double dphi;  // solved turning rate
};

namespace detail_rot {

inline SurfaceJet make_jet(const RotationalSetup& su, double a, double b, double phi,
                           double dphi) {
  SurfaceJet j;
  const double c = std::cos(phi), s = std::sin(phi);
  if (su.direct) {
    const double e = std::exp(su.a_conf * b);
    const double xp = e * c, zp = s;
    const double xpp = su.a_conf * zp * e * c - e * s * dphi;
    const double zpp = c * dphi;
    j.f = Vec3(a, 0, b);
    j.f1 = Vec3(xp, 0, zp);
    j.f2 = Vec3(0, a, 0);
    j.f11 = Vec3(xpp, 0, zpp);
    j.f12 = Vec3(0, xp, 0);
    j.f22 = Vec3(-a, 0, 0);
  } else {
    const double w = su.model.wlen(a), dw = su.model.dwlen(a);
    const double rp = c, tp = s / w;
    const double rpp = -s * dphi;
    const double tpp = (c * dphi * w - s * dw * rp) / (w * w);
    j.f = Vec3(a, 0, b);
    j.f1 = Vec3(rp, 0, tp);
    j.f2 = Vec3(0, 1, 0);
    j.f11 = Vec3(rpp, 0, tpp);
    j.f12 = Vec3::Zero();
    j.f22 = Vec3::Zero();
  }
  return j;
}

/// dphi-coefficient of f11 (the mean curvature is affine in the turning rate).
inline Vec3 df11_dturn(const RotationalSetup& su, double a, double b, double phi) {
  if (su.direct) return Vec3(-std::exp(su.a_conf * b) * std::sin(phi), 0, std::cos(phi));
  return Vec3(-std::sin(phi), 0, std::cos(phi) / su.model.wlen(a));
}

/// Solve H(dphi) = H_target exactly from one affine jet evaluation.
inline double solve_turning_rate(const RotationalSetup& su, double a, double b, double phi,
                                 double H_target) {
  const auto af =
      jet_forms_affine(su.ambient, make_jet(su, a, b, phi, 0.0), df11_dturn(su, a, b, phi));
  require(std::abs(af.slope) > 1e-12, "shoot: degenerate turning-rate solve");
  return (H_target - af.H0) / af.slope;
}

/// Orbit-circle radius function m and its radial derivative scale.
inline double orbit_m(const RotationalSetup& su, double a, double b) {
  if (su.direct) return a * std::exp(-su.a_conf * b);
  return su.model.sn(a);
}
inline double orbit_m_radial_deriv(const RotationalSetup& su, double a) {
  return su.direct ? 1.0 : su.model.dsn(a);
}

struct State {
  double a, b, phi, area;
};

inline State derivs(const RotationalSetup& su, const State& y, double H) {
  State d;
  const auto af = jet_forms_affine(su.ambient, make_jet(su, y.a, y.b, y.phi, 0.0),
                                   df11_dturn(su, y.a, y.b, y.phi));
  require(std::abs(af.slope) > 1e-12, "shoot: degenerate turning-rate solve");
  if (su.direct) {
    d.a = std::exp(su.a_conf * y.b) * std::cos(y.phi);
    d.b = std::sin(y.phi);
  } else {
    d.a = std::cos(y.phi);
    d.b = std::sin(y.phi) / su.model.wlen(y.a);
  }
  d.phi = (H - af.H0) / af.slope;
  d.area = 2.0 * M_PI * af.sqrt_det;
  return d;
}

inline State rk4_step(const RotationalSetup& su, const State& y, double h, double H) {
  auto add = [](const State& x, double c, const State& d) {
    return State{x.a + c * d.a, x.b + c * d.b, x.phi + c * d.phi, x.area + c * d.area};
  };
  const State k1 = derivs(su, y, H);
  const State k2 = derivs(su, add(y, 0.5 * h, k1), H);
  const State k3 = derivs(su, add(y, 0.5 * h, k2), H);
  const State k4 = derivs(su, add(y, h, k3), H);
  State out = y;
  out.a += (h / 6.0) * (k1.a + 2 * k2.a + 2 * k3.a + k4.a);
  out.b += (h / 6.0) * (k1.b + 2 * k2.b + 2 * k3.b + k4.b);
  out.phi += (h / 6.0) * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
  out.area += (h / 6.0) * (k1.area + 2 * k2.area + 2 * k3.area + k4.area);
  return out;
}

}  // namespace detail_rot

/// A rotational surface produced by the meridian shooter, with a densely
/// sampled profile that can be re-evaluated anywhere by cubic Hermite
/// interpolation and rebuilt into an Immersion.
struct SphereSolution {
  double H = 0;
  std::vector<ProfileSample> profile;
  double area = 0;
  bool closed = false;
  double closure_residual = std::numeric_limits<double>::infinity();
  RotationalSetup setup;
  double s_total = 0;

  GroupPoint pole_start() const {
    return GroupPoint(setup.direct ? Chart::Semidirect : Chart::Axisymmetric,
                      Vec3(0, 0, profile.front().b));
  }
  GroupPoint pole_end() const {
    require(closed, "pole_end: profile is not closed");
    const auto& last = profile.back();
    return GroupPoint(setup.direct ? Chart::Semidirect : Chart::Axisymmetric,
                      Vec3(setup.direct ? 0.0 : last.a, 0, last.b));
  }

  /// Hermite evaluation of (a, b, phi) at arclength s.
  ProfileSample eval(double s) const {
    const auto& P = profile;
    require(!P.empty(), "eval: empty profile");
    if (s <= P.front().s) return P.front();
    if (s >= P.back().s) return P.back();
    size_t lo = 0, hi = P.size() - 1;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      (P[mid].s <= s ? lo : hi) = mid;
    }
    const auto& p0 = P[lo];
    const auto& p1 = P[lo + 1];
    const double h = p1.s - p0.s, x = (s - p0.s) / h;
    auto hermite = [&](double y0, double y1, double d0, double d1) {
      const double x2 = x * x, x3 = x2 * x;
      return y0 * (2 * x3 - 3 * x2 + 1) + y1 * (-2 * x3 + 3 * x2) +
             h * (d0 * (x3 - 2 * x2 + x) + d1 * (x3 - x2));
    };
    auto dab = [&](const ProfileSample& p) {
      if (setup.direct)
        return std::pair{std::exp(setup.a_conf * p.b) * std::cos(p.phi), std::sin(p.phi)};
      return std::pair{std::cos(p.phi), std::sin(p.phi) / setup.model.wlen(p.a)};
    };
    const auto [da0, db0] = dab(p0);
    const auto [da1, db1] = dab(p1);
    ProfileSample out;
    out.s = s;
    out.a = hermite(p0.a, p1.a, da0, da1);
    out.b = hermite(p0.b, p1.b, db0, db1);
    out.phi = hermite(p0.phi, p1.phi, p0.dphi, p1.dphi);
    out.dphi = p0.dphi + x * (p1.dphi - p0.dphi);
    return out;
  }

  Vec3 chart_point(double s, double psi) const {
    const ProfileSample p = eval(s);
    if (setup.direct) return Vec3(p.a * std::cos(psi), p.a * std::sin(psi), p.b);
    return Vec3(p.a, psi, p.b);
  }

  /// Rebuild as a closed sphere-parametrized immersion (closed profiles only).
  Immersion immersion(int nu, int nv) const {
    require(closed, "immersion: profile is not closed");
    const double L = s_total;
    auto self = *this;  // value copy keeps the immersion self-contained
    auto chart = [self, L](double u, double v) { return self.chart_point(u / M_PI * L, v); };
    Immersion im = Immersion::sphere(setup.ambient, chart, nu, nv);
    im.orientation = +1.0;  // inward-leaning normal of the shot sphere
    return im;
  }
};

/// Shoot the rotational H-sphere meridian from the axis with the regular-cap
/// start (horizontal profile, both principal curvatures H at the pole).
/// The profile closes iff it returns to the axis with the regular tangency
/// relation sin φ = H m / m' within closure_tol; the residual reports the
/// defect.  Open profiles stop at max_arclength.
inline SphereSolution solve_rotational_sphere(const SpaceSpec& spec, double H,
                                              ShootParams params = {}) {
  require(finite(H) && H >= 0.0, "solve_rotational_sphere: need H >= 0");
  SphereSolution sol;
  sol.H = H;
  sol.setup = rotational_setup(spec);
  const auto& su = sol.setup;
  if (params.max_arclength <= 0) params.max_arclength = 50.0 / (H + 0.1);

  using detail_rot::State;
  const double s0 = 1e-6;
  const double da0 = su.direct ? std::exp(su.a_conf * params.t_start) : 1.0;
  State y{s0 * da0, params.t_start + 0.5 * H * s0 * s0, H * s0, 0.0};
  double s = s0;
  sol.profile.push_back({0.0, 0.0, params.t_start, 0.0, H});

  const double m_arm = std::max(10.0 * params.m_end, 1e-2);
  bool armed = false;
  auto record = [&](double ss, const State& st) {
    sol.profile.push_back(
        {ss, st.a, st.b, st.phi, detail_rot::solve_turning_rate(su, st.a, st.b, st.phi, H)});
  };
  record(s, y);

  const double h = params.ds;
  while (s < params.max_arclength) {
    State ynext = detail_rot::rk4_step(su, y, h, H);
    const double m_prev = detail_rot::orbit_m(su, y.a, y.b);
    const double m_next = detail_rot::orbit_m(su, ynext.a, ynext.b);
    if (!armed && m_next > m_arm) armed = true;
    if (armed && m_next < params.m_end && m_next < m_prev) {
      // refine the event point: largest step fraction with m >= m_end
      double flo = 0.0, fhi = 1.0;
      State yev = ynext;
      for (int it = 0; it < 55; ++it) {
        const double fm = 0.5 * (flo + fhi);
        State ytry = detail_rot::rk4_step(su, y, fm * h, H);
        if (detail_rot::orbit_m(su, ytry.a, ytry.b) >= params.m_end) {
          flo = fm;
        } else {
          fhi = fm;
          yev = ytry;
        }
      }
      s += fhi * h;
      record(s, yev);
      const double m = detail_rot::orbit_m(su, yev.a, yev.b);
      const double mp = detail_rot::orbit_m_radial_deriv(su, yev.a);
      sol.closure_residual = std::abs(std::sin(yev.phi) - H * m / mp);
      sol.closed = sol.closure_residual < params.closure_tol;
      sol.area = yev.area;
      sol.s_total = s + m;  // extend to the exact axis point
      if (sol.closed) {
        const double phi_end = mp > 0 ? M_PI : 0.0;
        const double b_end = yev.b + std::sin(yev.phi) * m;
        sol.profile.push_back({sol.s_total, su.direct ? 0.0 : (mp > 0 ? 0.0 : yev.a + m), b_end,
                               phi_end, H});
      }
      return sol;
    }
    y = ynext;
    s += h;
    record(s, y);
    if (!finite(y.a) || !finite(y.b) || !finite(y.phi)) break;
  }
  sol.closed = false;
  sol.area = y.area;
  sol.s_total = s;
  return sol;
}

// ---------------------------------------------------------------------------
// Area sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  double H;
  bool closed;
  double area;
  double closure_residual;
};

inline int worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("HOMOG3_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n ? n : 1, unsigned(cap));
  }
  return int(std::max(1u, n));
}

/// Shoot every H in the list (parallel fan-out, deterministic merge by H
/// order); open profiles propagate as rows with closed = false.
inline std::vector<SweepRow> area_sweep(const SpaceSpec& spec, const std::vector<double>& H_list,
                                        ShootParams params = {}) {
  std::vector<SweepRow> rows(H_list.size());
  const int nw = std::min<int>(worker_count(), std::max<size_t>(1, H_list.size()));
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= H_list.size()) return;
      ShootParams p = params;
      p.max_arclength = -1;
      auto sol = solve_rotational_sphere(spec, H_list[i], p);
      rows[i] = {H_list[i], sol.closed, sol.area, sol.closure_residual};
    }
  };
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nw; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.H < b.H; });
  return rows;
}

// ---------------------------------------------------------------------------
// Center of symmetry
// ---------------------------------------------------------------------------

/// Locate the two profile points whose normal is (anti)parallel to the axis
/// direction (the poles) and return the midpoint of the axis arc joining
/// them.  The axis is the t-line rho = 0 (model) or the z-axis (direct).
inline GroupPoint center_of_symmetry(const SphereSolution& sol) {
  require(sol.closed, "center_of_symmetry: sphere is not closed");
  // verify the poles via the normal direction at the profile ends
  const auto& su = sol.setup;
  for (double send : {0.02 * sol.s_total, 0.98 * sol.s_total}) {
    const ProfileSample p = sol.eval(send);
    auto jet = detail_rot::make_jet(su, p.a, p.b, p.phi, p.dphi);
    const Vec3 N = su.ambient.unit_normal(jet.f, jet.f1, jet.f2);
    const Vec3 axis = Vec3::UnitZ();  // z-line (direct) and t-line (model) alike
    const Mat3 g = su.ambient.metric(jet.f);
    const double align = std::abs(N.dot(g * axis)) / std::sqrt(axis.dot(g * axis));
    require(align > 0.9, "center_of_symmetry: neighbourhood of the pole does not face the axis");
  }
  const double b_mid = 0.5 * (sol.profile.front().b + sol.profile.back().b);
  return GroupPoint(su.direct ? Chart::Semidirect : Chart::Axisymmetric, Vec3(0, 0, b_mid));
}

}  // namespace homog3
