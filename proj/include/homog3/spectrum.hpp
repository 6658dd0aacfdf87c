#pragma once

#include "homog3/surface.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace homog3 {

/// Discretisation of the stability operator L = Δ + q, q = |σ|² + Ric(N):
/// linear finite elements on the triangulated parameter grid with the pulled
/// back first fundamental form frozen per triangle, lumped mass, and nodal
/// potential.  Sphere domains collapse each pole row to a single vertex.
struct StabilityAssembly {
  Eigen::SparseMatrix<double> S;  // stiffness (Dirichlet form of -Δ)
  Eigen::VectorXd mass;           // lumped mass
  Eigen::VectorXd q;              // potential at vertices
  std::vector<Vec3> pos;          // vertex chart positions
  bool pole_resolution_warning = false;  // pole cells degenerated in assembly
  int n = 0;
  int north = -1, south = -1;  // pole vertex ids (Sphere)
  int nu = 0, nv = 0;
  Immersion::Domain domain = Immersion::Domain::Rectangle;
  bool dirichlet = false, periodic_v = false;

  /// Grid node -> vertex id; -1 for eliminated Dirichlet boundary nodes.
  int vid(int i, int j) const {
    if (domain == Immersion::Domain::Sphere) {
      if (i == 0) return north;
      if (i == nu) return south;
      return (i - 1) * nv + ((j % nv) + nv) % nv;
    }
    if (periodic_v) {
      if (dirichlet && (i == 0 || i == nu)) return -1;
      const int ii = dirichlet ? i - 1 : i;
      return ii * nv + ((j % nv) + nv) % nv;
    }
    if (dirichlet) {
      if (i == 0 || i == nu || j == 0 || j == nv) return -1;
      return (i - 1) * (nv - 1) + (j - 1);
    }
    return i * (nv + 1) + j;
  }

  /// Nodal action of L = Δ + q: (q_i u_i) - (S u)_i / m_i.
  Eigen::VectorXd apply_L(const Eigen::VectorXd& u) const {
    Eigen::VectorXd r = -(S * u);
    for (int i = 0; i < n; ++i) r[i] = r[i] / mass[i] + q[i] * u[i];
    return r;
  }
};

namespace detail {

/// First fundamental form at an arbitrary parameter point (centered FD of
/// the chart with grid-scaled steps).
inline Mat2 first_form_at(const Immersion& im, double u, double v) {
  const double hu = im.du() * 0.25, hv = im.dv() * 0.25;
  const Vec3 fu = (im.chart(u + hu, v) - im.chart(u - hu, v)) / (2 * hu);
  const Vec3 fv = (im.chart(u, v + hv) - im.chart(u, v - hv)) / (2 * hv);
  const Mat3 g = im.ambient.metric(im.chart(u, v));
  Mat2 I;
  I(0, 0) = fu.dot(g * fu);
  I(0, 1) = I(1, 0) = fu.dot(g * fv);
  I(1, 1) = fv.dot(g * fv);
  return I;
}

}  // namespace detail

inline StabilityAssembly assemble_stability(const Immersion& im) {
  const bool sphere = im.domain == Immersion::Domain::Sphere;
  StabilityAssembly A;
  A.nu = im.nu;
  A.nv = im.nv;
  A.domain = im.domain;
  A.dirichlet = im.dirichlet;
  A.periodic_v = im.periodic_v;

  if (sphere) {
    A.n = (im.nu - 1) * im.nv + 2;
    A.north = A.n - 2;
    A.south = A.n - 1;
  } else if (im.periodic_v) {
    A.n = (im.dirichlet ? im.nu - 1 : im.nu + 1) * im.nv;
  } else {
    A.n = im.dirichlet ? (im.nu - 1) * (im.nv - 1) : (im.nu + 1) * (im.nv + 1);
  }
  A.mass = Eigen::VectorXd::Zero(A.n);
  A.q = Eigen::VectorXd::Zero(A.n);
  A.pos.assign(A.n, Vec3::Zero());

  // nodal potential and positions from the fundamental forms
  std::vector<Eigen::Triplet<double>> trips;
  const int i_lo = sphere ? 1 : 0, i_hi = sphere ? im.nu - 1 : im.nu;
  for (int i = i_lo; i <= i_hi; ++i) {
    const int j_hi = im.periodic_v ? im.nv - 1 : im.nv;
    for (int j = 0; j <= j_hi; ++j) {
      const int id = A.vid(i, j);
      if (id < 0) continue;
      A.pos[id] = im.at(i, j);
      const bool interior_u = i >= 1 && i <= im.nu - 1;
      const bool interior_v = im.periodic_v || (j >= 1 && j <= im.nv - 1);
      if (interior_u && interior_v) {
        SurfaceNode node = fundamental_forms(im, i, j);
        require(!node.degenerate, "assemble_stability: degenerate chart node");
        A.q[id] = node.q;
      }
    }
  }
  // boundary nodes of a Neumann rectangle: copy the potential inward
  if (!sphere && !im.dirichlet) {
    for (int i = 0; i <= im.nu; ++i) {
      const int j_hi = im.periodic_v ? im.nv - 1 : im.nv;
      for (int j = 0; j <= j_hi; ++j) {
        const int ii = std::clamp(i, 1, im.nu - 1);
        const int jj = im.periodic_v ? j : std::clamp(j, 1, im.nv - 1);
        if (ii != i || jj != j) A.q[A.vid(i, j)] = A.q[A.vid(ii, jj)];
      }
    }
  }
  if (sphere) {
    // even extrapolation of q to the poles: q_pole = (4 <row1> - <row2>)/3
    auto rowmean = [&](int i) {
      double s = 0;
      for (int j = 0; j < im.nv; ++j) s += A.q[A.vid(i, j)];
      return s / im.nv;
    };
    A.q[A.north] = (4 * rowmean(1) - rowmean(2)) / 3.0;
    A.q[A.south] = (4 * rowmean(im.nu - 1) - rowmean(im.nu - 2)) / 3.0;
    A.pos[A.north] = im.at(0, 0);
    A.pos[A.south] = im.at(im.nu, 0);
  }

  // P1 elements: split each parameter cell into two triangles; for cells at
  // a pole the degenerate edge collapses and the cell contributes one
  // triangle with the pole vertex.
  auto add_triangle = [&](const std::array<int, 3>& ids, const std::array<Vec2, 3>& uv) {
    if (ids[0] < 0 && ids[1] < 0 && ids[2] < 0) return;
    const Vec2 centroid = (uv[0] + uv[1] + uv[2]) / 3.0;
    const Mat2 I = detail::first_form_at(im, centroid[0], centroid[1]);
    const double detI = I.determinant();
    if (detI <= 0) return;
    // parameter gradients of the barycentric functions
    Mat2 E;
    E.col(0) = uv[1] - uv[0];
    E.col(1) = uv[2] - uv[0];
    const double par_area2 = E.determinant();
    if (std::abs(par_area2) < 1e-30) return;
    Mat2 Einv = E.inverse();
    // grad λ_1 = Einv row 0, grad λ_2 = Einv row 1, grad λ_0 = -(sum)
    Vec2 gl[3];
    gl[1] = Einv.row(0);
    gl[2] = Einv.row(1);
    gl[0] = -gl[1] - gl[2];
    const double area = 0.5 * std::abs(par_area2) * std::sqrt(detI);
    const Mat2 Iinv = I.inverse();
    for (int a = 0; a < 3; ++a) {
      if (ids[a] < 0) continue;
      A.mass[ids[a]] += area / 3.0;
      for (int b = 0; b < 3; ++b) {
        if (ids[b] < 0) continue;
        trips.emplace_back(ids[a], ids[b], area * gl[a].dot(Iinv * gl[b]));
      }
    }
  };

  for (int i = 0; i < im.nu; ++i) {
    for (int jc = 0; jc < im.nv; ++jc) {
      const int j2 = jc + 1;
      const double ua = im.unode(i), ub = im.unode(i + 1);
      const double va = im.v0 + jc * im.dv(), vb = im.v0 + j2 * im.dv();
      const int i00 = A.vid(i, jc), i10 = A.vid(i + 1, jc);
      const int i01 = A.vid(i, j2), i11 = A.vid(i + 1, j2);
      if (sphere && i == 0) {
        add_triangle({i00, i10, i11}, {Vec2(ua, 0.5 * (va + vb)), Vec2(ub, va), Vec2(ub, vb)});
      } else if (sphere && i == im.nu - 1) {
        add_triangle({i00, i10, i01}, {Vec2(ua, va), Vec2(ub, 0.5 * (va + vb)), Vec2(ua, vb)});
      } else {
        add_triangle({i00, i10, i11}, {Vec2(ua, va), Vec2(ub, va), Vec2(ub, vb)});
        add_triangle({i00, i11, i01}, {Vec2(ua, va), Vec2(ub, vb), Vec2(ua, vb)});
      }
    }
  }

  if (sphere) {
    // resolution guard: a healthy pole fan carries a comparable share of mass
    const double mean_mass = A.mass.sum() / A.n;
    if (A.mass[A.north] < 1e-10 * mean_mass || A.mass[A.south] < 1e-10 * mean_mass)
      A.pole_resolution_warning = true;
  }
  A.S.resize(A.n, A.n);
  A.S.setFromTriplets(trips.begin(), trips.end());
  // symmetry guard against assembly bugs
  Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(A.S.transpose()) - A.S;
  double asym = 0;
  for (int c = 0; c < diff.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, c); it; ++it)
      asym = std::max(asym, std::abs(it.value()));
  require(asym < 1e-10, "assemble_stability: non-symmetric stiffness");
  return A;
}

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending, eigenvalues of -L
  int index = 0;                    // count of eigenvalues < -nullity_tol
  int nullity = 0;                  // count of |eigenvalue| <= nullity_tol
  double nullity_tol = 0.05;
};

namespace detail {

/// Lowest k eigenvalues of the symmetric pencil (S - Q, M) via shift-invert
/// subspace iteration with Rayleigh-Ritz (handles multiple eigenvalues).
inline std::vector<double> lowest_eigenvalues(const StabilityAssembly& A, int k) {
  const int n = A.n;
  require(k >= 1 && k < n, "spectrum: invalid eigenvalue count");
  const Eigen::VectorXd dinv_sqrt = A.mass.cwiseSqrt().cwiseInverse();
  Eigen::SparseMatrix<double> B = A.S;
  // B = D^{-1/2} (S - diag(q m)) D^{-1/2}
  for (int c = 0; c < B.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, c); it; ++it)
      it.valueRef() *= dinv_sqrt[it.row()] * dinv_sqrt[it.col()];
  Eigen::SparseMatrix<double> Q(n, n);
  std::vector<Eigen::Triplet<double>> qt;
  qt.reserve(n);
  for (int i = 0; i < n; ++i) qt.emplace_back(i, i, A.q[i]);
  Q.setFromTriplets(qt.begin(), qt.end());
  B -= Q;

  const double sigma0 = -std::max(0.0, A.q.maxCoeff()) - 1.0;
  Eigen::SparseMatrix<double> shifted = B;
  Eigen::SparseMatrix<double> Id(n, n);
  Id.setIdentity();
  shifted -= sigma0 * Id;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  require(solver.info() == Eigen::Success, "spectrum: factorization failed");

  const int m = std::min(n, std::max(2 * k, k + 8));
  Eigen::MatrixXd X(n, m);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < n; ++r) X(r, c) = std::sin(0.7 * (r + 1) * (c + 1) + 0.37 * (c + 1));
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(m, 1e30);
  Eigen::VectorXd ritz(m);
  Eigen::MatrixXd V;
  for (int iter = 0; iter < 80; ++iter) {
    const Eigen::MatrixXd Y = solver.solve(X);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    const Eigen::MatrixXd Qm = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    const Eigen::MatrixXd T = Qm.transpose() * (B * Qm);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
    ritz = es.eigenvalues();
    V = Qm * es.eigenvectors();
    X = V;
    if ((ritz.head(k) - prev.head(k)).cwiseAbs().maxCoeff() < 1e-11) break;
    prev = ritz;
  }
  std::vector<double> out(ritz.data(), ritz.data() + k);
  return out;
}

}  // namespace detail

/// Lowest k eigenvalues of -L (L = Δ + |σ|² + Ric(N)) for a closed sphere
/// parametrization or a Dirichlet rectangle patch.  Index = count below
/// -nullity_tol, nullity = count within nullity_tol of zero.
inline SpectrumResult stability_spectrum(const Immersion& im, int k, double nullity_tol = 0.05) {
  require(im.domain == Immersion::Domain::Sphere || im.dirichlet,
          "stability_spectrum: need a closed sphere parametrization or a Dirichlet patch");
  const StabilityAssembly A = assemble_stability(im);
  SpectrumResult r;
  r.nullity_tol = nullity_tol;
  r.eigenvalues = detail::lowest_eigenvalues(A, k);
  for (double ev : r.eigenvalues) {
    if (ev < -nullity_tol) ++r.index;
    if (std::abs(ev) <= nullity_tol) ++r.nullity;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Jacobi functions u = <N, K>
// ---------------------------------------------------------------------------

/// Nodal field u = <N, K> on the vertex set of the assembly (poles by even
/// extrapolation), for a Killing field callback on chart coordinates.
template <typename Field>
Eigen::VectorXd jacobi_function(const Immersion& im, const StabilityAssembly& A, Field&& K) {
  // validate K is Killing at a few spread-out interior nodes
  for (int t = 0; t < 10; ++t) {
    const int i = 1 + ((t * 37) % std::max(1, im.nu - 1));
    const int j = (t * 59) % im.nv;
    const Vec3 p = im.at(std::min(i, im.nu - 1), j);
    require(killing_residual_chart(im.ambient, K, p) < 1e-4,
            "jacobi_function: field is not Killing");
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(A.n);
  const bool sphere = im.domain == Immersion::Domain::Sphere;
  for (int i = sphere ? 1 : 0; i <= (sphere ? im.nu - 1 : im.nu); ++i) {
    for (int j = 0; j <= (im.periodic_v ? im.nv - 1 : im.nv); ++j) {
      const int id = A.vid(i, j);
      if (id < 0) continue;
      const int ii = std::clamp(i, 1, im.nu - 1);
      const int jj = im.periodic_v ? j : std::clamp(j, 1, im.nv - 1);
      SurfaceNode node = fundamental_forms(im, ii, jj);
      const Mat3 g = im.ambient.metric(node.pos);
      u[id] = node.N.dot(g * K(node.pos));
    }
  }
  if (sphere) {
    auto rowmean = [&](int i) {
      double s = 0;
      for (int j = 0; j < im.nv; ++j) s += u[A.vid(i, j)];
      return s / im.nv;
    };
    u[A.north] = (4 * rowmean(1) - rowmean(2)) / 3.0;
    u[A.south] = (4 * rowmean(im.nu - 1) - rowmean(im.nu - 2)) / 3.0;
  }
  return u;
}

/// Max nodal residual |L u| over interior vertices whose element stencil is
/// regular: pole vertices and their first ring are excluded (the collapsed
/// fan there is not nodewise consistent, though the spectrum is unaffected),
/// as are vertices adjacent to a rectangle boundary.
inline double jacobi_residual_max(const StabilityAssembly& A, const Eigen::VectorXd& u) {
  const Eigen::VectorXd r = A.apply_L(u);
  double worst = 0;
  const bool sphere = A.domain == Immersion::Domain::Sphere;
  const int i_lo = sphere ? 2 : 2, i_hi = sphere ? A.nu - 2 : A.nu - 2;
  for (int i = i_lo; i <= i_hi; ++i) {
    const int j_lo = A.periodic_v || sphere ? 0 : 2;
    const int j_hi = A.periodic_v || sphere ? A.nv - 1 : A.nv - 2;
    for (int j = j_lo; j <= j_hi; ++j) {
      const int id = A.vid(i, j);
      if (id < 0) continue;
      worst = std::max(worst, std::abs(r[id]));
    }
  }
  return worst;
}

}  // namespace homog3
