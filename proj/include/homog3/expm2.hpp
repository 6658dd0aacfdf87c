#pragma once

#include "homog3/core.hpp"

namespace homog3 {

/// Closed-form e^{zA} for a real 2x2 matrix A, split on the discriminant of
/// the trace-free part: A = s I + B with s = tr(A)/2 and B^2 = Δ I,
/// Δ = (tr A / 2)^2 - det A.  Then
///     e^{zA} = e^{sz} ( C(z^2 Δ) I + z S(z^2 Δ) B ),
/// where C(u) = cosh(sqrt u), S(u) = sinh(sqrt u)/sqrt u continued across
/// u <= 0 (rotation branch) and by Taylor series near u = 0 (nilpotent
/// branch, |Δ| < 1e-12), which keeps the evaluation continuous across
/// branch collisions.
inline Mat2 expm2(const Mat2& A, double z) {
  require(all_finite(A) && finite(z), "expm2: non-finite input");
  const double s = 0.5 * (A(0, 0) + A(1, 1));
  Mat2 B = A - s * Mat2::Identity();
  const double disc = s * s - A.determinant();  // B^2 = disc * I

  double C, S;
  if (std::abs(disc) < 1e-12) {
    // nilpotent branch, Taylor in u = z^2 Δ
    const double u = z * z * disc;
    C = 1.0 + u * (1.0 / 2.0 + u * (1.0 / 24.0 + u / 720.0));
    S = 1.0 + u * (1.0 / 6.0 + u * (1.0 / 120.0 + u / 5040.0));
  } else if (disc > 0) {
    const double r = std::sqrt(disc) * z;
    C = std::cosh(r);
    S = (r == 0.0) ? 1.0 : std::sinh(r) / r;
  } else {
    const double r = std::sqrt(-disc) * z;
    C = std::cos(r);
    S = (r == 0.0) ? 1.0 : std::sin(r) / r;
  }
  return std::exp(s * z) * (C * Mat2::Identity() + (z * S) * B);
}

/// phi1(zA) = ∫_0^1 e^{τ zA} dτ evaluated as a 5-term Taylor expansion;
/// only valid for small ||zA||.  Used by the 1-parameter-subgroup base step.
inline Mat2 phi1_small(const Mat2& A, double z) {
  Mat2 M = z * A;
  Mat2 M2 = M * M;
  return Mat2::Identity() + M / 2.0 + M2 / 6.0 + M2 * M / 24.0 + M2 * M2 / 120.0;
}

}  // namespace homog3
