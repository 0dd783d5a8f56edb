#pragma once

// Reference computations used only by the tests. They share no code with the
// library's closed-form flows or its integrator.

#include "pwlcyl/model.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <optional>
#include <random>

namespace testoracle {

using pwlcyl::AffinePiece;
using pwlcyl::Vec3;

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

inline Mat4 augmented(const AffinePiece& P) {
  Mat4 M = Mat4::Zero();
  M.topLeftCorner<3, 3>() = P.A;
  M.topRightCorner<3, 1>() = P.b;
  return M;
}

/// Flow of x' = A x + b by the exponential of the augmented 4x4 matrix.
inline Vec3 expm_flow(const AffinePiece& P, double t, const Vec3& p) {
  const Mat4 E = (augmented(P) * t).exp();
  Vec4 q;
  q << p, 1.0;
  return (E * q).head<3>();
}

struct BruteReturn {
  bool ok = false;
  double tau = 0;
  Vec3 exit = Vec3::Zero();
};

/// First time z changes sign along the exp-flow from p0 (on Sigma), found by
/// fixed stepping and bisection. `side` is +1 when the orbit enters z > 0.
inline BruteReturn brute_return(const AffinePiece& P, const Vec3& p0, double side, double t_max,
                                double dt = 2e-3) {
  const Mat4 E = (augmented(P) * dt).exp();
  Vec4 q;
  q << p0, 1.0;
  double t = 0;
  BruteReturn r;
  while (t < t_max) {
    const Vec4 next = E * q;
    if (t > 0 && side * next(2) <= 0.0) {
      double lo = 0, hi = dt;
      const Vec3 base = q.head<3>();
      for (int i = 0; i < 200 && hi - lo > 1e-16 * (1 + t); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (side * expm_flow(P, mid, base)(2) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      const double h = 0.5 * (lo + hi);
      r.ok = true;
      r.tau = t + h;
      r.exit = expm_flow(P, r.tau, p0);
      return r;
    }
    if (t == 0 && side * next(2) <= 0.0) return r;  // does not enter the half space
    q = next;
    t += dt;
    if (!q.allFinite() || q.norm() > 1e12) return r;
  }
  return r;
}

/// Lie derivatives of h = z along a piece.
inline double lie1(const AffinePiece& P, const Vec3& p) { return P.A.row(2).dot(p) + P.b(2); }
inline double lie2(const AffinePiece& P, const Vec3& p) { return P.A.row(2).dot(P.A * p + P.b); }

/// Kind of the tangency line {y = z = 0} from X^2 h sampled along it.
inline pwlcyl::TangencyKind tangency_by_lie(const pwlcyl::PiecewiseSystem& sys, pwlcyl::Side side) {
  const AffinePiece& P = sys.piece(side);
  const double flip = side == pwlcyl::Side::Upper ? 1.0 : -1.0;
  double lo = 1e300, hi = -1e300;
  for (int i = -40; i <= 40; ++i) {
    const double v = flip * lie2(P, Vec3(0.25 * i, 0, 0));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (std::abs(lo) < 1e-12 && std::abs(hi) < 1e-12) return pwlcyl::TangencyKind::InvariantLine;
  if (lo > 0) return pwlcyl::TangencyKind::VisibleFold;
  if (hi < 0) return pwlcyl::TangencyKind::InvisibleFold;
  // Zero of the affine map x -> X^2 h(x, 0, 0).
  const double f0 = lie2(P, Vec3(0, 0, 0));
  const double f1 = lie2(P, Vec3(1, 0, 0));
  const double xs = -f0 / (f1 - f0);
  const Vec3 field = P.field(Vec3(xs, 0, 0));
  return field.norm() < 1e-10 ? pwlcyl::TangencyKind::Singular : pwlcyl::TangencyKind::Cusp;
}

/// Exponent (s - c)/(s + c) of a saddle piece, as minus the ratio of the
/// eigenvalues of [[c, d], [1, 0]].
inline double saddle_exponent(double c, double d) {
  Eigen::Matrix2d M;
  M << c, d, 1.0, 0.0;
  const Eigen::Vector2cd ev = M.eigenvalues();
  const double l1 = ev(0).real(), l2 = ev(1).real();
  const double pos = std::max(l1, l2), neg = std::min(l1, l2);
  return -neg / pos;
}

/// Invariants of the saddle-saddle row, transcribed separately from the
/// library table.
inline std::pair<double, double> saddle_saddle_kl(double al, double be, double cp, double cm) {
  const double kappa =
      al * al * (al * cm + be * cp - cp - cm) * (al * be * cm - be * cp - be * cm + cp);
  const double lambda =
      (al * be * cp - al * cp - al * cm + cm) * (al * be * cp + al * be * cm - al * cp - be * cm);
  return {kappa, lambda};
}

/// V and W of the cylinder curve for the saddle-saddle pair.
inline double V_of(double v, double w, double al, double be, double cp, double cm) {
  const double num = (al * al * cm + al * be * cp - al * cp - al * cm) * v * w +
                     (-al * al * cm + cm) * w - al * be * cp + al * cp + al * cm - cm;
  const double den = (al * be * cp - al * cp - al * cm + cm) * v * w + (al * al * cm - cm) * v -
                     al * al * cm - al * be * cp + al * cp + al * cm;
  return num / den;
}

inline double W_of(double v, double w, double al, double be, double cp, double cm) {
  const double num = (cm * be * (1 - al) + cp * al * (1 - be)) * v * w +
                     (al * al - 1) * cm * be * v + al * (cp * (be - 1) + cm * be * (1 - al));
  const double den = (cm * al * be * (al - 1) + cp * al * (1 - be)) * v * w +
                     (1 - al * al) * cm * be * w + al * cp * (be - 1) + cm * be * (al - 1);
  return num / den;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testoracle
