#pragma once

// Data model for two-zone piecewise linear systems in R^3 separated by the
// plane Sigma = {z = 0}, and the reductions that bring a raw system to the
// canonical form
//
//   X+ = (a+ x + b+ z,       c+ y + d+ z - 1, y)   on z > 0
//   X- = (a- x + b- z + m,   c- y + d- z + 1, y)   on z < 0
//
// or, for the focus-focus family, to
//
//   X+ = (a+ x + b+ z,       D2 z + a2, -y + T2 z)
//   X- = (a- x + b- z + m,   D1 z + a1, -y + T1 z).

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>

namespace pwlcyl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Side { Upper, Lower };

constexpr std::string_view to_string(Side s) { return s == Side::Upper ? "+" : "-"; }

/// One affine vector field x' = A x + b acting on a half space.
struct AffinePiece {
  Mat3 A = Mat3::Zero();
  Vec3 b = Vec3::Zero();

  Vec3 field(const Vec3& p) const { return A * p + b; }
  /// Lie derivative of h(x,y,z) = z along the field.
  double normal_speed(const Vec3& p) const { return A.row(2).dot(p) + b(2); }
  bool is_finite() const { return A.allFinite() && b.allFinite(); }
};

/// Z = (X+, X-): `upper` acts on z > 0, `lower` on z < 0.
struct PiecewiseSystem {
  AffinePiece upper;
  AffinePiece lower;

  const AffinePiece& piece(Side s) const { return s == Side::Upper ? upper : lower; }
};

/// Coefficients of one piece after the common tangency line has been moved to
/// {y = 0, z = 0}. The third row of the linear part is (0, +-1, a33).
struct QuasinormalPiece {
  double a11 = 0, a12 = 0, a13 = 0;
  double a21 = 0, a22 = 0, a23 = 0;
  double a33 = 0;
  double b1 = 0, b2 = 0;
};

/// Sign of y in the third row: +1 for the standard quasinormal form, -1 for
/// the variant that leads to the focus-focus canonical form.
enum class ZRow { PlusY, MinusY };

struct QuasinormalParams {
  QuasinormalPiece upper;
  QuasinormalPiece lower;
  ZRow z_row = ZRow::PlusY;

  PiecewiseSystem to_system() const;
};

struct CanonicalParams {
  double a_plus = 0, b_plus = 0, c_plus = 0, d_plus = 0;
  double a_minus = 0, b_minus = 0, c_minus = 0, d_minus = 0;
  double m = 0;

  PiecewiseSystem to_system() const;
};

struct FocusCanonicalParams {
  double a_plus = 0, b_plus = 0, a_minus = 0, b_minus = 0, m = 0;
  double D1 = 0, D2 = 0, T1 = 0, T2 = 0;
  double a1 = 0, a2 = 0;

  /// Throws TheoryNotApplicable unless a2 > 0, a1 < 0, Ti^2 - 4 Di < 0 and
  /// Ti != 0 for both pieces.
  void validate() const;
  PiecewiseSystem to_system() const;
};

/// The set {cx x + cy y + c0 = 0} inside Sigma.
struct SigmaLine {
  double cx = 0, cy = 0, c0 = 0;
};

struct TangencyLines {
  SigmaLine upper;
  SigmaLine lower;
  bool coincident = false;
};

/// Tangency lines L_{X+}, L_{X-} (zero sets of X+-h restricted to Sigma).
/// Throws TheoryNotApplicable("empty tangency line") if a piece has
/// (a31, a32) = (0, 0).
TangencyLines tangency_lines(const PiecewiseSystem& sys, double tol = 1e-12);

enum class TangencyKind { VisibleFold, InvisibleFold, InvariantLine, Cusp, Singular };

std::string_view to_string(TangencyKind k);

struct TangencyReport {
  SigmaLine line;  // always {y = 0} in quasinormal coordinates
  TangencyKind kind = TangencyKind::InvisibleFold;
  std::optional<double> x_star;  // location of the cusp or singular point
};

/// Character of the tangency line of one quasinormal piece. For the lower
/// piece the visible/invisible labels use sgn(-(X-)^2 h), i.e. they flip with
/// respect to the upper piece.
TangencyReport classify_tangency(const QuasinormalParams& q, Side piece);

/// Affine change of coordinates inside Sigma taking the common tangency line
/// to {y = 0}, followed by a time rescaling of the lower piece so both third
/// rows read (0, 1, a33). Rejects systems whose tangency lines differ or whose
/// normal speeds have opposite signs.
QuasinormalParams reduce_to_quasinormal(const PiecewiseSystem& sys);

/// Linear coordinate maps and time factors of a twin change of variables.
/// New coordinates are P = M p; new time s satisfies ds/dt = time_factor.
struct TwinChange {
  Mat3 upper = Mat3::Identity();
  Mat3 lower = Mat3::Identity();
  double upper_time_factor = 1;
  double lower_time_factor = 1;
};

/// The change of variables used by canonicalize(). Requires a21 = 0 and
/// b2+ != 0.
TwinChange canonical_twin_change(const QuasinormalParams& q);
/// The change of variables used by canonicalize_focus().
TwinChange focus_twin_change(const QuasinormalParams& q);

/// Push an affine piece forward through P = M p and ds/dt = time_factor.
AffinePiece push_forward(const AffinePiece& piece, const Mat3& M, double time_factor);

/// Bring an invisible double-fold quasinormal system to canonical form.
/// Throws TheoryNotApplicable naming the failed hypothesis.
CanonicalParams canonicalize(const QuasinormalParams& q, double tol = 1e-12);

/// Same for the focus-focus variant (q.z_row must be MinusY). The result is
/// validated against the focus-focus constraint set.
FocusCanonicalParams canonicalize_focus(const QuasinormalParams& q, double tol = 1e-12);

}  // namespace pwlcyl
