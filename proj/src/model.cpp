#include "pwlcyl/model.hpp"

#include "pwlcyl/errors.hpp"

#include <cmath>
#include <sstream>

namespace pwlcyl {

namespace {

constexpr double kZeroTol = 1e-12;

AffinePiece quasinormal_piece(const QuasinormalPiece& q, double z_row_y) {
  AffinePiece p;
  p.A << q.a11, q.a12, q.a13,
         q.a21, q.a22, q.a23,
         0.0, z_row_y, q.a33;
  p.b << q.b1, q.b2, 0.0;
  return p;
}

// |value - expected| <= tol * (1 + scale)
bool near(double value, double expected, double tol, double scale) {
  return std::abs(value - expected) <= tol * (1.0 + scale);
}

void expect_entry(double value, double expected, double tol, double scale, const char* what) {
  if (!near(value, expected, tol, scale)) {
    std::ostringstream os;
    os.precision(17);
    os << "coordinate change did not produce the target form: " << what << " = " << value
       << ", expected " << expected;
    throw NumericFailure(os.str());
  }
}

void require_fold_line(const QuasinormalPiece& p, const char* name) {
  if (std::abs(p.a21) > kZeroTol) {
    throw TheoryNotApplicable(std::string("a21") + name +
                              " != 0: the tangency line carries a cusp or singular point, "
                              "not a line of folds");
  }
}

}  // namespace

PiecewiseSystem QuasinormalParams::to_system() const {
  const double sy = z_row == ZRow::PlusY ? 1.0 : -1.0;
  return {quasinormal_piece(upper, sy), quasinormal_piece(lower, sy)};
}

PiecewiseSystem CanonicalParams::to_system() const {
  PiecewiseSystem sys;
  sys.upper.A << a_plus, 0.0, b_plus,
                 0.0, c_plus, d_plus,
                 0.0, 1.0, 0.0;
  sys.upper.b << 0.0, -1.0, 0.0;
  sys.lower.A << a_minus, 0.0, b_minus,
                 0.0, c_minus, d_minus,
                 0.0, 1.0, 0.0;
  sys.lower.b << m, 1.0, 0.0;
  return sys;
}

void FocusCanonicalParams::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  for (double v : {a_plus, b_plus, a_minus, b_minus, m, D1, D2, T1, T2, a1, a2}) {
    if (!finite(v)) throw InvalidInput("focus parameters must be finite");
  }
  if (!(a2 > 0.0)) throw TheoryNotApplicable("focus form requires a2 > 0 (invisible upper fold)");
  if (!(a1 < 0.0)) throw TheoryNotApplicable("focus form requires a1 < 0 (invisible lower fold)");
  if (std::abs(T1) <= kZeroTol || std::abs(T2) <= kZeroTol) {
    throw TheoryNotApplicable("center piece (T = 0); use the canonical (non-focus) path");
  }
  if (!(T1 * T1 - 4.0 * D1 < 0.0)) throw TheoryNotApplicable("focus form requires T1^2 - 4 D1 < 0");
  if (!(T2 * T2 - 4.0 * D2 < 0.0)) throw TheoryNotApplicable("focus form requires T2^2 - 4 D2 < 0");
}

PiecewiseSystem FocusCanonicalParams::to_system() const {
  PiecewiseSystem sys;
  sys.upper.A << a_plus, 0.0, b_plus,
                 0.0, 0.0, D2,
                 0.0, -1.0, T2;
  sys.upper.b << 0.0, a2, 0.0;
  sys.lower.A << a_minus, 0.0, b_minus,
                 0.0, 0.0, D1,
                 0.0, -1.0, T1;
  sys.lower.b << m, a1, 0.0;
  return sys;
}

std::string_view to_string(TangencyKind k) {
  switch (k) {
    case TangencyKind::VisibleFold: return "all-visible-fold";
    case TangencyKind::InvisibleFold: return "all-invisible-fold";
    case TangencyKind::InvariantLine: return "invariant-line";
    case TangencyKind::Cusp: return "cusp";
    case TangencyKind::Singular: return "singular";
  }
  return "?";
}

TangencyLines tangency_lines(const PiecewiseSystem& sys, double tol) {
  const auto line_of = [&](const AffinePiece& p, const char* name) {
    const double cx = p.A(2, 0), cy = p.A(2, 1);
    if (std::hypot(cx, cy) <= tol) {
      throw TheoryNotApplicable(std::string("empty tangency line for piece ") + name +
                                ": (a31, a32) = (0, 0)");
    }
    return SigmaLine{cx, cy, p.b(2)};
  };
  TangencyLines out;
  out.upper = line_of(sys.upper, "X+");
  out.lower = line_of(sys.lower, "X-");
  const Vec3 u(out.upper.cx, out.upper.cy, out.upper.c0);
  const Vec3 v(out.lower.cx, out.lower.cy, out.lower.c0);
  out.coincident = u.cross(v).norm() <= tol * u.norm() * v.norm();
  return out;
}

TangencyReport classify_tangency(const QuasinormalParams& q, Side piece) {
  const QuasinormalPiece& p = piece == Side::Upper ? q.upper : q.lower;
  // On L = {y = z = 0}: X^2 h = sy * (a21 x + b2). The fold is visible when
  // sgn(+-X^2 h) > 0, with + for the upper piece and - for the lower one.
  const double sy = q.z_row == ZRow::PlusY ? 1.0 : -1.0;
  const double side_sign = piece == Side::Upper ? 1.0 : -1.0;

  TangencyReport r;
  r.line = SigmaLine{0.0, sy, 0.0};
  if (p.a21 == 0.0) {
    const double s = sy * side_sign * p.b2;
    if (s > 0.0) {
      r.kind = TangencyKind::VisibleFold;
    } else if (s < 0.0) {
      r.kind = TangencyKind::InvisibleFold;
    } else {
      r.kind = TangencyKind::InvariantLine;
    }
    return r;
  }
  r.x_star = -p.b2 / p.a21;
  const double det = p.a21 * p.b1 - p.a11 * p.b2;
  const double det_scale = std::abs(p.a21 * p.b1) + std::abs(p.a11 * p.b2);
  r.kind = std::abs(det) > 1e-12 * det_scale ? TangencyKind::Cusp : TangencyKind::Singular;
  return r;
}

QuasinormalParams reduce_to_quasinormal(const PiecewiseSystem& sys) {
  if (!sys.upper.is_finite() || !sys.lower.is_finite()) {
    throw InvalidInput("system coefficients must be finite");
  }
  const TangencyLines lines = tangency_lines(sys);
  if (!lines.coincident) {
    throw TheoryNotApplicable(
        "tangency lines of X+ and X- differ; a common tangency line is required "
        "(X+h X-h >= 0 on Sigma)");
  }
  const Vec3 u(lines.upper.cx, lines.upper.cy, lines.upper.c0);
  const Vec3 v(lines.lower.cx, lines.lower.cy, lines.lower.c0);
  const double k = v.dot(u) / u.squaredNorm();
  if (!(k > 0.0)) {
    throw TheoryNotApplicable(
        "normal speeds of X+ and X- have opposite signs on Sigma: no sewing region");
  }

  // (x, y, z) -> (xh, yh, z) with yh = a31 x + a32 y + b3 and xh orthogonal.
  const double al = u(0), be = u(1), ga = u(2);
  const double n2 = al * al + be * be;
  Mat3 M;
  M << -be / n2, al / n2, 0.0,
       al, be, 0.0,
       0.0, 0.0, 1.0;
  const Vec3 shift(0.0, ga, 0.0);
  const Mat3 Minv = M.inverse();

  const auto transform = [&](const AffinePiece& p, double time_factor) {
    AffinePiece out;
    out.A = M * p.A * Minv / time_factor;
    out.b = (M * p.b - M * p.A * Minv * shift) / time_factor;
    return out;
  };
  const AffinePiece up = transform(sys.upper, 1.0);
  const AffinePiece lo = transform(sys.lower, k);

  const auto read = [](const AffinePiece& p, const char* name) {
    const double scale = p.A.cwiseAbs().maxCoeff() + p.b.cwiseAbs().maxCoeff();
    const double tol = 1e-10;
    if (!near(p.A(2, 0), 0.0, tol, scale) || !near(p.A(2, 1), 1.0, tol, scale) ||
        !near(p.b(2), 0.0, tol, scale)) {
      throw NumericFailure(std::string("quasinormal reduction failed for piece ") + name);
    }
    QuasinormalPiece q;
    q.a11 = p.A(0, 0); q.a12 = p.A(0, 1); q.a13 = p.A(0, 2);
    q.a21 = p.A(1, 0); q.a22 = p.A(1, 1); q.a23 = p.A(1, 2);
    q.a33 = p.A(2, 2);
    q.b1 = p.b(0); q.b2 = p.b(1);
    return q;
  };
  QuasinormalParams q;
  q.upper = read(up, "X+");
  q.lower = read(lo, "X-");
  q.z_row = ZRow::PlusY;
  return q;
}

AffinePiece push_forward(const AffinePiece& piece, const Mat3& M, double time_factor) {
  AffinePiece out;
  out.A = M * piece.A * M.inverse() / time_factor;
  out.b = M * piece.b / time_factor;
  return out;
}

TwinChange canonical_twin_change(const QuasinormalParams& q) {
  const QuasinormalPiece& u = q.upper;
  const QuasinormalPiece& l = q.lower;
  const double r = u.b1 / u.b2;
  const double k_up = (u.b1 * u.a11 - u.b1 * u.a22 + u.a12 * u.b2) / u.b2;
  const double k_lo = (u.b2 * l.a12 - u.b1 * l.a22 + u.b1 * l.a11) / u.b2;
  TwinChange t;
  t.upper << 1.0, -r, -k_up,
             0.0, 1.0, u.a33,
             0.0, 0.0, -u.b2;
  t.lower << 1.0, -r, -k_lo,
             0.0, 1.0, l.a33,
             0.0, 0.0, l.b2;
  t.upper_time_factor = -u.b2;
  t.lower_time_factor = l.b2;
  return t;
}

TwinChange focus_twin_change(const QuasinormalParams& q) {
  const QuasinormalPiece& u = q.upper;
  const QuasinormalPiece& l = q.lower;
  const double r = u.b1 / u.b2;
  const double k_up = (u.b1 * u.a11 - u.b1 * u.a22 + u.a12 * u.b2) / u.b2;
  const double k_lo = (u.b2 * l.a12 - u.b1 * l.a22 + u.b1 * l.a11) / u.b2;
  TwinChange t;
  t.upper << 1.0, -r, k_up,
             0.0, 1.0, u.a22,
             0.0, 0.0, 1.0;
  t.lower << 1.0, -r, k_lo,
             0.0, 1.0, l.a22,
             0.0, 0.0, 1.0;
  return t;
}

CanonicalParams canonicalize(const QuasinormalParams& q, double tol) {
  if (q.z_row != ZRow::PlusY) {
    throw TheoryNotApplicable("canonical form needs the third row (0, 1, a33); use the focus path");
  }
  require_fold_line(q.upper, "+");
  require_fold_line(q.lower, "-");
  if (q.upper.b2 == 0.0 || q.lower.b2 == 0.0) {
    throw TheoryNotApplicable("tangency line invariant, not a fold (b2 = 0)");
  }
  if (q.upper.b2 > 0.0) {
    throw TheoryNotApplicable("upper fold is visible (b2+ > 0); invisible folds need b2+ < 0");
  }
  if (q.lower.b2 < 0.0) {
    throw TheoryNotApplicable("lower fold is visible (b2- < 0); invisible folds need b2- > 0");
  }

  const PiecewiseSystem sys = q.to_system();
  const TwinChange t = canonical_twin_change(q);
  const AffinePiece up = push_forward(sys.upper, t.upper, t.upper_time_factor);
  const AffinePiece lo = push_forward(sys.lower, t.lower, t.lower_time_factor);

  for (const auto* p : {&up, &lo}) {
    const bool is_up = p == &up;
    const double scale = p->A.cwiseAbs().maxCoeff() + p->b.cwiseAbs().maxCoeff();
    expect_entry(p->A(0, 1), 0.0, tol, scale, "x-row y coefficient");
    expect_entry(p->A(1, 0), 0.0, tol, scale, "y-row x coefficient");
    expect_entry(p->A(2, 0), 0.0, tol, scale, "z-row x coefficient");
    expect_entry(p->A(2, 1), 1.0, tol, scale, "z-row y coefficient");
    expect_entry(p->A(2, 2), 0.0, tol, scale, "z-row z coefficient");
    expect_entry(p->b(1), is_up ? -1.0 : 1.0, tol, scale, "y-row constant");
    expect_entry(p->b(2), 0.0, tol, scale, "z-row constant");
    if (is_up) expect_entry(p->b(0), 0.0, tol, scale, "upper x-row constant");
  }

  CanonicalParams c;
  c.a_plus = up.A(0, 0);
  c.b_plus = up.A(0, 2);
  c.c_plus = up.A(1, 1);
  c.d_plus = up.A(1, 2);
  c.a_minus = lo.A(0, 0);
  c.b_minus = lo.A(0, 2);
  c.c_minus = lo.A(1, 1);
  c.d_minus = lo.A(1, 2);
  c.m = lo.b(0);
  return c;
}

FocusCanonicalParams canonicalize_focus(const QuasinormalParams& q, double tol) {
  if (q.z_row != ZRow::MinusY) {
    throw TheoryNotApplicable("focus form needs the third row (0, -1, a33)");
  }
  require_fold_line(q.upper, "+");
  require_fold_line(q.lower, "-");
  if (q.upper.b2 == 0.0 || q.lower.b2 == 0.0) {
    throw TheoryNotApplicable("tangency line invariant, not a fold (b2 = 0)");
  }
  if (q.upper.b2 < 0.0) {
    throw TheoryNotApplicable("upper fold is visible; the focus form needs b2+ > 0");
  }
  if (q.lower.b2 > 0.0) {
    throw TheoryNotApplicable("lower fold is visible; the focus form needs b2- < 0");
  }

  const PiecewiseSystem sys = q.to_system();
  const TwinChange t = focus_twin_change(q);
  const AffinePiece up = push_forward(sys.upper, t.upper, 1.0);
  const AffinePiece lo = push_forward(sys.lower, t.lower, 1.0);

  for (const auto* p : {&up, &lo}) {
    const bool is_up = p == &up;
    const double scale = p->A.cwiseAbs().maxCoeff() + p->b.cwiseAbs().maxCoeff();
    expect_entry(p->A(0, 1), 0.0, tol, scale, "x-row y coefficient");
    expect_entry(p->A(1, 0), 0.0, tol, scale, "y-row x coefficient");
    expect_entry(p->A(1, 1), 0.0, tol, scale, "y-row y coefficient");
    expect_entry(p->A(2, 0), 0.0, tol, scale, "z-row x coefficient");
    expect_entry(p->A(2, 1), -1.0, tol, scale, "z-row y coefficient");
    expect_entry(p->b(2), 0.0, tol, scale, "z-row constant");
    if (is_up) expect_entry(p->b(0), 0.0, tol, scale, "upper x-row constant");
  }

  FocusCanonicalParams f;
  f.a_plus = up.A(0, 0);
  f.b_plus = up.A(0, 2);
  f.D2 = up.A(1, 2);
  f.a2 = up.b(1);
  f.T2 = up.A(2, 2);
  f.a_minus = lo.A(0, 0);
  f.b_minus = lo.A(0, 2);
  f.m = lo.b(0);
  f.D1 = lo.A(1, 2);
  f.a1 = lo.b(1);
  f.T1 = lo.A(2, 2);
  f.validate();
  return f;
}

}  // namespace pwlcyl
