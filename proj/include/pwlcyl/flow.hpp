#pragma once

// Closed-form flows of a canonical piece
//
//   x' = a x + b z + m,   y' = c y + d z + e,   z' = y
//
// and the half-return maps and affine x-maps they induce on Sigma = {z = 0}.
// The upper canonical piece has (m, e) = (0, -1), the lower one e = +1.

#include "pwlcyl/model.hpp"
#include "pwlcyl/spectral.hpp"

#include <string>

namespace pwlcyl {

struct PieceParams {
  double a = 0, b = 0, c = 0, d = 0, m = 0, e = -1;
};

PieceParams upper_piece(const CanonicalParams& p);
PieceParams lower_piece(const CanonicalParams& p);

/// Focus-form pieces in coordinates (x, Y, z) with Y = -y + T z, so that on
/// Sigma Y = -y and the piece reads like a canonical one with
/// (c, d, e) = (T, -D, -a_i).
PieceParams focus_upper_piece(const FocusCanonicalParams& f);
PieceParams focus_lower_piece(const FocusCanonicalParams& f);

struct FlowOptions {
  double eps_disc = kDefaultEpsDisc;
  /// Explicit horizon for return searches; 0 selects t_max_factor times the
  /// slowest (y, z) time scale.
  double t_max = 0;
  double t_max_factor = 1e3;
};

struct HalfReturn {
  double tau = 0;
  double y_exit = 0;
  bool defined = false;
  std::string diagnostic;
};

/// x_exit = scale * x_entry + offset.
struct AffineXMap {
  double scale = 1;
  double offset = 0;
};

class PieceFlow {
 public:
  explicit PieceFlow(const PieceParams& p, const FlowOptions& opts = {});

  const PieceParams& params() const { return p_; }
  const SpectralData& spectral() const { return sd_; }
  double t_max() const { return t_max_; }

  /// State at time t of the orbit through p (any t, any p).
  Vec3 operator()(double t, const Vec3& p) const;

  /// (y, z) at time t from (y0, z0).
  std::pair<double, double> yz(double t, double y0, double z0) const;
  /// x at time t from (x0, y0, z0).
  double x(double t, double x0, double y0, double z0) const;

  /// First return to Sigma of the orbit leaving (., y0, 0). The orbit stays
  /// on the side sgn(y0) until then.
  HalfReturn half_return(double y0) const;

  /// Map x on {y = y0} to x on {y = y_exit} for a defined return.
  AffineXMap x_map(double y0, const HalfReturn& h) const;

 private:
  struct Modes {
    // z-solution with (z, z') = (0, 1), its derivative, the one with (1, 0),
    // and the integral of the first.
    double phi, dphi, psi, Phi;
  };
  Modes modes(double t) const;
  Vec3 taylor(double t, const Vec3& p) const;
  bool use_taylor(double t) const;
  double x_integral(double t, double y0, double z0) const;

  PieceParams p_;
  SpectralData sd_;
  double t_max_ = 0;
  double rho_ = 1;     // norm bound used for the small-t branch
  double chi_ = 0;     // a^2 - a c - d
  bool resonant_ = false;
};

Vec3 flow_upper(const CanonicalParams& p, double t, const Vec3& x0);
Vec3 flow_lower(const CanonicalParams& p, double t, const Vec3& x0);

HalfReturn half_map_upper(const CanonicalParams& p, double y0, const FlowOptions& opts = {});
HalfReturn half_map_lower(const CanonicalParams& p, double y1, const FlowOptions& opts = {});

/// x1 = rho x0 + B for the upper half map started at y0.
AffineXMap x_affine_upper(const CanonicalParams& p, double y0, const HalfReturn& h);
/// x1 = x0 / xi + C, where the lower half map takes (x1, y1) to (x0, y0').
AffineXMap x_affine_lower(const CanonicalParams& p, double y1, const HalfReturn& h);

struct ParamPoint {
  double v = 0, w = 0;
  double y0 = 0, y1 = 0;
  double tau = 0;
};

/// Entry/exit of the half map of `piece` as a function of the type-specific
/// parameter v: (0, 1) for Sa, and for No, Nd, Fo, D1 when c < 0; cos(alpha tau)
/// for Ce; tau itself for D2. Works for either sign of e by the mirror
/// (y, z) -> (-y, -z). Throws TheoryNotApplicable when the clause divisor
/// vanishes or v does not give a positive time.
ParamPoint parametrized_halfmap(const PieceParams& piece, double v,
                                double eps_disc = kDefaultEpsDisc);

/// E_n(l, t) = (e^{l t} - sum_{k<n} (l t)^k / k!) / l^n, stable for small l t.
double exp_remainder(int n, double l, double t);

}  // namespace pwlcyl
