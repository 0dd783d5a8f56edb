#pragma once

// Event-detecting numerical integrator for piecewise systems. Independent of
// the closed-form flow code; used to validate it.

#include "pwlcyl/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pwlcyl {

struct OracleOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  /// |y| below this at a crossing counts as hitting the tangency line.
  double eps_fold = 1e-9;
  /// Stop after this many crossings; 0 means no limit.
  int max_crossings = 0;
  double escape = 1e100;
  /// Largest step; 0 lets the integrator choose.
  double max_dt = 0;
};

enum class Termination { EndTime, Tangency, NoSewing, Escape, CrossingLimit, NumericFailure };

std::string_view to_string(Termination t);

struct OrbitPoint {
  double t = 0;
  Vec3 p = Vec3::Zero();
  Side piece = Side::Upper;
  bool crossing = false;
};

struct Crossing {
  double t = 0;
  double x = 0, y = 0;
  Side from = Side::Upper;
  Side to = Side::Lower;
  bool tangency = false;
};

struct OrbitTrace {
  std::vector<OrbitPoint> points;
  std::vector<Crossing> crossings;
  Termination termination = Termination::EndTime;
  std::string diagnostic;
};

OrbitTrace integrate(const PiecewiseSystem& sys, const Vec3& p0, double t_end,
                     const OracleOptions& opts = {});
OrbitTrace integrate(const CanonicalParams& p, const Vec3& p0, double t_end,
                     const OracleOptions& opts = {});
OrbitTrace integrate(const FocusCanonicalParams& p, const Vec3& p0, double t_end,
                     const OracleOptions& opts = {});

struct NumericReturn {
  double tau = 0;
  double x_exit = 0, y_exit = 0;
  bool defined = false;
  std::string diagnostic;
};

/// First return to Sigma of the orbit through the point (x0, y0, 0), which
/// must lie in the sewing region.
NumericReturn numeric_half_map(const PiecewiseSystem& sys, double x0, double y0, double t_max,
                               const OracleOptions& opts = {});
NumericReturn numeric_half_map(const CanonicalParams& p, double y0, double t_max,
                               const OracleOptions& opts = {});

/// Second return (one full turn through both pieces).
NumericReturn numeric_full_return(const PiecewiseSystem& sys, double x0, double y0, double t_max,
                                  const OracleOptions& opts = {});

/// d(x after one full turn)/dx at x0 on {y = y0}, by a central difference
/// with relative step 1e-6.
double numeric_multiplier(const PiecewiseSystem& sys, double x0, double y0, double t_max,
                          const OracleOptions& opts = {});

}  // namespace pwlcyl
