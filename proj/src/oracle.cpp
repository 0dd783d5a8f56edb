#include "pwlcyl/oracle.hpp"

#include "pwlcyl/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <limits>

namespace pwlcyl {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 3>;
using Stepper = odeint::runge_kutta_dopri5<State>;

struct Rhs {
  const AffinePiece* piece;
  void operator()(const State& s, State& ds, double /*t*/) const {
    const Mat3& A = piece->A;
    const Vec3& b = piece->b;
    for (int i = 0; i < 3; ++i) {
      ds[i] = A(i, 0) * s[0] + A(i, 1) * s[1] + A(i, 2) * s[2] + b(i);
    }
  }
};

Vec3 to_vec(const State& s) { return {s[0], s[1], s[2]}; }
State to_state(const Vec3& v) { return {v(0), v(1), v(2)}; }

Side other(Side s) { return s == Side::Upper ? Side::Lower : Side::Upper; }
double side_sign(Side s) { return s == Side::Upper ? 1.0 : -1.0; }

bool finite_and_bounded(const State& s, double escape) {
  for (double v : s) {
    if (!std::isfinite(v) || std::abs(v) > escape) return false;
  }
  return true;
}

/// One explicit dopri5 step of size dt from (t0, s0).
State fresh_step(const Rhs& rhs, const State& s0, double t0, double dt) {
  State s = s0;
  if (dt != 0.0) Stepper().do_step(rhs, s, t0, dt);
  return s;
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::EndTime: return "end-time";
    case Termination::Tangency: return "tangency";
    case Termination::NoSewing: return "no-sewing";
    case Termination::Escape: return "escape";
    case Termination::CrossingLimit: return "crossing-limit";
    case Termination::NumericFailure: return "numeric-failure";
  }
  return "?";
}

OrbitTrace integrate(const PiecewiseSystem& sys, const Vec3& p0, double t_end,
                     const OracleOptions& opts) {
  if (!p0.allFinite()) throw InvalidInput("initial point must be finite");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidInput("t_end must be finite and >= 0");
  if (!sys.upper.is_finite() || !sys.lower.is_finite()) throw InvalidInput("system must be finite");

  OrbitTrace trace;
  Side side = Side::Upper;
  if (p0(2) > 0.0) {
    side = Side::Upper;
  } else if (p0(2) < 0.0) {
    side = Side::Lower;
  } else {
    const double hu = sys.upper.normal_speed(p0), hl = sys.lower.normal_speed(p0);
    if (std::abs(hu) < opts.eps_fold || std::abs(hl) < opts.eps_fold) {
      trace.points.push_back({0.0, p0, Side::Upper, false});
      trace.termination = Termination::Tangency;
      trace.diagnostic = "initial point on the tangency line";
      return trace;
    }
    if (!(hu * hl > 0.0)) {
      trace.points.push_back({0.0, p0, Side::Upper, false});
      trace.termination = Termination::NoSewing;
      trace.diagnostic = "initial point on Sigma outside the sewing region";
      return trace;
    }
    side = hu > 0.0 ? Side::Upper : Side::Lower;
  }
  trace.points.push_back({0.0, p0, side, p0(2) == 0.0});
  if (t_end == 0.0) return trace;

  State state = to_state(p0);
  double t = 0.0;
  const double max_dt = opts.max_dt > 0.0 ? opts.max_dt : t_end;

  while (true) {
    const Rhs rhs{&sys.piece(side)};
    const double sgn = side_sign(side);
    auto dense = odeint::make_dense_output(opts.abs_tol, opts.rel_tol, max_dt, Stepper());
    const double scale = std::max(1.0, sys.piece(side).A.cwiseAbs().maxCoeff());
    dense.initialize(state, t, std::min(1e-3 / scale, t_end - t));

    bool switched = false;
    while (!switched) {
      std::pair<double, double> step;
      try {
        step = dense.do_step(rhs);
      } catch (const std::exception& e) {
        trace.termination = Termination::NumericFailure;
        trace.diagnostic = e.what();
        return trace;
      }
      const auto [t0, t1] = step;
      if (!(t1 > t0)) {
        trace.termination = Termination::NumericFailure;
        trace.diagnostic = "step size underflow";
        return trace;
      }
      const State s1 = dense.current_state();
      if (!finite_and_bounded(s1, opts.escape)) {
        trace.termination = Termination::Escape;
        trace.diagnostic = "orbit left every bounded region";
        return trace;
      }

      // First sub-interval where the orbit reaches the other side.
      const double t_stop = std::min(t1, t_end);
      constexpr int kSub = 16;
      State probe;
      dense.calc_state(t0, probe);
      double last_pos = sgn * probe[2] > 0.0 ? t0 : std::numeric_limits<double>::quiet_NaN();
      double lo = t0, hi = t0;
      bool found = false;
      for (int k = 1; k <= kSub && !found; ++k) {
        const double tk = t0 + (t_stop - t0) * k / kSub;
        dense.calc_state(tk, probe);
        if (sgn * probe[2] > 0.0) {
          last_pos = tk;
        } else if (!std::isnan(last_pos)) {
          lo = last_pos;
          hi = tk;
          found = true;
        }
      }

      if (!found) {
        if (t1 >= t_end) {
          State s_end;
          dense.calc_state(t_end, s_end);
          trace.points.push_back({t_end, to_vec(s_end), side, false});
          trace.termination = Termination::EndTime;
          return trace;
        }
        trace.points.push_back({t1, to_vec(s1), side, false});
        continue;
      }

      // Bisection on the dense output.
      for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        dense.calc_state(mid, probe);
        if (sgn * probe[2] > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      // Newton polish with fresh steps from the step start.
      const State s_start = dense.previous_state();
      double tc = hi;
      State sc = fresh_step(rhs, s_start, t0, tc - t0);
      for (int i = 0; i < 4; ++i) {
        const double zdot = sys.piece(side).normal_speed(to_vec(sc));
        if (sc[2] == 0.0 || zdot == 0.0) break;
        const double next = tc - sc[2] / zdot;
        if (!(next >= t0 && next <= t1)) break;
        tc = next;
        sc = fresh_step(rhs, s_start, t0, tc - t0);
      }
      sc[2] = 0.0;
      const Vec3 pc = to_vec(sc);

      Crossing cr{tc, pc(0), pc(1), side, other(side), false};
      if (std::abs(pc(1)) < opts.eps_fold) cr.tangency = true;
      trace.crossings.push_back(cr);
      trace.points.push_back({tc, pc, side, true});

      if (cr.tangency) {
        trace.termination = Termination::Tangency;
        trace.diagnostic = "orbit reached the tangency line";
        return trace;
      }
      if (opts.max_crossings > 0 && static_cast<int>(trace.crossings.size()) >= opts.max_crossings) {
        trace.termination = Termination::CrossingLimit;
        return trace;
      }
      const double hu = sys.upper.normal_speed(pc), hl = sys.lower.normal_speed(pc);
      if (!(hu * hl > 0.0)) {
        trace.termination = Termination::NoSewing;
        trace.diagnostic = "crossing point outside the sewing region";
        return trace;
      }
      side = other(side);
      state = sc;
      t = tc;
      switched = true;
    }
  }
}

OrbitTrace integrate(const CanonicalParams& p, const Vec3& p0, double t_end, const OracleOptions& opts) {
  return integrate(p.to_system(), p0, t_end, opts);
}

OrbitTrace integrate(const FocusCanonicalParams& p, const Vec3& p0, double t_end,
                     const OracleOptions& opts) {
  return integrate(p.to_system(), p0, t_end, opts);
}

namespace {

NumericReturn nth_return(const PiecewiseSystem& sys, double x0, double y0, double t_max,
                         OracleOptions opts, int n) {
  opts.max_crossings = n;
  const OrbitTrace tr = integrate(sys, Vec3(x0, y0, 0.0), t_max, opts);
  NumericReturn out;
  if (static_cast<int>(tr.crossings.size()) == n && !tr.crossings.back().tangency) {
    const Crossing& c = tr.crossings.back();
    out.tau = c.t;
    out.x_exit = c.x;
    out.y_exit = c.y;
    out.defined = true;
    return out;
  }
  out.diagnostic = tr.termination == Termination::EndTime ? "no return before t_max"
                                                           : std::string(to_string(tr.termination));
  if (!tr.diagnostic.empty()) out.diagnostic += ": " + tr.diagnostic;
  return out;
}

}  // namespace

NumericReturn numeric_half_map(const PiecewiseSystem& sys, double x0, double y0, double t_max,
                               const OracleOptions& opts) {
  return nth_return(sys, x0, y0, t_max, opts, 1);
}

NumericReturn numeric_half_map(const CanonicalParams& p, double y0, double t_max,
                               const OracleOptions& opts) {
  return nth_return(p.to_system(), 0.0, y0, t_max, opts, 1);
}

NumericReturn numeric_full_return(const PiecewiseSystem& sys, double x0, double y0, double t_max,
                                  const OracleOptions& opts) {
  return nth_return(sys, x0, y0, t_max, opts, 2);
}

double numeric_multiplier(const PiecewiseSystem& sys, double x0, double y0, double t_max,
                          const OracleOptions& opts) {
  const double h = 1e-6 * std::max(1.0, std::abs(x0));
  const NumericReturn rp = numeric_full_return(sys, x0 + h, y0, t_max, opts);
  const NumericReturn rm = numeric_full_return(sys, x0 - h, y0, t_max, opts);
  if (!rp.defined || !rm.defined) throw NumericFailure("full return undefined near the cycle");
  return (rp.x_exit - rm.x_exit) / (2.0 * h);
}

}  // namespace pwlcyl
