#include "pwlcyl/flow.hpp"

#include "pwlcyl/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace pwlcyl {

namespace {

constexpr double kEscape = 1e100;
constexpr double kTaylorRadius = 0.5;
constexpr double kResonanceRel = 1e-4;

bool is_complex_type(SpectralType t) { return t == SpectralType::Fo || t == SpectralType::Ce; }

}  // namespace

double exp_remainder(int n, double l, double t) {
  const double x = l * t;
  if (std::abs(x) < 1.0) {
    // t^n * sum_k x^k / (k + n)!
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    double term = 1.0 / fact;
    double sum = term;
    for (int k = 1; k < 60; ++k) {
      term *= x / (k + n);
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return std::pow(t, n) * sum;
  }
  double head = 0.0, term = 1.0;
  for (int k = 0; k < n; ++k) {
    head += term;
    term *= x / (k + 1);
  }
  return (std::exp(x) - head) / std::pow(l, n);
}

PieceParams upper_piece(const CanonicalParams& p) {
  return {p.a_plus, p.b_plus, p.c_plus, p.d_plus, 0.0, -1.0};
}

PieceParams lower_piece(const CanonicalParams& p) {
  return {p.a_minus, p.b_minus, p.c_minus, p.d_minus, p.m, 1.0};
}

PieceParams focus_upper_piece(const FocusCanonicalParams& f) {
  return {f.a_plus, f.b_plus, f.T2, -f.D2, 0.0, -f.a2};
}

PieceParams focus_lower_piece(const FocusCanonicalParams& f) {
  return {f.a_minus, f.b_minus, f.T1, -f.D1, f.m, -f.a1};
}

PieceFlow::PieceFlow(const PieceParams& p, const FlowOptions& opts)
    : p_(p), sd_(classify_piece(p.a, p.c, p.d, opts.eps_disc)) {
  double slowest = 0.0;
  for (const auto& l : {sd_.lambda2, sd_.lambda3}) {
    const double r = std::abs(l);
    if (r > opts.eps_disc) slowest = std::max(slowest, 1.0 / r);
  }
  t_max_ = opts.t_max > 0.0 ? opts.t_max
                            : opts.t_max_factor * (slowest > 0.0 ? slowest : 1.0);
  const double c = sd_.c_eff, d = sd_.d_eff;
  rho_ = std::max({std::abs(p.a) + std::abs(p.b), std::abs(c) + std::abs(d), 1.0});
  chi_ = p.a * p.a - p.a * c - d;
  resonant_ = std::abs(chi_) <= kResonanceRel * (p.a * p.a + std::abs(p.a * c) + std::abs(d));
}

bool PieceFlow::use_taylor(double t) const { return rho_ * std::abs(t) <= kTaylorRadius; }

Vec3 PieceFlow::taylor(double t, const Vec3& p0) const {
  Mat3 A;
  A << p_.a, 0.0, p_.b,
       0.0, sd_.c_eff, sd_.d_eff,
       0.0, 1.0, 0.0;
  const Vec3 b(p_.m, p_.e, 0.0);
  Vec3 term = t * (A * p0 + b);
  Vec3 sum = p0 + term;
  for (int k = 2; k < 80; ++k) {
    term = (t / k) * (A * term);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * (1.0 + sum.cwiseAbs().maxCoeff())) break;
  }
  return sum;
}

PieceFlow::Modes PieceFlow::modes(double t) const {
  const double c = sd_.c_eff, d = sd_.d_eff, s = sd_.s;
  Modes m{};
  switch (sd_.type) {
    case SpectralType::Sa:
    case SpectralType::No: {
      const double g = std::exp(c * t / 2.0);
      const double sh = std::sinh(s * t / 2.0) / (s / 2.0);
      const double ch = std::cosh(s * t / 2.0);
      m.phi = g * sh;
      m.dphi = g * (c / 2.0 * sh + ch);
      m.psi = m.dphi - c * m.phi;
      if (s >= std::abs(c) / 2.0) {
        const double l2 = (c + s) / 2.0, l3 = (c - s) / 2.0;
        m.Phi = (exp_remainder(1, l2, t) - exp_remainder(1, l3, t)) / s;
      } else {
        m.Phi = (m.psi - 1.0) / d;
      }
      break;
    }
    case SpectralType::Nd: {
      const double mu = c / 2.0;
      const double x = mu * t;
      const double g = std::exp(x);
      m.phi = t * g;
      m.dphi = g * (1.0 + x);
      m.psi = g * (1.0 - x);
      if (std::abs(x) < 1.0) {
        // int_0^t u e^{mu u} du = t^2 sum_k x^k / (k! (k + 2))
        double term = 1.0, sum = 0.5;
        for (int k = 1; k < 60; ++k) {
          term *= x / k;
          const double add = term / (k + 2);
          sum += add;
          if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
        }
        m.Phi = t * t * sum;
      } else {
        m.Phi = (g * (x - 1.0) + 1.0) / (mu * mu);
      }
      break;
    }
    case SpectralType::Fo:
    case SpectralType::Ce: {
      const double om = s / 2.0;
      const double g = std::exp(c * t / 2.0);
      const double sn = std::sin(om * t), cs = std::cos(om * t);
      m.phi = g * sn / om;
      m.dphi = g * (c / 2.0 * sn / om + cs);
      m.psi = g * (cs - c / 2.0 * sn / om);
      if (sd_.type == SpectralType::Ce) {
        const double h = std::sin(om * t / 2.0) / om;
        m.Phi = 2.0 * h * h;
      } else {
        m.Phi = (m.psi - 1.0) / d;
      }
      break;
    }
    case SpectralType::D1:
      m.phi = exp_remainder(1, c, t);
      m.dphi = std::exp(c * t);
      m.psi = 1.0;
      m.Phi = exp_remainder(2, c, t);
      break;
    case SpectralType::D2:
      m.phi = t;
      m.dphi = 1.0;
      m.psi = 1.0;
      m.Phi = t * t / 2.0;
      break;
  }
  return m;
}

std::pair<double, double> PieceFlow::yz(double t, double y0, double z0) const {
  if (use_taylor(t)) {
    const Vec3 r = taylor(t, Vec3(0.0, y0, z0));
    return {r(1), r(2)};
  }
  const Modes m = modes(t);
  const double e = p_.e, d = sd_.d_eff;
  return {z0 * d * m.phi + y0 * m.dphi + e * m.phi, z0 * m.psi + y0 * m.phi + e * m.Phi};
}

double PieceFlow::x_integral(double t, double y0, double z0) const {
  const double a = p_.a, e = p_.e;
  if (!resonant_) {
    const double p1 = 1.0 / chi_;
    const double r1 = (a - sd_.c_eff) / chi_;
    const auto [y, z] = yz(t, y0, z0);
    return std::exp(a * t) * (p1 * y0 + r1 * z0) + p1 * e * exp_remainder(1, a, t) - p1 * y - r1 * z;
  }
  if (a == 0.0 && sd_.type == SpectralType::D1) {
    const double c = sd_.c_eff;
    return z0 * t + y0 * exp_remainder(2, c, t) + e * exp_remainder(3, c, t);
  }
  if (a == 0.0 && sd_.type == SpectralType::D2) {
    return z0 * t + y0 * t * t / 2.0 + e * t * t * t / 6.0;
  }
  const auto integrand = [&](double eta) { return std::exp(a * (t - eta)) * yz(eta, y0, z0).second; };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, t, 15, 1e-14);
}

double PieceFlow::x(double t, double x0, double y0, double z0) const {
  if (use_taylor(t)) return taylor(t, Vec3(x0, y0, z0))(0);
  const double a = p_.a;
  double out = std::exp(a * t) * x0 + p_.m * exp_remainder(1, a, t);
  if (p_.b != 0.0) out += p_.b * x_integral(t, y0, z0);
  return out;
}

Vec3 PieceFlow::operator()(double t, const Vec3& p) const {
  if (use_taylor(t)) return taylor(t, p);
  const auto [y, z] = yz(t, p(1), p(2));
  return {x(t, p(0), p(1), p(2)), y, z};
}

HalfReturn PieceFlow::half_return(double y0) const {
  HalfReturn out;
  if (!(y0 != 0.0) || !std::isfinite(y0)) {
    out.diagnostic = "start point on the tangency line";
    return out;
  }
  const double sigma = y0 > 0.0 ? 1.0 : -1.0;
  const auto z_at = [&](double t) { return yz(t, y0, 0.0).second; };

  const double den = std::abs(sd_.c_eff * y0) + std::abs(p_.e);
  double h = den > 0.0 ? 0.25 * std::abs(y0) / den : t_max_ / 64.0;
  // Step cap for oscillatory pieces only.
  const double h_max = is_complex_type(sd_.type) ? std::numbers::pi / (2.0 * sd_.s)
                                                 : std::numeric_limits<double>::infinity();
  h = std::min(h, h_max);

  double t_lo = h;
  double z_lo = z_at(t_lo);
  for (int i = 0; i < 80 && !(sigma * z_lo > 0.0); ++i) {
    t_lo *= 0.25;
    z_lo = z_at(t_lo);
  }
  if (!(sigma * z_lo > 0.0)) {
    out.diagnostic = "orbit does not leave Sigma on the side of y0";
    return out;
  }
  h = t_lo;

  while (true) {
    if (t_lo >= t_max_) {
      out.diagnostic = "no return before t_max";
      return out;
    }
    h = std::min(h * 1.5, h_max);
    const double t_hi = std::min(t_lo + h, t_max_);
    const double z_hi = z_at(t_hi);
    if (!std::isfinite(z_hi) || std::abs(z_hi) > kEscape) {
      out.diagnostic = "orbit escapes to infinity without returning";
      return out;
    }
    if (sigma * z_hi <= 0.0) {
      double tau = t_hi;
      if (z_hi != 0.0) {
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(
            z_at, t_lo, t_hi, z_lo, z_hi, boost::math::tools::eps_tolerance<double>(52), iters);
        const double za = std::abs(z_at(r.first)), zb = std::abs(z_at(r.second));
        tau = za <= zb ? r.first : r.second;
      }
      out.tau = tau;
      out.y_exit = yz(tau, y0, 0.0).first;
      out.defined = true;
      return out;
    }
    t_lo = t_hi;
    z_lo = z_hi;
  }
}

AffineXMap PieceFlow::x_map(double y0, const HalfReturn& h) const {
  if (!h.defined) throw TheoryNotApplicable("x-map requested for an undefined half return");
  return {std::exp(p_.a * h.tau), x(h.tau, 0.0, y0, 0.0)};
}

Vec3 flow_upper(const CanonicalParams& p, double t, const Vec3& x0) {
  return PieceFlow(upper_piece(p))(t, x0);
}

Vec3 flow_lower(const CanonicalParams& p, double t, const Vec3& x0) {
  return PieceFlow(lower_piece(p))(t, x0);
}

HalfReturn half_map_upper(const CanonicalParams& p, double y0, const FlowOptions& opts) {
  if (!(y0 > 0.0)) throw InvalidInput("upper half map needs y0 > 0");
  return PieceFlow(upper_piece(p), opts).half_return(y0);
}

HalfReturn half_map_lower(const CanonicalParams& p, double y1, const FlowOptions& opts) {
  if (!(y1 < 0.0)) throw InvalidInput("lower half map needs y1 < 0");
  return PieceFlow(lower_piece(p), opts).half_return(y1);
}

AffineXMap x_affine_upper(const CanonicalParams& p, double y0, const HalfReturn& h) {
  return PieceFlow(upper_piece(p)).x_map(y0, h);
}

AffineXMap x_affine_lower(const CanonicalParams& p, double y1, const HalfReturn& h) {
  const AffineXMap fwd = PieceFlow(lower_piece(p)).x_map(y1, h);
  return {1.0 / fwd.scale, -fwd.offset / fwd.scale};
}

ParamPoint parametrized_halfmap(const PieceParams& piece, double v, double eps_disc) {
  if (piece.e == 0.0) throw TheoryNotApplicable("parametrization needs e != 0");
  const SpectralData sd = classify_piece(piece.a, piece.c, piece.d, eps_disc);
  const double c = sd.c_eff, d = sd.d_eff, s = sd.s;
  const auto need = [](bool ok, const char* what) {
    if (!ok) throw TheoryNotApplicable(std::string("parametrization clause: ") + what);
  };

  ParamPoint r;
  r.v = v;
  switch (sd.type) {
    case SpectralType::Sa: {
      need(v > 0.0 && v < 1.0, "Sa needs v in (0,1)");
      const double l2 = (c + s) / 2.0;
      const double al = alpha_of(sd);
      r.tau = -std::log(v) / l2;
      r.w = std::pow(v, al);
      const double den = al * l2 * (1.0 - v * r.w);
      r.y0 = (al - al * v - v + v * r.w) / den;
      r.y1 = -(al * v * r.w - al * r.w - r.w + 1.0) / den;
      break;
    }
    case SpectralType::No: {
      const double l2 = (c + s) / 2.0, l3 = (c - s) / 2.0;
      need(v > 0.0, "No needs v > 0");
      r.tau = std::log(v) / l2;
      need(r.tau > 0.0, "No: v does not give a positive time");
      r.w = std::pow(v, alpha_of(sd));
      need(v != r.w, "No: v = w");
      r.y0 = ((1.0 - r.w) / l3 - (1.0 - v) / l2) / (v - r.w);
      r.y1 = v * r.y0 + (1.0 - v) / l2;
      break;
    }
    case SpectralType::Nd: {
      need(v > 0.0 && v != 1.0, "Nd needs v > 0, v != 1");
      r.tau = 2.0 * std::log(v) / c;
      need(r.tau > 0.0, "Nd: v does not give a positive time");
      r.w = std::log(v);
      r.y0 = (2.0 + 2.0 * (1.0 - v) / (v * r.w)) / c;
      r.y1 = (2.0 * (1.0 - v) / r.w + 2.0) / c;
      break;
    }
    case SpectralType::Fo: {
      need(v > 0.0, "Fo needs v > 0");
      r.tau = std::log(v) / c;
      need(r.tau > 0.0, "Fo: v does not give a positive time");
      r.w = std::tan(s * r.tau / 2.0);
      // lambda y1 - 1 = e^{lambda tau} (lambda y0 - 1), lambda = (c + i s) / 2
      const std::complex<double> lam(c / 2.0, s / 2.0);
      const std::complex<double> E = std::exp(lam * r.tau);
      const std::complex<double> le = lam * E;
      const std::complex<double> rhs = 1.0 - E;
      const double det = -lam.real() * le.imag() + le.real() * lam.imag();
      need(det != 0.0, "Fo: singular modal system");
      r.y1 = (-rhs.real() * le.imag() + le.real() * rhs.imag()) / det;
      r.y0 = (lam.real() * rhs.imag() - lam.imag() * rhs.real()) / det;
      break;
    }
    case SpectralType::Ce: {
      need(v > -1.0 && v < 1.0, "Ce needs v in (-1,1)");
      const double al = std::sqrt(-d);
      r.tau = std::acos(v) / al;
      r.w = std::sqrt(1.0 - v * v);
      r.y0 = r.w / (al * (1.0 + v));
      r.y1 = -r.y0;
      break;
    }
    case SpectralType::D1: {
      need(v > 0.0 && v != 1.0, "D1 needs v > 0, v != 1");
      r.tau = std::log(v) / c;
      need(r.tau > 0.0, "D1: v does not give a positive time");
      r.w = std::log(v);
      r.y0 = (r.w + 1.0 - v) / (c * (1.0 - v));
      r.y1 = r.y0 - r.tau;
      break;
    }
    case SpectralType::D2:
      need(v > 0.0, "D2 needs v = tau > 0");
      r.tau = v;
      r.w = v * v;
      r.y0 = v / 2.0;
      r.y1 = -v / 2.0;
      break;
  }
  // The clause formulas are for e = -1. Scaling (y, z) by -e covers e < 0
  // and, through the mirror (y, z) -> (-y, -z), e > 0.
  const double k = -piece.e;
  r.y0 *= k;
  r.y1 *= k;
  return r;
}

}  // namespace pwlcyl
