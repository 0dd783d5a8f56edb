#include "pwlcyl/spectral.hpp"

#include "pwlcyl/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <vector>

namespace pwlcyl {

namespace {

using Pair = std::pair<SpectralType, SpectralType>;
using T = SpectralType;

constexpr int idx(T t) { return static_cast<int>(t); }

Pair swap_pair(Pair p) { return {p.second, p.first}; }

struct Row {
  T upper, lower;
};

constexpr std::array kTableRows = {
    Row{T::Sa, T::Sa}, Row{T::Sa, T::No}, Row{T::Sa, T::Nd}, Row{T::Sa, T::Fo},
    Row{T::Sa, T::Ce}, Row{T::Sa, T::D1}, Row{T::No, T::No}, Row{T::No, T::Nd},
    Row{T::No, T::Fo}, Row{T::No, T::Ce}, Row{T::No, T::D1}, Row{T::Nd, T::Nd},
    Row{T::Nd, T::Fo}, Row{T::Nd, T::D1}, Row{T::D1, T::Fo}, Row{T::D1, T::D1},
    // constant rows
    Row{T::Sa, T::D2}, Row{T::Ce, T::Nd}, Row{T::Ce, T::Fo}, Row{T::Ce, T::D1},
    Row{T::D2, T::Fo}, Row{T::No, T::D2}, Row{T::Nd, T::D2}, Row{T::D1, T::D2},
    Row{T::Ce, T::Ce}, Row{T::D2, T::Ce}, Row{T::D2, T::D2}};

struct Membership {
  T upper;
  std::initializer_list<T> lowers;
};

const std::array<Membership, 5> kScrollList = {{
    {T::Sa, {T::Sa, T::No, T::Nd, T::Fo, T::Ce, T::D1}},
    {T::No, {T::No, T::Nd, T::Fo, T::Ce, T::D1, T::D2}},
    {T::Nd, {T::Nd, T::Fo, T::D1, T::D2}},
    {T::Fo, {T::D1}},
    {T::D1, {T::D1, T::D2}},
}};

const std::array<Membership, 5> kUniqueList = {{
    {T::Sa, {T::Sa, T::No, T::Nd, T::Fo, T::Ce, T::D1, T::D2}},
    {T::No, {T::No, T::Nd, T::Fo, T::Ce, T::D1}},
    {T::Nd, {T::Nd, T::Fo, T::Ce, T::D1}},
    {T::Fo, {T::Fo, T::Ce, T::D1, T::D2}},
    {T::Ce, {T::D1}},
}};

const std::array<Membership, 6> kInfiniteList = {{
    {T::Sa, {T::Sa, T::No, T::Nd, T::Fo, T::Ce, T::D1}},
    {T::No, {T::No, T::Nd, T::Fo, T::Ce, T::D1}},
    {T::Nd, {T::Nd, T::Fo, T::D1}},
    {T::Ce, {T::Ce, T::D2}},
    {T::D1, {T::D1}},
    {T::D2, {T::D2}},
}};

template <std::size_t N>
bool in_list(const std::array<Membership, N>& list, Pair p) {
  const auto direct = [&](Pair q) {
    for (const auto& m : list) {
      if (m.upper != q.first) continue;
      for (T l : m.lowers) {
        if (l == q.second) return true;
      }
    }
    return false;
  };
  return direct(p) || direct(swap_pair(p));
}

bool is_zero(double v, double eps) { return std::abs(v) <= eps; }

void require_nonzero(double divisor, const char* clause) {
  if (divisor == 0.0 || !std::isfinite(divisor)) {
    throw TheoryNotApplicable(std::string("exponent undefined: divisor of the ") + clause +
                              " clause vanishes");
  }
}

}  // namespace

std::string_view to_string(SpectralType t) {
  switch (t) {
    case T::Sa: return "Sa";
    case T::No: return "No";
    case T::Nd: return "Nd";
    case T::Fo: return "Fo";
    case T::Ce: return "Ce";
    case T::D1: return "D1";
    case T::D2: return "D2";
  }
  return "?";
}

std::optional<SpectralType> spectral_type_from_string(std::string_view s) {
  for (T t : kAllSpectralTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view to_string(TableStatus s) {
  switch (s) {
    case TableStatus::Ok: return "ok";
    case TableStatus::FocusFocus: return "focus-focus";
    case TableStatus::Unparseable: return "unparseable-row";
    case TableStatus::Missing: return "no-row";
    case TableStatus::DegenerateExponent: return "degenerate-exponent";
  }
  return "?";
}

std::string_view to_string(StructureKind k) {
  switch (k) {
    case StructureKind::Scroll: return "Scroll";
    case StructureKind::UniqueCylinder: return "UniqueCylinder";
    case StructureKind::InfinitelyManyCylinders: return "InfinitelyManyCylinders";
    case StructureKind::FocusFocus: return "FocusFocus";
    case StructureKind::Unclassified: return "Unclassified";
  }
  return "?";
}

SpectralData classify_piece(double a, double c, double d, double eps_disc) {
  SpectralData sd;
  const double disc = c * c + 4.0 * d;
  if (is_zero(d, eps_disc)) {
    sd.type = is_zero(c, eps_disc) ? T::D2 : T::D1;
  } else if (is_zero(c, eps_disc) && d < 0.0) {
    sd.type = T::Ce;
  } else if (d > 0.0) {
    sd.type = T::Sa;
  } else if (is_zero(disc, eps_disc)) {
    sd.type = T::Nd;
  } else if (disc > 0.0) {
    sd.type = T::No;
  } else {
    sd.type = T::Fo;
  }

  sd.c_eff = c;
  sd.d_eff = d;
  switch (sd.type) {
    case T::D2: sd.c_eff = 0.0; sd.d_eff = 0.0; break;
    case T::D1: sd.d_eff = 0.0; break;
    case T::Ce: sd.c_eff = 0.0; break;
    case T::Nd: sd.d_eff = -c * c / 4.0; break;
    default: break;
  }
  const double disc_eff = sd.c_eff * sd.c_eff + 4.0 * sd.d_eff;
  sd.s = std::sqrt(std::abs(disc_eff));
  const std::complex<double> root = std::sqrt(std::complex<double>(disc_eff, 0.0));
  sd.lambda1 = a;
  sd.lambda2 = (sd.c_eff + root) / 2.0;
  sd.lambda3 = (sd.c_eff - root) / 2.0;
  return sd;
}

double alpha_of(const SpectralData& sd) {
  const double a = sd.lambda1.real();
  const double c = sd.c_eff, d = sd.d_eff, s = sd.s;
  switch (sd.type) {
    case T::Sa: require_nonzero(s + c, "Sa"); return (s - c) / (s + c);
    case T::No: require_nonzero(s + c, "No"); return (c - s) / (s + c);
    case T::Nd: return c / 2.0;
    case T::Fo: require_nonzero(c, "Fo"); return s / (2.0 * c);
    case T::Ce: return std::sqrt(-d);
    case T::D1: require_nonzero(c, "D1"); return 1.0 / c;
    case T::D2: require_nonzero(a, "D2"); return 1.0 / a;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double beta_of(const SpectralData& sd) {
  if (sd.type == T::Sa || sd.type == T::No) {
    const double c = sd.c_eff, s = sd.s;
    require_nonzero(s + c, sd.type == T::Sa ? "lower Sa" : "lower No");
    return (s - c) / (s + c);
  }
  return alpha_of(sd);
}

bool has_table_row(Pair pair) {
  for (const Row& r : kTableRows) {
    if (r.upper == pair.first && r.lower == pair.second) return true;
  }
  return false;
}

KappaLambda kappa_lambda(Pair pair, double alpha, double beta, double c_plus, double c_minus) {
  const double a = alpha, b = beta, cp = c_plus, cm = c_minus;
  KappaLambda out;
  out.status = TableStatus::Ok;
  const auto set = [&](double k, double l) {
    out.kappa = k;
    out.lambda = l;
  };
  const auto sq = [](double v) { return v * v; };
  switch (idx(pair.first) * 7 + idx(pair.second)) {
    case idx(T::Sa) * 7 + idx(T::Sa):
      set(a * a * (a * cm + b * cp - cp - cm) * (a * b * cm - b * cp - b * cm + cp),
          (a * b * cp - a * cp - a * cm + cm) * (a * b * cp + a * b * cm - a * cp - b * cm));
      break;
    case idx(T::Sa) * 7 + idx(T::No):
      set(-(b * cp - cp + (-1 + a) * cm) * ((cp + (-a + 1) * cm) * b - cp) * a * a,
          (((cp + cm) * b - cp) * a - b * cm) * ((b * cp - cp - cm) * a + cm));
      break;
    case idx(T::Sa) * 7 + idx(T::Nd):
      set(a * a * sq((-a + 1) * b + cp), -sq((b + cp) * a - b));
      break;
    case idx(T::Sa) * 7 + idx(T::Fo):
      set(4 * a * a * ((b * b + 0.25) * sq(-1 + a) * cm * cm - cp * (-1 + a) * cm + cp * cp),
          -(4 * (b * b + 0.25)) * sq(-1 + a) * cm * cm - 4 * cp * a * (-1 + a) * cm -
              4 * cp * cp * a * a);
      break;
    case idx(T::Sa) * 7 + idx(T::Ce):
      set((sq(-1 + a) * b * b + cp * cp) * a * a, -sq(-1 + a) * b * b - cp * cp * a * a);
      break;
    case idx(T::Sa) * 7 + idx(T::D1):
      set(-a * ((-a + 1) * cm + cp), (cp + cm) * a - cm);
      break;
    case idx(T::No) * 7 + idx(T::No):
      set(-(b * cp - cp + (-a - 1) * cm) * ((cp + (1 + a) * cm) * b - cp) * a * a,
          ((b * cp - cp - cm) * a - cm) * (((cp + cm) * b - cp) * a + b * cm));
      break;
    case idx(T::No) * 7 + idx(T::Nd):
      set(sq((1 + a) * b + cp) * a * a, -sq((b + cp) * a + b));
      break;
    case idx(T::No) * 7 + idx(T::Fo):
      set((4 * (sq(1 + a) * (b * b + 0.25) * cm * cm + cp * (1 + a) * cm + cp * cp)) * a * a,
          -4 * sq(1 + a) * (b * b + 0.25) * cm * cm - 4 * cp * a * (1 + a) * cm -
              4 * cp * cp * a * a);
      break;
    case idx(T::No) * 7 + idx(T::Ce):
      // The printed lambda has unbalanced parentheses.
      out.status = TableStatus::Unparseable;
      break;
    case idx(T::No) * 7 + idx(T::D1):
      set(a * ((1 + a) * cm + cp), (-cp - cm) * a - cm);
      break;
    case idx(T::Nd) * 7 + idx(T::Nd):
      set(-(a + b), 2 * b);
      break;
    case idx(T::Nd) * 7 + idx(T::Fo):
      set(-(4 * b * b * cm * cm + 4 * a * a + 4 * a * cm + cm * cm),
          (8 * b * b + 2) * cm * cm + 4 * a * cm);
      break;
    case idx(T::Nd) * 7 + idx(T::D1):
      set(-(a * b + 1), 1.0);
      break;
    case idx(T::D1) * 7 + idx(T::Fo):
      set(4 * (1 + cm * a) + cm * cm * a * a * (4 * b * b + 1), -cm * cm * a * a * (4 * b * b + 1));
      break;
    case idx(T::D1) * 7 + idx(T::D1):
      set(a + b, a + b);
      break;
    case idx(T::Sa) * 7 + idx(T::D2):
    case idx(T::Ce) * 7 + idx(T::Nd):
    case idx(T::Ce) * 7 + idx(T::Fo):
    case idx(T::Ce) * 7 + idx(T::D1):
    case idx(T::D2) * 7 + idx(T::Fo):
      set(1.0, -1.0);
      out.constant_row = true;
      break;
    case idx(T::No) * 7 + idx(T::D2):
    case idx(T::Nd) * 7 + idx(T::D2):
    case idx(T::D1) * 7 + idx(T::D2):
      set(1.0, 1.0);
      out.constant_row = true;
      break;
    case idx(T::Ce) * 7 + idx(T::Ce):
    case idx(T::D2) * 7 + idx(T::Ce):
    case idx(T::D2) * 7 + idx(T::D2):
      set(0.0, 0.0);
      out.constant_row = true;
      break;
    case idx(T::Fo) * 7 + idx(T::Fo):
      out.status = TableStatus::FocusFocus;
      break;
    default:
      out.status = TableStatus::Missing;
      break;
  }
  return out;
}

PairInvariants pair_invariants(const CanonicalParams& p, double eps_disc) {
  PairInvariants inv;
  inv.upper = classify_piece(p.a_plus, p.c_plus, p.d_plus, eps_disc);
  inv.lower = classify_piece(p.a_minus, p.c_minus, p.d_minus, eps_disc);
  inv.pair = {inv.upper.type, inv.lower.type};

  if (inv.pair == Pair{T::Fo, T::Fo}) {
    inv.status = TableStatus::FocusFocus;
    inv.note = "(Fo,Fo): use the focus-focus path; at most one invariant cylinder";
    return inv;
  }
  if (!has_table_row(inv.pair)) {
    if (!has_table_row(swap_pair(inv.pair))) {
      inv.status = TableStatus::Missing;
      inv.note = "no table row for this pair in either orientation";
      return inv;
    }
    inv.swapped = true;
    inv.pair = swap_pair(inv.pair);
  }

  // Under (y, z) -> (-y, -z) the lower piece becomes an upper one with the
  // same (c, d), so alpha comes from the old lower piece and vice versa.
  const SpectralData& up = inv.swapped ? inv.lower : inv.upper;
  const SpectralData& lo = inv.swapped ? inv.upper : inv.lower;

  const std::string side_up = inv.swapped ? "X- (swapped)" : "X+";
  const std::string side_lo = inv.swapped ? "X+ (swapped)" : "X-";
  inv.alpha_source = side_up + " " + std::string(to_string(up.type));
  inv.beta_source = side_lo + " " + std::string(to_string(lo.type));

  std::optional<double> alpha, beta;
  std::string failure;
  try {
    alpha = alpha_of(up);
  } catch (const TheoryNotApplicable& e) {
    failure = e.what();
  }
  try {
    beta = beta_of(lo);
  } catch (const TheoryNotApplicable& e) {
    if (failure.empty()) failure = e.what();
  }
  inv.alpha = alpha.value_or(std::numeric_limits<double>::quiet_NaN());
  inv.beta = beta.value_or(std::numeric_limits<double>::quiet_NaN());

  const KappaLambda kl = kappa_lambda(inv.pair, inv.alpha, inv.beta, up.c_eff, lo.c_eff);
  inv.status = kl.status;
  inv.kappa = kl.kappa;
  inv.lambda = kl.lambda;
  if (kl.status == TableStatus::Unparseable) {
    inv.note = "table row is not parseable as printed";
    return inv;
  }

  const bool needs_alpha = !kl.constant_row || kl.kappa * kl.lambda < 0.0;
  const bool needs_beta = !kl.constant_row;
  if ((needs_alpha && !alpha) || (needs_beta && !beta)) {
    inv.status = TableStatus::DegenerateExponent;
    inv.note = failure;
  }
  return inv;
}

bool listed_for(StructureKind k, Pair pair) {
  switch (k) {
    case StructureKind::Scroll: return in_list(kScrollList, pair);
    case StructureKind::UniqueCylinder: return in_list(kUniqueList, pair);
    case StructureKind::InfinitelyManyCylinders: return in_list(kInfiniteList, pair);
    case StructureKind::FocusFocus: return pair == Pair{T::Fo, T::Fo};
    case StructureKind::Unclassified: return false;
  }
  return false;
}

StructureClass structure_of(const PairInvariants& inv, double eps) {
  StructureClass sc;
  switch (inv.status) {
    case TableStatus::FocusFocus:
      sc.kind = StructureKind::FocusFocus;
      sc.clause = "at most one invariant cylinder";
      sc.listed = true;
      return sc;
    case TableStatus::Unparseable:
    case TableStatus::Missing:
    case TableStatus::DegenerateExponent:
      sc.kind = StructureKind::Unclassified;
      sc.reason = std::string(to_string(inv.status)) + (inv.note.empty() ? "" : ": " + inv.note);
      return sc;
    case TableStatus::Ok:
      break;
  }
  const bool any_list = listed_for(StructureKind::Scroll, inv.pair) ||
                        listed_for(StructureKind::UniqueCylinder, inv.pair) ||
                        listed_for(StructureKind::InfinitelyManyCylinders, inv.pair);
  if (!any_list) {
    sc.kind = StructureKind::Unclassified;
    sc.reason = "pair absent from all structure lists";
    return sc;
  }

  const double k = inv.kappa, l = inv.lambda;
  if (is_zero(k, eps) && is_zero(l, eps)) {
    sc.kind = StructureKind::InfinitelyManyCylinders;
    sc.clause = "kappa=lambda=0";
  } else if (k * l >= 0.0) {
    sc.kind = StructureKind::Scroll;
    sc.clause = "kappa^2+lambda^2!=0, kappa*lambda>=0";
  } else if (1.0 + inv.alpha * inv.alpha * l / k > 0.0) {
    sc.kind = StructureKind::UniqueCylinder;
    sc.clause = "kappa*lambda<0, 1+alpha^2*lambda/kappa>0";
  } else {
    sc.kind = StructureKind::Scroll;
    sc.clause = "kappa*lambda<0, 1+alpha^2*lambda/kappa<=0";
  }
  sc.listed = listed_for(sc.kind, inv.pair);
  if (!sc.listed) sc.reason = "sign condition met but pair not listed under this clause";
  return sc;
}

double f2_diagnostic(double v, double w, double kappa, double lambda) {
  return kappa * w * (v - 1.0) * (v - 1.0) + lambda * v * (w - 1.0) * (w - 1.0);
}

bool tangency_root_test(double kappa, double lambda, double alpha) {
  if (kappa == 0.0) throw TheoryNotApplicable("degenerate, use kappa*lambda sign path");
  return 1.0 + alpha * alpha * lambda / kappa > 0.0;
}

std::optional<double> locate_tangency_root(double kappa, double lambda, double alpha) {
  if (kappa == 0.0) throw TheoryNotApplicable("degenerate, use kappa*lambda sign path");
  const double ratio = lambda / kappa;
  const auto g = [&](double v) {
    const double va = std::pow(v, alpha);
    const double num = v * (va - 1.0) * (va - 1.0);
    const double den = va * (v - 1.0) * (v - 1.0);
    return 1.0 + ratio * num / den;
  };
  // Geometric nodes near 0, uniform nodes on the rest of (0, 1).
  std::vector<double> nodes;
  for (int k = 12; k >= 2; --k) nodes.push_back(std::pow(10.0, -k));
  constexpr int kUniform = 2000;
  for (int i = 1; i < kUniform; ++i) nodes.push_back(static_cast<double>(i) / kUniform);

  double prev_v = nodes.front();
  double prev_g = g(prev_v);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double v = nodes[i];
    const double gv = g(v);
    if (std::isfinite(prev_g) && std::isfinite(gv) && (prev_g == 0.0 || prev_g * gv < 0.0)) {
      if (prev_g == 0.0) return prev_v;
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(
          g, prev_v, v, prev_g, gv, boost::math::tools::eps_tolerance<double>(52), iters);
      return 0.5 * (r.first + r.second);
    }
    prev_v = v;
    prev_g = gv;
  }
  return std::nullopt;
}

}  // namespace pwlcyl
