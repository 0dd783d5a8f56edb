#pragma once

// Random systems with one invariant cylinder carrying an attracting limit
// cycle, and an exponential-map iteration of their x-return.

#include "oracles.hpp"

#include "pwlcyl/audit.hpp"
#include "pwlcyl/cycles.hpp"
#include "pwlcyl/flow.hpp"
#include "pwlcyl/sampling.hpp"

#include <random>
#include <vector>

namespace testoracle {

struct CycleInstance {
  pwlcyl::CanonicalParams params;
  pwlcyl::Cylinder cyl;
  pwlcyl::LimitCycle cycle;
};

inline std::vector<CycleInstance> contracting_cycles(int count, std::uint64_t seed) {
  using namespace pwlcyl;
  std::mt19937_64 rng(seed);
  std::vector<CycleInstance> out;
  const auto rows = audit_rows();
  for (int attempt = 0; attempt < 200 * count && static_cast<int>(out.size()) < count; ++attempt) {
    const auto pair = rows[static_cast<std::size_t>(attempt) % rows.size()];
    const CanonicalParams p = draw_canonical(pair, rng, SignRegime::Extended);
    const PairInvariants inv = pair_invariants(p);
    if (structure_of(inv).kind != StructureKind::UniqueCylinder) continue;
    const CylinderScan scan = find_cylinders(p);
    if (scan.continuum || scan.cylinders.size() != 1) continue;
    const CycleResult cr = find_limit_cycle(p, scan.cylinders.front());
    if (cr.kind != CycleKind::Isolated || !cr.cycle) continue;
    if (!(std::abs(cr.cycle->multiplier) < 1.0)) continue;
    out.push_back({p, scan.cylinders.front(), *cr.cycle});
  }
  return out;
}

/// Limit of x -> x-return over one turn, using exponential-map flows for the
/// given half-return times.
inline std::optional<double> iterate_x_return(const pwlcyl::CanonicalParams& p,
                                              const pwlcyl::Cylinder& cyl, double x,
                                              int max_iter = 20000) {
  const pwlcyl::PiecewiseSystem s = p.to_system();
  const Mat4 Eu = (augmented(s.upper) * cyl.tau_plus).exp();
  const Mat4 El = (augmented(s.lower) * cyl.tau_minus).exp();
  const Mat4 R = El * Eu;
  for (int i = 0; i < max_iter; ++i) {
    Vec4 q;
    q << x, cyl.y0, 0.0, 1.0;
    const double next = (R * q)(0);
    if (std::abs(next - x) <= 1e-15 * (1 + std::abs(x))) return next;
    x = next;
  }
  return std::nullopt;
}

}  // namespace testoracle
