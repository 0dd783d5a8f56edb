#include "pwlcyl/audit.hpp"

#include <random>

namespace pwlcyl {

std::string_view to_string(NumericOutcome o) {
  switch (o) {
    case NumericOutcome::NoCylinder: return "NoCylinder";
    case NumericOutcome::OneCylinder: return "OneCylinder";
    case NumericOutcome::SeveralCylinders: return "SeveralCylinders";
    case NumericOutcome::Continuum: return "Continuum";
    case NumericOutcome::Undetermined: return "Undetermined";
  }
  return "?";
}

NumericOutcome numeric_outcome(const CylinderScan& scan) {
  if (scan.continuum) return NumericOutcome::Continuum;
  switch (scan.cylinders.size()) {
    case 0: return NumericOutcome::NoCylinder;
    case 1: return NumericOutcome::OneCylinder;
    default: return NumericOutcome::SeveralCylinders;
  }
}

bool prediction_matches(StructureKind predicted, NumericOutcome observed) {
  switch (predicted) {
    case StructureKind::Scroll: return observed == NumericOutcome::NoCylinder;
    case StructureKind::UniqueCylinder:
    case StructureKind::FocusFocus:
      return observed == NumericOutcome::NoCylinder || observed == NumericOutcome::OneCylinder;
    case StructureKind::InfinitelyManyCylinders: return observed == NumericOutcome::Continuum;
    case StructureKind::Unclassified: return false;
  }
  return false;
}

std::string AuditRow::name() const {
  return "(" + std::string(to_string(pair.first)) + "," + std::string(to_string(pair.second)) + ")";
}

std::vector<std::pair<SpectralType, SpectralType>> audit_rows() {
  using T = SpectralType;
  return {{T::Sa, T::Sa}, {T::Sa, T::No}, {T::Sa, T::Nd}, {T::Sa, T::Fo}, {T::Sa, T::Ce},
          {T::Sa, T::D1}, {T::No, T::No}, {T::No, T::Nd}, {T::No, T::Fo}, {T::No, T::Ce},
          {T::No, T::D1}, {T::Nd, T::Nd}, {T::Nd, T::Fo}, {T::Nd, T::D1}, {T::D1, T::Fo},
          {T::D1, T::D1}, {T::Sa, T::D2}, {T::Ce, T::Nd}, {T::Ce, T::Fo}, {T::Ce, T::D1},
          {T::D2, T::Fo}, {T::No, T::D2}, {T::Nd, T::D2}, {T::D1, T::D2}, {T::Ce, T::Ce},
          {T::D2, T::Ce}, {T::D2, T::D2}};
}

AuditReport audit_tables(std::uint64_t seed, int draws_per_row, SignRegime regime,
                         const ScanOptions& opts) {
  AuditReport rep;
  rep.seed = seed;
  rep.regime = regime;
  rep.draws_per_row = draws_per_row;
  std::mt19937_64 rng(seed);

  for (const auto& pair : audit_rows()) {
    AuditRow row;
    row.pair = pair;
    for (int k = 0; k < draws_per_row; ++k) {
      AuditDraw d;
      d.params = draw_canonical(pair, rng, regime);
      d.inv = pair_invariants(d.params, opts.flow.eps_disc);
      d.predicted = structure_of(d.inv, opts.flow.eps_disc);
      row.status = d.inv.status;
      if (d.inv.status == TableStatus::Unparseable) {
        row.draws.push_back(d);
        continue;
      }
      const CylinderScan scan = find_cylinders(d.params, opts);
      d.observed = numeric_outcome(scan);
      d.cylinders = scan.isolated_count();
      d.undefined_nodes = scan.undefined_nodes.size();
      d.match = prediction_matches(d.predicted.kind, d.observed);
      if (!d.match) {
        ++row.mismatches;
        rep.failures.push_back(row.name() + " draw " + std::to_string(k) + ": predicted " +
                               std::string(to_string(d.predicted.kind)) + ", observed " +
                               std::string(to_string(d.observed)));
      }
      row.draws.push_back(d);
    }
    if (row.status == TableStatus::Unparseable) {
      ++rep.unparseable_rows;
      rep.failures.push_back(row.name() + ": row not parseable, skipped");
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace pwlcyl
