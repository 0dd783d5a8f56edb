#pragma once

// Randomized check of the structure prediction against brute-force cylinder
// counts, one block of draws per table row.

#include "pwlcyl/cycles.hpp"
#include "pwlcyl/sampling.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pwlcyl {

enum class NumericOutcome { NoCylinder, OneCylinder, SeveralCylinders, Continuum, Undetermined };

std::string_view to_string(NumericOutcome o);

NumericOutcome numeric_outcome(const CylinderScan& scan);

/// Scroll: no cylinder. Unique: at most one. Infinitely many: a continuum.
bool prediction_matches(StructureKind predicted, NumericOutcome observed);

struct AuditDraw {
  CanonicalParams params;
  PairInvariants inv;
  StructureClass predicted;
  NumericOutcome observed = NumericOutcome::Undetermined;
  std::size_t cylinders = 0;
  std::size_t undefined_nodes = 0;
  bool match = false;
};

struct AuditRow {
  std::pair<SpectralType, SpectralType> pair;
  TableStatus status = TableStatus::Ok;
  std::vector<AuditDraw> draws;
  int mismatches = 0;
  std::string name() const;
};

struct AuditReport {
  std::uint64_t seed = 0;
  SignRegime regime = SignRegime::Admissible;
  int draws_per_row = 0;
  std::vector<AuditRow> rows;
  /// "(Sa,Nd) draw 3: predicted Scroll, observed OneCylinder" and similar.
  std::vector<std::string> failures;
  int unparseable_rows = 0;
};

/// Rows of both tables in a fixed order.
std::vector<std::pair<SpectralType, SpectralType>> audit_rows();

AuditReport audit_tables(std::uint64_t seed, int draws_per_row, SignRegime regime,
                         const ScanOptions& opts = {});

}  // namespace pwlcyl
