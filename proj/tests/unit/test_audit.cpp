#include "doctest.h"

#include "pwlcyl/audit.hpp"

using namespace pwlcyl;

TEST_CASE("prediction matching rules") {
  using O = NumericOutcome;
  CHECK(prediction_matches(StructureKind::Scroll, O::NoCylinder));
  CHECK_FALSE(prediction_matches(StructureKind::Scroll, O::OneCylinder));
  CHECK(prediction_matches(StructureKind::UniqueCylinder, O::OneCylinder));
  CHECK(prediction_matches(StructureKind::UniqueCylinder, O::NoCylinder));
  CHECK_FALSE(prediction_matches(StructureKind::UniqueCylinder, O::SeveralCylinders));
  CHECK(prediction_matches(StructureKind::InfinitelyManyCylinders, O::Continuum));
  CHECK_FALSE(prediction_matches(StructureKind::InfinitelyManyCylinders, O::OneCylinder));
  CHECK_FALSE(prediction_matches(StructureKind::Unclassified, O::NoCylinder));
}

TEST_CASE("admissible audit: every parseable row matches") {
  const AuditReport rep = audit_tables(2024, 5, SignRegime::Admissible);
  CHECK(rep.rows.size() == audit_rows().size());
  int mismatches = 0;
  for (const AuditRow& row : rep.rows) {
    CHECK(row.draws.size() == 5);
    mismatches += row.mismatches;
  }
  CHECK(mismatches == 0);
  CHECK(rep.unparseable_rows == 1);
  REQUIRE(rep.failures.size() == 1);
  CHECK(rep.failures[0].find("(No,Ce)") != std::string::npos);
}

TEST_CASE("audit is reproducible from its seed") {
  const AuditReport a = audit_tables(7, 2, SignRegime::Extended);
  const AuditReport b = audit_tables(7, 2, SignRegime::Extended);
  REQUIRE(a.rows.size() == b.rows.size());
  CHECK(a.failures == b.failures);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    for (std::size_t k = 0; k < a.rows[i].draws.size(); ++k) {
      CHECK(a.rows[i].draws[k].params.c_plus == b.rows[i].draws[k].params.c_plus);
      CHECK(a.rows[i].draws[k].observed == b.rows[i].draws[k].observed);
    }
  }
}
