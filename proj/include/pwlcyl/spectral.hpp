#pragma once

// Eigen-type classification of canonical pieces and the pair invariants
// (alpha, beta, kappa, lambda) that decide the global structure.

#include "pwlcyl/model.hpp"

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace pwlcyl {

inline constexpr double kDefaultEpsDisc = 1e-12;

enum class SpectralType { Sa, No, Nd, Fo, Ce, D1, D2 };

std::string_view to_string(SpectralType t);
std::optional<SpectralType> spectral_type_from_string(std::string_view s);

inline constexpr SpectralType kAllSpectralTypes[] = {
    SpectralType::Sa, SpectralType::No, SpectralType::Nd, SpectralType::Fo,
    SpectralType::Ce, SpectralType::D1, SpectralType::D2};

/// Classification of one canonical piece with linear part
/// [[a, 0, b], [0, c, d], [0, 1, 0]].
struct SpectralData {
  SpectralType type = SpectralType::D2;
  std::complex<double> lambda1, lambda2, lambda3;
  /// sqrt(|c^2 + 4d|), zero for Nd.
  double s = 0;
  /// (c, d) with the boundary relations of the type imposed exactly, e.g.
  /// d = -c^2/4 for Nd and c = 0 for Ce.
  double c_eff = 0, d_eff = 0;
};

SpectralData classify_piece(double a, double c, double d, double eps_disc = kDefaultEpsDisc);

/// Exponent of the upper-piece parametrization, from the effective (c, d) of
/// `sd` and a = lambda1. Throws TheoryNotApplicable naming the clause when
/// its divisor vanishes.
double alpha_of(const SpectralData& sd);
/// Exponent of the lower-piece parametrization.
double beta_of(const SpectralData& sd);

enum class TableStatus { Ok, FocusFocus, Unparseable, Missing, DegenerateExponent };

std::string_view to_string(TableStatus s);

struct KappaLambda {
  TableStatus status = TableStatus::Missing;
  double kappa = 0, lambda = 0;
  bool constant_row = false;
};

/// Look up (kappa, lambda) for a pair already in table orientation.
KappaLambda kappa_lambda(std::pair<SpectralType, SpectralType> pair, double alpha, double beta,
                         double c_plus, double c_minus);

/// True when the table has a row for `pair` as given (no swap).
bool has_table_row(std::pair<SpectralType, SpectralType> pair);

struct PairInvariants {
  SpectralData upper, lower;
  /// Pair in the orientation used for the table lookup.
  std::pair<SpectralType, SpectralType> pair{SpectralType::D2, SpectralType::D2};
  /// The pieces were exchanged through (y, z) -> (-y, -z) to reach a row.
  bool swapped = false;
  TableStatus status = TableStatus::Missing;
  double alpha = 0, beta = 0, kappa = 0, lambda = 0;
  std::string alpha_source;
  std::string beta_source;
  std::string note;
};

PairInvariants pair_invariants(const CanonicalParams& p, double eps_disc = kDefaultEpsDisc);

enum class StructureKind { Scroll, UniqueCylinder, InfinitelyManyCylinders, FocusFocus, Unclassified };

std::string_view to_string(StructureKind k);

struct StructureClass {
  StructureKind kind = StructureKind::Unclassified;
  /// Which sign condition fired, e.g. "kappa*lambda<0, 1+alpha^2*lambda/kappa>0".
  std::string clause;
  /// Whether the pair appears in the sub-list of the fired clause.
  bool listed = false;
  std::string reason;
};

StructureClass structure_of(const PairInvariants& inv, double eps = kDefaultEpsDisc);

/// Membership in the pair lists of the three structure statements.
bool listed_for(StructureKind k, std::pair<SpectralType, SpectralType> pair);

double f2_diagnostic(double v, double w, double kappa, double lambda);

/// 1 + alpha^2 lambda / kappa > 0. Throws TheoryNotApplicable when kappa = 0.
bool tangency_root_test(double kappa, double lambda, double alpha);

/// Root on (0, 1) of 1 + (lambda/kappa) v (v^alpha - 1)^2 / (v^alpha (v - 1)^2),
/// located by a sign-change scan and bracketed refinement.
std::optional<double> locate_tangency_root(double kappa, double lambda, double alpha);

}  // namespace pwlcyl
