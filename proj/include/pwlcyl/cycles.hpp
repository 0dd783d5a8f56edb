#pragma once

// Invariant cylinders as roots of Q(y0) = P-(P+(y0)) - y0, limit cycles as
// fixed points of the affine x-return map, and periodic-orbit surfaces.

#include "pwlcyl/flow.hpp"
#include "pwlcyl/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pwlcyl {

struct ScanOptions {
  double y_min = 1e-3;
  double y_max = 50;
  int nodes = 512;
  double q_tol = 1e-10;
  double continuum_tol = 1e-8;
  /// Perturbation of the lower c used to confirm a continuum is not generic.
  double continuum_probe = 1e-6;
  FlowOptions flow;
};

struct Cylinder {
  double y0 = 0, y1 = 0;
  double tau_plus = 0, tau_minus = 0;
  double residual = 0;
  /// Double root of Q: tangential contact, structurally unstable.
  bool tangential = false;
};

struct CylinderScan {
  /// Isolated cylinders sorted by y0, or the grid itself when `continuum`.
  std::vector<Cylinder> cylinders;
  bool continuum = false;
  /// Whether perturbing the lower c destroyed the continuum.
  bool continuum_breaks = false;
  double max_abs_q = 0;
  std::vector<double> undefined_nodes;
  std::vector<std::string> diagnostics;

  std::size_t isolated_count() const { return continuum ? 0 : cylinders.size(); }
};

/// Q on a single point; nullopt when a half map is undefined.
std::optional<double> return_defect(const PieceFlow& upper, const PieceFlow& lower, double y0);

CylinderScan scan_cylinders(const PieceParams& upper, const PieceParams& lower,
                            const ScanOptions& opts = {});

CylinderScan find_cylinders(const CanonicalParams& p, const ScanOptions& opts = {},
                            std::optional<StructureKind> expected = std::nullopt);

/// Cylinder through y0 without a root search (used on continua).
std::optional<Cylinder> cylinder_at(const PieceFlow& upper, const PieceFlow& lower, double y0);

struct LimitCycle {
  Cylinder cyl;
  double x0 = 0, x1 = 0;
  double period = 0;
  /// rho * xi, slope of the composed x-return map.
  double multiplier = 0;
  double rho = 1, inv_xi = 1, B = 0, C = 0;
  bool attracting = false;
};

enum class CycleKind { Isolated, AllClosed, None };

std::string_view to_string(CycleKind k);

struct CycleResult {
  CycleKind kind = CycleKind::None;
  std::optional<LimitCycle> cycle;
  AffineXMap upper;  // x1 = rho x0 + B
  AffineXMap lower;  // x1 = x0 / xi + C
  std::string note;
};

/// Fixed point of x -> xi (rho x + B) + D from the two maps in the form
/// x1 = rho x0 + B and x1 = x0 / xi + C.
CycleResult cycle_from_maps(const AffineXMap& upper, const AffineXMap& lower, double tol = 1e-12);

CycleResult find_limit_cycle(const PieceParams& upper, const PieceParams& lower, const Cylinder& cyl,
                             const FlowOptions& opts = {});
CycleResult find_limit_cycle(const CanonicalParams& p, const Cylinder& cyl,
                             const FlowOptions& opts = {});

struct SurfaceSample {
  double y0 = 0, y1 = 0;
  CycleKind kind = CycleKind::None;
  double x0 = 0, x1 = 0;
  double period = 0;
  double multiplier = 0;
  /// Largest distance from (x0, y0, 0) along the closed orbit.
  double amplitude = 0;
  double residual = 0;
};

struct PeriodicSurface {
  std::vector<SurfaceSample> samples;
  /// Adjacent samples differ by at most 10x the local grid spacing.
  bool continuous = true;
};

/// Requires an infinitely-many-cylinders structure, (a+)^2 + (a-)^2 != 0 and
/// a+ a- >= 0; throws TheoryNotApplicable otherwise.
PeriodicSurface periodic_surface(const CanonicalParams& p, const std::vector<double>& y_grid,
                                 const FlowOptions& opts = {});

struct FocusAnalysis {
  CylinderScan scan;
  std::optional<CycleResult> cycle;
  /// Set when more than one cylinder was found.
  bool theory_violation = false;
  std::vector<std::string> diagnostics;
};

/// Cylinder scan in the planar (y, z) part of the focus form. The scan
/// variable is Y = -y on Sigma, so y_range refers to the entry -y > 0.
FocusAnalysis focus_focus_analyze(const FocusCanonicalParams& f, const ScanOptions& opts = {});

/// Log-spaced grid of n nodes over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace pwlcyl
