#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "certsurf/interval.hpp"
#include "certsurf/krawczyk.hpp"
#include "certsurf/system.hpp"

namespace certsurf {

/// A dyadic cell of the scaled base cube [-1,1]^d: side 2^(s1+1), with the
/// fiber radius exponent s2 = ceil(s1/2).
struct SubdivisionCell {
  Eigen::VectorXd lower;  ///< scaled lower corner (exact dyadic values)
  int s1 = 0;
  int s2 = 0;

  static SubdivisionCell root(std::size_t d);
  double side() const;
  Eigen::VectorXd center() const;
};

/// ceil(s1 / 2) for any integer s1.
int fiber_exponent(int s1);

/// The 2^d children of a cell, each with s1 decreased by one.
std::vector<SubdivisionCell> subdivide(const SubdivisionCell& cell);

struct GraphSlab {
  IntervalBox base;    ///< d-dimensional, in the system's frame
  IntervalBox fiber;   ///< (n-d)-dimensional emitted fiber box
  int sheet_id = 0;
  SubdivisionCell cell;  ///< scaled cell the slab came from
  KrawczykInput test;    ///< inputs that reproduce the certificate
  KrawczykCertificate certificate;

  /// base x fiber in frame coordinates.
  IntervalBox box() const { return base.concat(fiber); }
};

struct GraphOptions {
  /// Emit the fiber as y^ + rho 2^s2 [-1,1] instead of the tested box.
  bool refined = false;
  /// Keep subdividing passing cells until every base radius is at most this.
  double min_base_radius = 0.0;
  int sheets = 1;
  /// Box searched for the fiber roots over the center of U.  Required when
  /// sheets > 1; for a single sheet the Newton seed is its midpoint.
  std::optional<IntervalBox> fiber_search;
  /// Newton seed for a single sheet when no search box is given.
  std::optional<Eigen::VectorXd> fiber_seed;
  /// Subdividing below s1 = floor_exponent is an error.
  int floor_exponent = -40;
  /// Upper bound on processed cells before giving up.
  std::size_t max_cells = 1000000;
  /// Clip emitted fibers to this box (same frame); used by patch refinement.
  std::optional<IntervalBox> fiber_clip;
};

/// Subdivides U until every cell's prism passes the Krawczyk test, for every
/// sheet.  U is scaled to [-1,1]^d; the fiber radius of a cell with exponent
/// s2 is h 2^s2 where h is the largest half-width of U.
///
/// Throws Error when the floor is reached or the number of fiber roots over
/// the center of U differs from options.sheets.
std::vector<GraphSlab> graph_approximation(const AnalyticSystem& system, const IntervalBox& U, double rho,
                                           const GraphOptions& options = {});

/// All roots of y -> F(x, y) in `search`, isolated by bisection with
/// interval exclusion and Krawczyk inclusion.  Each returned box holds
/// exactly one root.  Throws Error if isolation does not finish.
std::vector<IntervalBox> isolate_fiber_roots(const AnalyticSystem& system, const Eigen::VectorXd& base_point,
                                             const IntervalBox& search, int max_depth = 40);

}  // namespace certsurf
