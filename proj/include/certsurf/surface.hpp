#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "certsurf/patching.hpp"

namespace certsurf {

/// Bookkeeping for the boundary of a patch's base square.  Edge e pins base
/// axis e/2 at its lower (e even) or upper (e odd) end; positions along the
/// edge are values of the other base axis.
struct EdgeCoverage {
  std::array<std::vector<Interval>, 4> uncovered;
  std::array<std::vector<Interval>, 4> covered;  ///< history of subtractions
  std::array<std::vector<Interval>, 4> outside;  ///< removed as outside the domain

  static EdgeCoverage full(const IntervalBox& base);
  static EdgeCoverage none();
  static std::size_t pinned_axis(int edge) { return static_cast<std::size_t>(edge / 2); }
  static std::size_t free_axis(int edge) { return 1 - static_cast<std::size_t>(edge / 2); }
  static double pinned_value(const IntervalBox& base, int edge) {
    return edge % 2 ? base[pinned_axis(edge)].hi() : base[pinned_axis(edge)].lo();
  }

  bool empty() const;
  double length() const;
  /// Removes t from the uncovered list of the edge; pieces of zero length
  /// are dropped since their single point lies in t.
  void subtract(int edge, const Interval& t);
  /// Edge and segment of the longest uncovered piece.
  std::optional<std::pair<int, Interval>> longest() const;
};

struct SurfaceOptions {
  double r = 0.1;
  double rho = 0.125;
  std::optional<IntervalBox> domain;  ///< world box D
  std::optional<std::size_t> max_boxes;
  bool trim = true;
  ComponentOptions component;
  /// First radius tried for a new patch, relative to the popped patch.
  /// Above 1 so that sibling patches overlap instead of touching.
  double growth = 1.25;
  /// Component-test rounds spent before a new patch is shrunk instead.
  int undecided_rounds = 4;
  /// Refinement rounds per pair in the closing trim; undecided pairs are
  /// recorded as exclusions.
  int trim_rounds = 1;
  /// Bisection depth when certifying edge pieces against a neighbor.
  int coverage_depth = 8;
  /// Abort after this many consecutive iterations without coverage progress.
  int stall_limit = 64;
};

struct SurfaceStats {
  std::size_t iterations = 0;
  std::size_t component_tests = 0;
  std::size_t replacements = 0;
  std::size_t undecided = 0;
  std::size_t trimmed_pairs = 0;
  std::size_t dropped = 0;
};

struct SurfaceRun {
  AnalyticSystem system;  ///< world system
  SurfaceOptions options;
  std::vector<CertifiedPatch> patches;  ///< index == id
  std::vector<EdgeCoverage> coverage;
  std::vector<bool> alive;
  /// Patch ids whose overlap with this patch is excluded (trim result).
  std::vector<std::vector<int>> exclusions;
  std::set<std::pair<int, int>> same_sheet;  ///< recorded true verdicts (a < b)
  bool truncated = false;
  SurfaceStats stats;

  // Sweep index over world hulls: key is the hull's lower bound on axis 0.
  std::vector<IntervalBox> hulls;
  std::multimap<double, int> sweep;
  double sweep_width = 0;

  explicit SurfaceRun(AnalyticSystem s) : system(std::move(s)) {}
  std::vector<int> live_ids() const;
  std::size_t live_count() const;
};

/// Grows certified patches from z0 until every patch boundary is covered
/// (or lies outside the domain), or max_boxes patches exist.  The variety
/// must be a surface (d = 2).
SurfaceRun certified_surface_approximation(const AnalyticSystem& system, const Eigen::VectorXd& z0,
                                           const SurfaceOptions& options);

/// Removes from `owner`'s uncovered boundary every piece whose sheet curve
/// provably lies in `other`.  Returns the covered length.
double coverage_update(SurfaceRun& run, int owner, int other);

/// Removes boundary pieces whose fibers lie provably outside the domain.
void clip_to_domain(const CertifiedPatch& patch, EdgeCoverage& cov, const IntervalBox& domain, int depth = 10);

/// Component-tests overlapping pairs without a recorded verdict and marks
/// the overlaps of false pairs as excluded; drops connected components of
/// the overlap graph that contain no certified zero.
void post_process_trim(SurfaceRun& run);

/// Live patches whose boxes may intersect the given box.
std::vector<int> intersecting_patches(const SurfaceRun& run, const OrientedBox& box, int skip = -1);

}  // namespace certsurf
