#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "certsurf/frames.hpp"
#include "certsurf/graph_approx.hpp"
#include "certsurf/krawczyk.hpp"
#include "certsurf/system.hpp"

namespace certsurf {

enum class ColorTag { initial, normal };

/// A box with a passing Krawczyk certificate, living in its own frame.
/// Produced by add_box (cube, r_base = r_fiber) or as a refinement slab of
/// another patch (same frame, possibly thinner fiber).
struct CertifiedPatch {
  int id = -1;
  AnalyticSystem system;  ///< transformed into the patch frame
  OrientedBox box;        ///< emitted box (frame coordinates)
  KrawczykInput test;     ///< reproduces the certificate
  KrawczykCertificate certificate;
  double rho = 0.125;
  ColorTag color = ColorTag::normal;

  std::size_t n() const { return system.n(); }
  std::size_t d() const { return system.d(); }
  IntervalBox base() const { return box.base(); }
  IntervalBox fiber() const { return box.fiber(); }
  double base_radius() const { return test.base_radii.maxCoeff(); }
  double fiber_radius() const { return test.fiber_radius; }
  /// Box known to contain the sheet's fiber point over every base point:
  /// (y^ + K) intersected with the emitted fiber.
  IntervalBox root_enclosure() const;
};

struct AddBoxOptions {
  /// Give up once r drops below floor_factor times the initial r.
  double floor_factor = std::ldexp(1.0, -40);
  int newton_iterations = 60;
  /// World base axes (n x d) the new frame should line up with.
  std::optional<Eigen::MatrixXd> reference_axes;
};

/// Refines z (world) onto the variety, builds the SVD frame there and
/// certifies the cube of radius r around it, halving r until the test
/// passes.  Throws Error "cannot certify near ..." at the floor.
CertifiedPatch add_box(const AnalyticSystem& system, const Eigen::VectorXd& z, double r, double rho,
                       const AddBoxOptions& options = {});

/// Point box x^ x enclosure(y*) in a's frame that lies in a's box and
/// provably in b's box, if one is found.
std::optional<IntervalBox> inclusion_witness(const CertifiedPatch& a, const CertifiedPatch& b);

/// True only if a and b provably share a point of the variety.
bool inclusion_test(const CertifiedPatch& a, const CertifiedPatch& b);

struct ComponentOptions {
  int max_rounds = 30;
};

struct ComponentResult {
  bool same_sheet = false;
  int rounds = 0;  ///< refinement rounds used; 0 means the patches were not refined
  std::vector<CertifiedPatch> refinement_a;
  std::vector<CertifiedPatch> refinement_b;
};

/// Decides whether two certified patches hold the same local sheet by
/// alternating inclusion tests with refinement of both patches (halving rho
/// and the base size each round).  On false the refinements are pairwise
/// provably disjoint across the two patches.  Throws Error when the round
/// limit is reached.
ComponentResult component_test(const CertifiedPatch& a, const CertifiedPatch& b, double rho,
                               const ComponentOptions& options = {});

/// Patch in parent's frame built from one of its refinement slabs.
CertifiedPatch patch_from_slab(const CertifiedPatch& parent, const GraphSlab& slab, double rho);

/// Refines a patch over its own base with the refined graph variant.
std::vector<CertifiedPatch> refine_patch(const CertifiedPatch& patch, double rho, double min_base_radius);

/// Re-runs the stored Krawczyk test.
bool reverify(const CertifiedPatch& patch);

}  // namespace certsurf
