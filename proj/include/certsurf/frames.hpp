#pragma once

#include <memory>

#include <Eigen/Dense>

#include "certsurf/interval.hpp"
#include "certsurf/system.hpp"

namespace certsurf {

/// Orthogonal change of coordinates z = V z~.  The first d frame axes span
/// the (approximate) tangent space, the last n-d the normal space.
struct CoordinateFrame {
  Eigen::MatrixXd V;             ///< world <- frame
  IntervalMatrix V_inv;          ///< rigorous enclosure of V^-1 (frame <- world)
  Eigen::MatrixXd U;             ///< output mixing, (n-d) x (n-d)
  Eigen::VectorXd sigma;         ///< singular values at the frame's point
  std::size_t d = 0;

  std::size_t n() const { return static_cast<std::size_t>(V.rows()); }
  static std::shared_ptr<const CoordinateFrame> identity(std::size_t n, std::size_t d);
  /// Frame for an orthogonal V; the inverse enclosure uses its measured defect.
  static std::shared_ptr<const CoordinateFrame> from_orthogonal(const Eigen::MatrixXd& V, const Eigen::MatrixXd& U,
                                                                std::size_t d);
};

using FramePtr = std::shared_ptr<const CoordinateFrame>;

struct FramedSystem {
  AnalyticSystem system;  ///< evaluates U^T F(V z~)
  Eigen::VectorXd z;      ///< the input point in frame coordinates
  FramePtr frame;
};

/// SVD frame at the world point z: fiber axes along the right singular
/// vectors, base axes spanning the kernel of J_F(z).  `system` must be
/// untransformed.  Throws RankDeficientError when J_F(z) is near singular.
///
/// The kernel basis is only determined up to rotation; when `reference`
/// (n x d, world) is given it is rotated to match those axes as closely as
/// possible, so neighboring patches tile like a grid.
FramedSystem unitary_transformation(const AnalyticSystem& system, const Eigen::VectorXd& z,
                                    const Eigen::MatrixXd* reference = nullptr);

/// Box aligned with a frame: the world point set {V u : u in local}.
struct OrientedBox {
  FramePtr frame;
  IntervalBox local;  ///< n-dimensional, frame coordinates

  std::size_t n() const { return local.size(); }
  Eigen::VectorXd center() const { return local.midpoint(); }
  IntervalBox base() const { return local.slice(0, frame->d); }
  IntervalBox fiber() const { return local.slice(frame->d, n() - frame->d); }
  /// World coordinates of the 2^n corners, as doubles (not rigorous).
  std::vector<Eigen::VectorXd> corners() const;
};

/// Axis-aligned rigorous enclosure of the box in world coordinates.
IntervalBox obox_to_world_hull(const OrientedBox& b);

enum class Separation { provably_disjoint, possibly_intersecting };

/// Separating-axis test.  In R^3 the 15 candidate axes (face normals and
/// edge cross products) are tried; in higher dimension only the world hulls
/// and the face normals.  Projections are enclosed with outward rounding, so
/// provably_disjoint is sound and touching boxes count as intersecting.
Separation obox_disjoint(const OrientedBox& a, const OrientedBox& b);

/// Rigorous enclosure of a world box in the frame's coordinates.
IntervalBox to_frame(const CoordinateFrame& frame, const IntervalBox& world);

/// True only if the world box provably lies inside `outer`.
bool obox_contains_worldbox(const OrientedBox& outer, const IntervalBox& inner);

/// True only if the frame-local box `inner` (in inner_frame) provably lies
/// inside `outer`.  Uses the product V_outer^-1 V_inner directly.
bool obox_contains_local(const OrientedBox& outer, const CoordinateFrame& inner_frame, const IntervalBox& inner);

/// True only if the world point provably lies inside the box.
bool obox_contains_point(const OrientedBox& outer, const Eigen::VectorXd& p);

}  // namespace certsurf
