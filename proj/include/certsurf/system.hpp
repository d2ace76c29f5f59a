#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "certsurf/expression.hpp"
#include "certsurf/interval.hpp"

namespace certsurf {

/// A system F = (f_1, ..., f_{n-d}) : R^n -> R^{n-d} whose zero set is a
/// d-dimensional variety, optionally viewed through an orthogonal change of
/// coordinates  F~(z~) = U* F(V z~).
///
/// The first d coordinates are the base, the last n-d the fiber.  All
/// evaluations take coordinates of the active frame.  Copies are cheap and
/// share the compiled expressions.
class AnalyticSystem {
 public:
  AnalyticSystem(std::vector<Expr> equations, std::size_t n, std::size_t d,
                 std::vector<std::string> names = {});

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::size_t m() const { return n_ - d_; }  ///< number of equations
  const std::vector<Expr>& equations() const;
  const std::vector<std::string>& names() const;
  /// Symbolic partial of equation i in variable j (untransformed).
  const Expr& partial(std::size_t i, std::size_t j) const;

  bool is_transformed() const { return transformed_; }
  /// world <- frame
  const Eigen::MatrixXd& V() const { return V_; }
  /// Output mixing U* applied to F.
  const Eigen::MatrixXd& Ut() const { return Ut_; }

  Eigen::VectorXd eval_point(const Eigen::VectorXd& z) const;
  /// Natural interval extension over a frame box.
  IntervalBox eval_box(const IntervalBox& box) const;
  /// Natural extension intersected with the mean-value form and the
  /// second-order Taylor form about the box midpoint.  Used by the Krawczyk
  /// operator: in a rotated frame the natural extension alone loses the
  /// cancellation along the tangent directions.
  IntervalBox eval_box_centered(const IntervalBox& box) const;

  Eigen::MatrixXd jacobian_point(const Eigen::VectorXd& z) const;
  IntervalMatrix jacobian_box(const IntervalBox& box) const;
  /// Fiber columns of the Jacobian over I x J: an m x m interval matrix.
  IntervalMatrix jacobian_sub_box(const IntervalBox& base, const IntervalBox& fiber) const;
  Eigen::MatrixXd jacobian_sub_point(const Eigen::VectorXd& z) const;

  /// Composes a further change of coordinates: the result evaluates
  /// U^T F_this(V z).  U is m x m, V is n x n; both must be orthogonal to
  /// within `defect_bound` (Error otherwise).
  AnalyticSystem transform(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                           double defect_bound = 1e-12) const;

 private:
  struct Compiled;
  IntervalBox to_world(const IntervalBox& box) const;
  IntervalBox second_order_form(const IntervalBox& box, const IntervalBox& center, const IntervalBox& delta) const;

  std::shared_ptr<const Compiled> core_;
  std::size_t n_;
  std::size_t d_;
  bool transformed_ = false;
  Eigen::MatrixXd V_;
  Eigen::MatrixXd Ut_;
};

}  // namespace certsurf
