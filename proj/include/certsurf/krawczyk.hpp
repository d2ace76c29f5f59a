#pragma once

#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "certsurf/interval.hpp"
#include "certsurf/system.hpp"

namespace certsurf {

/// Inputs of the interval Krawczyk test.  The tested region is
/// I = x^ + base_radii [-1,1] (base coordinates) times
/// J = y^ + fiber_radius [-1,1]^{n-d} (fiber coordinates), where
/// (x^, y^) = center in the system's frame.
struct KrawczykInput {
  Eigen::VectorXd center;
  Eigen::VectorXd base_radii;  ///< length d; zero pins a coordinate
  double fiber_radius = 0;
  Eigen::MatrixXd A;  ///< (n-d) x (n-d) preconditioner
  double rho = 0.5;

  static KrawczykInput uniform(const Eigen::VectorXd& center, std::size_t d, double r1, double r2,
                               const Eigen::MatrixXd& A, double rho);
  IntervalBox base_box(std::size_t d) const;
  IntervalBox fiber_box(std::size_t d) const;
  /// Throws std::invalid_argument unless 0 < rho < 1, radii are valid and A
  /// is nonsingular.
  void validate(std::size_t n, std::size_t d) const;
};

struct KrawczykCertificate {
  bool passed = false;
  IntervalBox K;  ///< empty when evaluation failed
  double norm_K = std::numeric_limits<double>::infinity();
  /// r2*rho (rounded down) minus ||K|| (rounded up), rounded down.
  double margin = -std::numeric_limits<double>::infinity();
  std::string error;  ///< nonempty when evaluation hit a domain error
};

/// K = -A F(I, y^) + (Id - A J_F(I, J)) (J - y^); passes iff ||K|| < r2 rho.
/// A pass proves that for every base point x in I there is exactly one y in
/// J with F(x, y) = 0, and that ||y - y^|| <= r2 rho.
KrawczykCertificate krawczyk_test(const AnalyticSystem& system, const KrawczykInput& input);

/// Inverse of the point fiber sub-Jacobian at z (the usual preconditioner).
Eigen::MatrixXd choose_A(const AnalyticSystem& system, const Eigen::VectorXd& z);

struct FiberRoot {
  Eigen::VectorXd y;       ///< midpoint of the final enclosure
  IntervalBox enclosure;   ///< contains the unique fiber root
  int iterations = 0;
};

struct RefineOptions {
  int max_iterations = 60;
  int stall_limit = 4;
};

/// Contracts J0 around the unique zero of y -> F(x, y) with the square
/// Krawczyk iteration J <- K(J) ∩ J until the radius is at most `accuracy`
/// (never below a few ulps of |y|).  Requires a certified unique root in J0.
/// Throws Error when the enclosure empties or stops shrinking.
FiberRoot refine_fiber_root(const AnalyticSystem& system, const Eigen::VectorXd& base_point,
                            const IntervalBox& J0, double accuracy, const RefineOptions& options = {});

/// Damped Newton on y -> F(x, y) from y0 (non-rigorous).  Steps longer than
/// max_step are rejected.  Returns nullopt when it fails to converge.
std::optional<Eigen::VectorXd> newton_fiber(const AnalyticSystem& system, const Eigen::VectorXd& base_point,
                                            const Eigen::VectorXd& y0,
                                            double max_step = std::numeric_limits<double>::infinity(),
                                            int max_iterations = 60);

}  // namespace certsurf
