#pragma once

#include <Eigen/Dense>

#include "certsurf/interval.hpp"

namespace certsurf {

/// The Jacobian is numerically rank deficient (X is singular near the point).
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

struct SvdResult {
  Eigen::MatrixXd U;                ///< m x m
  Eigen::VectorXd singular_values;  ///< length m, nonincreasing
  Eigen::MatrixXd Vt;               ///< n x n; rows m.. span the kernel
  double orthogonality_defect = 0;  ///< max of the defects of U and V, rounded up
};

struct SvdOptions {
  double rank_tolerance = 1e-8;   ///< relative: sigma_min > tol * sigma_max
  double defect_bound = 1e-12;
};

/// Full SVD of an m x n matrix with m <= n, with rank and orthogonality
/// gates.  Throws RankDeficientError or Error.
SvdResult svd(const Eigen::MatrixXd& M, const SvdOptions& options = {});

/// ||Q^T Q - I||_inf, computed in interval arithmetic and rounded up.
double orthogonality_defect(const Eigen::MatrixXd& Q);

/// Approximate inverse of a square matrix; Error when singular to working
/// precision.
Eigen::MatrixXd approx_inverse(const Eigen::MatrixXd& M);

/// Interval matrix rigorously containing V^{-1} for a nearly orthogonal V
/// with the given orthogonality defect: V^T inflated entrywise by
/// ||V^T||_inf * defect / (1 - defect).
IntervalMatrix enclose_inverse_orthogonal(const Eigen::MatrixXd& V, double defect);

}  // namespace certsurf
