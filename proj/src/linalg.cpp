#include "certsurf/linalg.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace certsurf {

using rounding::add_up;
using rounding::div_up;
using rounding::mul_up;
using rounding::sub_down;

double orthogonality_defect(const Eigen::MatrixXd& Q) {
  if (Q.rows() != Q.cols()) throw std::invalid_argument("orthogonality defect of a non-square matrix");
  const auto n = static_cast<std::size_t>(Q.cols());
  IntervalMatrix q = IntervalMatrix::from(Q);
  IntervalMatrix gram = mul(q.transpose(), q);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      Interval e = gram(i, j) - Interval(i == j ? 1.0 : 0.0);
      row = add_up(row, e.mag());
    }
    worst = std::max(worst, row);
  }
  return worst;
}

SvdResult svd(const Eigen::MatrixXd& M, const SvdOptions& options) {
  if (M.rows() > M.cols()) throw std::invalid_argument("svd expects a wide (m <= n) matrix");
  if (!M.allFinite()) throw std::invalid_argument("svd of a matrix with non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r;
  r.U = solver.matrixU();
  r.singular_values = solver.singularValues();
  r.Vt = solver.matrixV().transpose();

  const Eigen::Index m = M.rows();
  if (m > 0) {
    double smax = r.singular_values[0];
    double smin = r.singular_values[m - 1];
    if (!(smin > options.rank_tolerance * smax) || smax == 0.0)
      throw RankDeficientError("Jacobian numerically rank-deficient (sigma_min = " + std::to_string(smin) +
                               ", sigma_max = " + std::to_string(smax) + ")");
  }

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(m, M.cols());
  for (Eigen::Index i = 0; i < m; ++i) sigma(i, i) = r.singular_values[i];
  Eigen::MatrixXd recon = r.U * sigma * r.Vt;
  double scale = M.cwiseAbs().rowwise().sum().maxCoeff();
  double resid = (M - recon).cwiseAbs().rowwise().sum().maxCoeff();
  if (resid > 1e-10 * std::max(scale, 1e-300)) throw Error("svd reconstruction residual too large");

  r.orthogonality_defect =
      std::max(orthogonality_defect(r.U), orthogonality_defect(Eigen::MatrixXd(r.Vt.transpose())));
  if (!(r.orthogonality_defect <= options.defect_bound))
    throw Error("svd factors fail the orthogonality gate");
  return r;
}

Eigen::MatrixXd approx_inverse(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("inverse of a non-square matrix");
  if (!M.allFinite()) throw Error("inverse of a matrix with non-finite entries");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw Error("matrix singular to working precision");
  return lu.inverse();
}

IntervalMatrix enclose_inverse_orthogonal(const Eigen::MatrixXd& V, double defect) {
  if (!(defect >= 0.0) || defect >= 1.0) throw Error("orthogonality defect must lie in [0, 1)");
  if (V.rows() != V.cols()) throw std::invalid_argument("inverse enclosure of a non-square matrix");
  Eigen::MatrixXd vt = V.transpose();
  IntervalMatrix r = IntervalMatrix::from(vt);
  if (defect == 0.0) return r;
  double norm = 0.0;
  for (Eigen::Index i = 0; i < vt.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < vt.cols(); ++j) s = add_up(s, std::fabs(vt(i, j)));
    norm = std::max(norm, s);
  }
  double slack = mul_up(norm, div_up(defect, sub_down(1.0, defect)));
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) {
      double v = vt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      r(i, j) = Interval(rounding::sub_down(v, slack), add_up(v, slack));
    }
  return r;
}

}  // namespace certsurf
