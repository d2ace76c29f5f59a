#include "certsurf/krawczyk.hpp"

#include <cmath>

#include "certsurf/linalg.hpp"

namespace certsurf {

using rounding::mul_down;
using rounding::sub_down;

KrawczykInput KrawczykInput::uniform(const Eigen::VectorXd& center, std::size_t d, double r1, double r2,
                                     const Eigen::MatrixXd& A, double rho) {
  KrawczykInput in;
  in.center = center;
  in.base_radii = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), r1);
  in.fiber_radius = r2;
  in.A = A;
  in.rho = rho;
  return in;
}

IntervalBox KrawczykInput::base_box(std::size_t d) const {
  return IntervalBox::around(center.head(static_cast<Eigen::Index>(d)), base_radii);
}

IntervalBox KrawczykInput::fiber_box(std::size_t d) const {
  return IntervalBox::around(center.tail(center.size() - static_cast<Eigen::Index>(d)), fiber_radius);
}

void KrawczykInput::validate(std::size_t n, std::size_t d) const {
  const auto m = static_cast<Eigen::Index>(n - d);
  if (static_cast<std::size_t>(center.size()) != n) throw std::invalid_argument("center has wrong dimension");
  if (static_cast<std::size_t>(base_radii.size()) != d)
    throw std::invalid_argument("base radii have wrong dimension");
  if (!center.allFinite()) throw std::invalid_argument("center is not finite");
  for (Eigen::Index i = 0; i < base_radii.size(); ++i)
    if (!(base_radii[i] >= 0) || !std::isfinite(base_radii[i]))
      throw std::invalid_argument("base radius must be nonnegative");
  if (!(fiber_radius > 0) || !std::isfinite(fiber_radius))
    throw std::invalid_argument("fiber radius must be positive");
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must lie in (0, 1)");
  if (A.rows() != m || A.cols() != m) throw std::invalid_argument("A has wrong shape");
  if (!A.allFinite() || !Eigen::FullPivLU<Eigen::MatrixXd>(A).isInvertible())
    throw std::invalid_argument("A must be invertible");
}

KrawczykCertificate krawczyk_test(const AnalyticSystem& system, const KrawczykInput& input) {
  const std::size_t n = system.n(), d = system.d(), m = system.m();
  input.validate(n, d);
  KrawczykCertificate cert;
  try {
    const Eigen::VectorXd y_hat = input.center.tail(static_cast<Eigen::Index>(m));
    IntervalBox I = input.base_box(d);
    IntervalBox J = input.fiber_box(d);
    IntervalBox f = system.eval_box_centered(I.concat(IntervalBox::point(y_hat)));
    IntervalMatrix jac = system.jacobian_sub_box(I, J);
    IntervalMatrix contraction = sub(IntervalMatrix::identity(m), mul(input.A, jac));
    IntervalBox offset(m);
    for (std::size_t i = 0; i < m; ++i) offset[i] = Interval(-input.fiber_radius, input.fiber_radius);
    cert.K = -mul(input.A, f) + mul(contraction, offset);
    cert.norm_K = cert.K.norm();
    const double threshold = mul_down(input.fiber_radius, input.rho);
    cert.passed = cert.norm_K < threshold;
    cert.margin = sub_down(threshold, cert.norm_K);
  } catch (const DomainError& e) {
    cert = KrawczykCertificate{};
    cert.error = e.what();
  }
  return cert;
}

Eigen::MatrixXd choose_A(const AnalyticSystem& system, const Eigen::VectorXd& z) {
  return approx_inverse(system.jacobian_sub_point(z));
}

FiberRoot refine_fiber_root(const AnalyticSystem& system, const Eigen::VectorXd& base_point,
                            const IntervalBox& J0, double accuracy, const RefineOptions& options) {
  const std::size_t d = system.d(), m = system.m();
  if (static_cast<std::size_t>(base_point.size()) != d || J0.size() != m)
    throw std::invalid_argument("refine_fiber_root: dimension mismatch");
  IntervalBox J = J0;
  IntervalBox x = IntervalBox::point(base_point);
  double best = J.max_radius();
  int stalls = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd y = J.midpoint();
    Eigen::VectorXd z(static_cast<Eigen::Index>(d + m));
    z << base_point, y;
    Eigen::MatrixXd A = approx_inverse(system.jacobian_sub_point(z));
    IntervalBox yb = IntervalBox::point(y);
    IntervalBox g = system.eval_box(x.concat(yb));
    IntervalMatrix jac = system.jacobian_sub_box(x, J);
    IntervalMatrix contraction = sub(IntervalMatrix::identity(m), mul(A, jac));
    IntervalBox K = yb - mul(A, g) + mul(contraction, J - yb);
    IntervalBox next = intersect(K, J);
    if (next.is_empty()) throw Error("refinement found no root in the enclosure");
    J = next;

    const double floor = 8 * std::numeric_limits<double>::epsilon() * (1.0 + y.cwiseAbs().maxCoeff());
    const double rad = J.max_radius();
    if (rad <= std::max(accuracy, floor)) return {J.midpoint(), J, it};
    if (rad < best * (1 - 1e-3)) {
      best = rad;
      stalls = 0;
    } else if (++stalls >= options.stall_limit) {
      throw Error("refinement stalled; increase precision");
    }
  }
  throw Error("refinement stalled; increase precision");
}

std::optional<Eigen::VectorXd> newton_fiber(const AnalyticSystem& system, const Eigen::VectorXd& base_point,
                                            const Eigen::VectorXd& y0, double max_step, int max_iterations) {
  const auto d = base_point.size();
  const auto m = y0.size();
  Eigen::VectorXd z(d + m);
  z << base_point, y0;
  try {
    Eigen::VectorXd f = system.eval_point(z);
    double res = f.norm();
    for (int it = 0; it < max_iterations; ++it) {
      if (res == 0.0) return z.tail(m);
      Eigen::MatrixXd jac = system.jacobian_sub_point(z);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
      if (!lu.isInvertible()) return std::nullopt;
      Eigen::VectorXd step = lu.solve(f);
      double t = 1.0;
      bool accepted = false;
      for (int k = 0; k < 30; ++k, t *= 0.5) {
        Eigen::VectorXd trial = z;
        trial.tail(m) -= t * step;
        Eigen::VectorXd ft = system.eval_point(trial);
        double rt = ft.norm();
        if (std::isfinite(rt) && (rt < res || (rt <= res && t * step.norm() == 0.0))) {
          z = trial;
          f = ft;
          res = rt;
          accepted = true;
          break;
        }
      }
      if ((z.tail(m) - y0).norm() > max_step) return std::nullopt;
      const double tiny = 4 * std::numeric_limits<double>::epsilon() * (1.0 + z.tail(m).norm());
      if (!accepted || step.norm() <= tiny) {
        // Converged when no further decrease is possible at a small residual.
        Eigen::MatrixXd jn = system.jacobian_sub_point(z);
        double scale = jn.norm() * (1.0 + z.norm());
        if (res <= 1e-10 * std::max(scale, 1.0)) return z.tail(m);
        return std::nullopt;
      }
    }
    Eigen::MatrixXd jn = system.jacobian_sub_point(z);
    if (res <= 1e-10 * std::max(jn.norm() * (1.0 + z.norm()), 1.0)) return z.tail(m);
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace certsurf
