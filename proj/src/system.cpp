#include "certsurf/system.hpp"

#include "certsurf/linalg.hpp"

namespace certsurf {

struct AnalyticSystem::Compiled {
  std::vector<Expr> equations;
  std::vector<std::string> names;
  std::vector<Expr> partials;  // row-major m x n
  std::vector<Expr> second;    // [i][j][k] = d2 f_i / dz_j dz_k
  Tape f;
  Tape jac;
  Tape hess;
};

AnalyticSystem::AnalyticSystem(std::vector<Expr> equations, std::size_t n, std::size_t d,
                               std::vector<std::string> names)
    : n_(n), d_(d) {
  if (d > n) throw std::invalid_argument("base dimension exceeds ambient dimension");
  if (equations.size() != n - d)
    throw std::invalid_argument("expected " + std::to_string(n - d) + " equations, got " +
                                std::to_string(equations.size()));
  for (const auto& e : equations)
    if (max_variable_index(e) > n) throw std::invalid_argument("equation uses a variable index >= n");
  auto core = std::make_shared<Compiled>();
  core->equations = std::move(equations);
  core->names = std::move(names);
  for (const auto& e : core->equations)
    for (std::size_t j = 0; j < n; ++j) core->partials.push_back(differentiate(e, j));
  for (std::size_t i = 0; i < core->equations.size(); ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        core->second.push_back(k < j ? core->second[i * n * n + k * n + j]
                                     : differentiate(core->partials[i * n + j], k));
  core->f = Tape(core->equations);
  core->jac = Tape(core->partials);
  core->hess = Tape(core->second);
  core_ = std::move(core);
  V_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Ut_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m()), static_cast<Eigen::Index>(m()));
}

const std::vector<Expr>& AnalyticSystem::equations() const { return core_->equations; }
const std::vector<std::string>& AnalyticSystem::names() const { return core_->names; }

const Expr& AnalyticSystem::partial(std::size_t i, std::size_t j) const {
  return core_->partials.at(i * n_ + j);
}

IntervalBox AnalyticSystem::to_world(const IntervalBox& box) const {
  if (box.size() != n_) throw std::invalid_argument("box dimension does not match the system");
  return transformed_ ? mul(V_, box) : box;
}

Eigen::VectorXd AnalyticSystem::eval_point(const Eigen::VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != n_)
    throw std::invalid_argument("point dimension does not match the system");
  Eigen::VectorXd w = transformed_ ? Eigen::VectorXd(V_ * z) : z;
  Eigen::VectorXd f(static_cast<Eigen::Index>(m()));
  core_->f.eval(std::span<const double>(w.data(), n_), std::span<double>(f.data(), m()));
  return transformed_ ? Eigen::VectorXd(Ut_ * f) : f;
}

IntervalBox AnalyticSystem::eval_box(const IntervalBox& box) const {
  IntervalBox w = to_world(box);
  IntervalBox f(m());
  std::vector<Interval> out(m());
  core_->f.eval(w.components(), out);
  f = IntervalBox(std::move(out));
  return transformed_ ? mul(Ut_, f) : f;
}

IntervalBox AnalyticSystem::eval_box_centered(const IntervalBox& box) const {
  IntervalBox r = eval_box(box);
  Eigen::VectorXd c = box.midpoint();
  IntervalBox center = IntervalBox::point(c);
  IntervalBox delta = box - center;
  // The derivative forms may hit domain errors where F itself does not
  // (1/sqrt near the axis of a torus); each is used only when it evaluates.
  try {
    r = intersect(r, eval_box(center) + mul(jacobian_box(box), delta));
  } catch (const DomainError&) {
  }
  try {
    r = intersect(r, second_order_form(box, center, delta));
  } catch (const DomainError&) {
  }
  // All forms enclose the same set; an empty meet would mean a bug.
  if (r.is_empty()) throw std::logic_error("disjoint enclosures of the same range");
  return r;
}

// G(c) + J_G(c) delta + 1/2 delta^T H_G(box) delta for G(z) = F(V z),
// then mixed by U^T.
IntervalBox AnalyticSystem::second_order_form(const IntervalBox& box, const IntervalBox& center,
                                              const IntervalBox& delta) const {
  const std::size_t m = this->m();
  IntervalBox wc = to_world(center);
  std::vector<Interval> gc(m), jc(m * n_), hb(m * n_ * n_);
  core_->f.eval(wc.components(), gc);
  core_->jac.eval(wc.components(), jc);
  core_->hess.eval(to_world(box).components(), hb);
  IntervalBox taylor(m);
  for (std::size_t i = 0; i < m; ++i) {
    IntervalMatrix J(1, n_), H(n_, n_);
    for (std::size_t j = 0; j < n_; ++j) J(0, j) = jc[i * n_ + j];
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < n_; ++k) H(j, k) = hb[(i * n_ + j) * n_ + k];
    if (transformed_) {
      J = mul(J, V_);
      H = mul(Eigen::MatrixXd(V_.transpose()), mul(H, V_));
    }
    Interval acc = gc[i];
    for (std::size_t j = 0; j < n_; ++j) {
      acc += J(0, j) * delta[j];
      acc += Interval(0.5) * H(j, j) * square(delta[j]);
      for (std::size_t k = j + 1; k < n_; ++k) acc += H(j, k) * (delta[j] * delta[k]);
    }
    taylor[i] = acc;
  }
  return transformed_ ? mul(Ut_, taylor) : taylor;
}

Eigen::MatrixXd AnalyticSystem::jacobian_point(const Eigen::VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != n_)
    throw std::invalid_argument("point dimension does not match the system");
  Eigen::VectorXd w = transformed_ ? Eigen::VectorXd(V_ * z) : z;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> j(m(), n_);
  core_->jac.eval(std::span<const double>(w.data(), n_), std::span<double>(j.data(), m() * n_));
  if (!transformed_) return j;
  return Ut_ * j * V_;
}

IntervalMatrix AnalyticSystem::jacobian_box(const IntervalBox& box) const {
  IntervalBox w = to_world(box);
  IntervalMatrix j(m(), n_);
  std::vector<Interval> out(m() * n_);
  core_->jac.eval(w.components(), out);
  for (std::size_t i = 0; i < m(); ++i)
    for (std::size_t k = 0; k < n_; ++k) j(i, k) = out[i * n_ + k];
  if (!transformed_) return j;
  return mul(Ut_, mul(j, V_));
}

IntervalMatrix AnalyticSystem::jacobian_sub_box(const IntervalBox& base, const IntervalBox& fiber) const {
  if (base.size() != d_ || fiber.size() != m())
    throw std::invalid_argument("base/fiber dimensions do not match the system");
  IntervalBox box = base.concat(fiber);
  IntervalBox w = to_world(box);
  IntervalMatrix j(m(), n_);
  std::vector<Interval> out(m() * n_);
  core_->jac.eval(w.components(), out);
  for (std::size_t i = 0; i < m(); ++i)
    for (std::size_t k = 0; k < n_; ++k) j(i, k) = out[i * n_ + k];
  if (!transformed_) return j.columns(d_, m());
  Eigen::MatrixXd v_fiber = V_.rightCols(static_cast<Eigen::Index>(m()));
  return mul(Ut_, mul(j, v_fiber));
}

Eigen::MatrixXd AnalyticSystem::jacobian_sub_point(const Eigen::VectorXd& z) const {
  return jacobian_point(z).rightCols(static_cast<Eigen::Index>(m()));
}

AnalyticSystem AnalyticSystem::transform(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                                         double defect_bound) const {
  if (static_cast<std::size_t>(U.rows()) != m() || static_cast<std::size_t>(U.cols()) != m())
    throw std::invalid_argument("U must be (n-d) x (n-d)");
  if (static_cast<std::size_t>(V.rows()) != n_ || static_cast<std::size_t>(V.cols()) != n_)
    throw std::invalid_argument("V must be n x n");
  double du = orthogonality_defect(U);
  double dv = orthogonality_defect(V);
  if (!(du <= defect_bound) || !(dv <= defect_bound))
    throw Error("frame rejected: orthogonality defect " + std::to_string(std::max(du, dv)) +
                " exceeds bound");
  AnalyticSystem r = *this;
  r.transformed_ = true;
  r.V_ = V_ * V;
  r.Ut_ = U.transpose() * Ut_;
  return r;
}

}  // namespace certsurf
