#include "certsurf/frames.hpp"

#include "certsurf/linalg.hpp"

#include <Eigen/SVD>

namespace certsurf {

std::shared_ptr<const CoordinateFrame> CoordinateFrame::identity(std::size_t n, std::size_t d) {
  auto f = std::make_shared<CoordinateFrame>();
  const auto N = static_cast<Eigen::Index>(n);
  const auto M = static_cast<Eigen::Index>(n - d);
  f->V = Eigen::MatrixXd::Identity(N, N);
  f->V_inv = IntervalMatrix::identity(n);
  f->U = Eigen::MatrixXd::Identity(M, M);
  f->sigma = Eigen::VectorXd::Zero(M);
  f->d = d;
  return f;
}

std::shared_ptr<const CoordinateFrame> CoordinateFrame::from_orthogonal(const Eigen::MatrixXd& V,
                                                                        const Eigen::MatrixXd& U, std::size_t d) {
  double defect = orthogonality_defect(V);
  if (!(defect < 0.5)) throw Error("frame matrix is far from orthogonal");
  auto f = std::make_shared<CoordinateFrame>();
  f->V = V;
  f->V_inv = enclose_inverse_orthogonal(V, defect);
  f->U = U;
  f->sigma = Eigen::VectorXd::Zero(U.rows());
  f->d = d;
  return f;
}

FramedSystem unitary_transformation(const AnalyticSystem& system, const Eigen::VectorXd& z,
                                    const Eigen::MatrixXd* reference) {
  if (system.is_transformed()) throw std::invalid_argument("unitary_transformation expects world coordinates");
  const std::size_t n = system.n(), d = system.d(), m = system.m();
  SvdResult s = svd(system.jacobian_point(z));
  // Columns of V: kernel vectors first (base), then singular directions.
  Eigen::MatrixXd vfull = s.Vt.transpose();
  Eigen::MatrixXd V(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  V.leftCols(static_cast<Eigen::Index>(d)) = vfull.rightCols(static_cast<Eigen::Index>(d));
  V.rightCols(static_cast<Eigen::Index>(m)) = vfull.leftCols(static_cast<Eigen::Index>(m));
  if (reference && d > 0) {
    if (reference->rows() != V.rows() || static_cast<std::size_t>(reference->cols()) != d)
      throw std::invalid_argument("reference axes have the wrong shape");
    // Orthogonal Procrustes: the rotation Q of the kernel basis K closest to
    // the reference is the polar factor of K^T R.
    Eigen::MatrixXd K = V.leftCols(static_cast<Eigen::Index>(d));
    Eigen::JacobiSVD<Eigen::MatrixXd> p(K.transpose() * *reference, Eigen::ComputeFullU | Eigen::ComputeFullV);
    V.leftCols(static_cast<Eigen::Index>(d)) = K * (p.matrixU() * p.matrixV().transpose());
  }

  FramedSystem out{system.transform(s.U, V), Eigen::VectorXd(V.transpose() * z), nullptr};
  auto f = std::make_shared<CoordinateFrame>();
  f->V = out.system.V();
  f->V_inv = enclose_inverse_orthogonal(f->V, orthogonality_defect(f->V));
  f->U = s.U;
  f->sigma = s.singular_values;
  f->d = d;
  out.frame = std::move(f);
  return out;
}

std::vector<Eigen::VectorXd> OrientedBox::corners() const {
  const std::size_t k = n();
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t{1} << k);
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) u[static_cast<Eigen::Index>(i)] = (mask >> i) & 1 ? local[i].hi() : local[i].lo();
    out.push_back(frame->V * u);
  }
  return out;
}

IntervalBox obox_to_world_hull(const OrientedBox& b) { return mul(b.frame->V, b.local); }

namespace {

// Enclosure of {L . V u : u in local}.
Interval project(const Eigen::VectorXd& L, const OrientedBox& b) {
  const Eigen::MatrixXd& V = b.frame->V;
  Interval acc(0.0);
  for (Eigen::Index i = 0; i < V.cols(); ++i) {
    Interval coeff(0.0);
    for (Eigen::Index j = 0; j < V.rows(); ++j) coeff += Interval(L[j]) * Interval(V(j, i));
    acc += coeff * b.local[static_cast<std::size_t>(i)];
  }
  return acc;
}

bool separates(const Eigen::VectorXd& L, const OrientedBox& a, const OrientedBox& b) {
  if (!(L.squaredNorm() > 1e-24)) return false;
  Interval pa = project(L, a), pb = project(L, b);
  return pa.hi() < pb.lo() || pb.hi() < pa.lo();
}

}  // namespace

Separation obox_disjoint(const OrientedBox& a, const OrientedBox& b) {
  if (a.n() != b.n()) throw std::invalid_argument("oriented boxes of different dimension");
  if (disjoint(obox_to_world_hull(a), obox_to_world_hull(b))) return Separation::provably_disjoint;
  const Eigen::MatrixXd& Va = a.frame->V;
  const Eigen::MatrixXd& Vb = b.frame->V;
  for (Eigen::Index i = 0; i < Va.cols(); ++i)
    if (separates(Va.col(i), a, b)) return Separation::provably_disjoint;
  for (Eigen::Index i = 0; i < Vb.cols(); ++i)
    if (separates(Vb.col(i), a, b)) return Separation::provably_disjoint;
  if (a.n() == 3) {
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) {
        Eigen::Vector3d u = Va.col(i), v = Vb.col(j);
        Eigen::VectorXd L = u.cross(v);
        if (separates(L, a, b)) return Separation::provably_disjoint;
      }
  }
  return Separation::possibly_intersecting;
}

IntervalBox to_frame(const CoordinateFrame& frame, const IntervalBox& world) { return mul(frame.V_inv, world); }

bool obox_contains_worldbox(const OrientedBox& outer, const IntervalBox& inner) {
  if (inner.is_empty()) return true;
  return contains(outer.local, to_frame(*outer.frame, inner));
}

bool obox_contains_local(const OrientedBox& outer, const CoordinateFrame& inner_frame, const IntervalBox& inner) {
  if (inner.is_empty()) return true;
  if (&inner_frame == outer.frame.get()) return contains(outer.local, inner);
  IntervalMatrix M = mul(outer.frame->V_inv, inner_frame.V);
  return contains(outer.local, mul(M, inner));
}

bool obox_contains_point(const OrientedBox& outer, const Eigen::VectorXd& p) {
  return obox_contains_worldbox(outer, IntervalBox::point(p));
}

}  // namespace certsurf
