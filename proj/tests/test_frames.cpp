#include <cmath>
#include <random>

#include "certsurf/frames.hpp"
#include "certsurf/parser.hpp"
#include "doctest.h"

using namespace certsurf;

namespace {
AnalyticSystem make(const std::string& src) {
  ParsedSystem ps = parse_system(src, std::vector<std::string>{"x", "y", "z"});
  return AnalyticSystem(ps.equations, 3, 2, ps.variables);
}
Eigen::VectorXd v3(double a, double b, double c) { return (Eigen::VectorXd(3) << a, b, c).finished(); }

FramePtr rotation_z(double angle) {
  Eigen::MatrixXd R(3, 3);
  R << std::cos(angle), -std::sin(angle), 0, std::sin(angle), std::cos(angle), 0, 0, 0, 1;
  return CoordinateFrame::from_orthogonal(R, Eigen::MatrixXd::Identity(1, 1), 2);
}

OrientedBox cube(FramePtr f, const Eigen::VectorXd& world_center, double h) {
  Eigen::VectorXd c = f->V.transpose() * world_center;
  return OrientedBox{f, IntervalBox::around(c, h)};
}

FramePtr random_frame(std::mt19937_64& g) {
  std::uniform_int_distribution<int> seed(0, 1 << 30);
  std::srand(static_cast<unsigned>(seed(g)));
  Eigen::MatrixXd Q = Eigen::MatrixXd::Random(3, 3).householderQr().householderQ();
  return CoordinateFrame::from_orthogonal(Q, Eigen::MatrixXd::Identity(1, 1), 2);
}
}  // namespace

TEST_CASE("SVD frames of simple surfaces") {
  FramedSystem plane = unitary_transformation(make("z"), v3(0, 0, 0));
  // Any orthonormal kernel basis will do; the fiber axis is the normal.
  CHECK(std::fabs(std::fabs(plane.frame->V(2, 2)) - 1) < 1e-14);
  CHECK((plane.frame->V.transpose() * plane.frame->V - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
  CHECK(plane.z.norm() == 0.0);

  FramedSystem lin = unitary_transformation(make("x + y + z"), v3(0, 0, 0));
  Eigen::VectorXd fib = lin.frame->V.col(2);
  CHECK(std::fabs(std::fabs(fib.dot(Eigen::Vector3d::Ones().normalized())) - 1) < 1e-14);
  CHECK(std::fabs(std::fabs(lin.system.jacobian_sub_point(lin.z)(0, 0)) - std::sqrt(3.0)) < 1e-14);

  FramedSystem sph = unitary_transformation(make("x^2 + y^2 + z^2 - 1"), v3(0, 0, 1));
  CHECK(std::fabs(std::fabs(sph.frame->V(2, 2)) - 1) < 1e-14);
  CHECK(sph.frame->sigma[0] == doctest::Approx(2.0));
  CHECK(std::fabs(sph.system.eval_point(sph.z)[0]) < 1e-15);

  CHECK_THROWS_AS(unitary_transformation(make("x^2 + y^2 - z^2"), v3(0, 0, 0)), Error);
}

TEST_CASE("reference axes line the kernel up") {
  Eigen::MatrixXd ref = Eigen::MatrixXd::Identity(3, 2);
  FramedSystem f = unitary_transformation(make("x^2 + y^2 + z^2 - 1"), v3(0.1, 0.05, std::sqrt(1 - 0.0125)), &ref);
  CHECK(f.frame->V(0, 0) > 0.99);
  CHECK(f.frame->V(1, 1) > 0.99);
}

TEST_CASE("world hulls") {
  OrientedBox id{CoordinateFrame::identity(3, 2), IntervalBox::around(Eigen::VectorXd::Zero(3), 0.1)};
  CHECK(obox_to_world_hull(id) == id.local);

  Eigen::MatrixXd R(2, 2);
  R << std::sqrt(0.5), -std::sqrt(0.5), std::sqrt(0.5), std::sqrt(0.5);
  OrientedBox rot{CoordinateFrame::from_orthogonal(R, Eigen::MatrixXd::Identity(1, 1), 1),
                  IntervalBox{Interval(-0.5, 0.5), Interval(-0.5, 0.5)}};
  IntervalBox h = obox_to_world_hull(rot);
  CHECK(h[0].width() == doctest::Approx(std::sqrt(2.0)));

  OrientedBox pt{CoordinateFrame::identity(3, 2), IntervalBox::point(v3(1, 2, 3))};
  CHECK(obox_to_world_hull(pt) == pt.local);
}

TEST_CASE("separating axes") {
  FramePtr id = CoordinateFrame::identity(3, 2);
  CHECK(obox_disjoint(cube(id, v3(0, 0, 0), 0.5), cube(id, v3(3, 0, 0), 0.5)) == Separation::provably_disjoint);
  CHECK(obox_disjoint(cube(id, v3(0, 0, 0), 0.5), cube(id, v3(0, 0, 0), 0.5)) == Separation::possibly_intersecting);
  FramePtr r45 = rotation_z(M_PI / 4);
  // Rotated unit cube reaches sqrt(2)/2 along x; the gap is about 0.0029.
  CHECK(obox_disjoint(cube(id, v3(0, 0, 0), 0.5), cube(r45, v3(1.21, 0, 0), 0.5)) == Separation::provably_disjoint);
  CHECK(obox_disjoint(cube(id, v3(0, 0, 0), 0.5), cube(r45, v3(1.2, 0, 0), 0.5)) ==
        Separation::possibly_intersecting);
  // Touching faces are not disjoint.
  CHECK(obox_disjoint(cube(id, v3(0, 0, 0), 0.5), cube(id, v3(1, 0, 0), 0.5)) == Separation::possibly_intersecting);
}

TEST_CASE("containment") {
  FramePtr id = CoordinateFrame::identity(3, 2);
  OrientedBox big = cube(id, v3(0, 0, 0), 1);
  CHECK(obox_contains_worldbox(big, IntervalBox::around(v3(0, 0, 0), 0.5)));
  CHECK_FALSE(obox_contains_worldbox(big, IntervalBox{Interval(0.9, 1.1), Interval(0.9, 1.1), Interval(0.9, 1.1)}));
  FramePtr r = rotation_z(0.3);
  OrientedBox rb = cube(r, v3(0.2, 0.1, 0.3), 0.1);
  CHECK(obox_contains_point(rb, v3(0.2, 0.1, 0.3)));
  CHECK(obox_contains_local(big, *r, rb.local));
}

TEST_CASE("SAT soundness on random pairs") {
  std::mt19937_64 g(4242);
  std::uniform_real_distribution<double> u(-1, 1), uh(0.05, 0.5);
  int claimed = 0;
  for (int t = 0; t < 10000; ++t) {
    FramePtr fa = random_frame(g), fb = random_frame(g);
    OrientedBox a{fa, IntervalBox::around(fa->V.transpose() * Eigen::VectorXd::Zero(3),
                                          Eigen::Vector3d(uh(g), uh(g), uh(g)))};
    Eigen::VectorXd cb = v3(u(g), u(g), u(g));
    OrientedBox b{fb, IntervalBox::around(fb->V.transpose() * cb, Eigen::Vector3d(uh(g), uh(g), uh(g)))};
    if (obox_disjoint(a, b) != Separation::provably_disjoint) continue;
    ++claimed;
    // Points of a (corners, edge and face samples) must all lie outside b.
    for (int s = 0; s < 200; ++s) {
      Eigen::Vector3d w;
      for (int i = 0; i < 3; ++i) {
        double t01 = (s < 8) ? ((s >> i) & 1) : std::uniform_real_distribution<double>(0, 1)(g);
        if (s >= 8 && s % 3 == i) t01 = std::round(t01);
        w[i] = a.local[static_cast<std::size_t>(i)].lo() + t01 * a.local[static_cast<std::size_t>(i)].width();
      }
      Eigen::VectorXd p = fa->V * w;
      Eigen::VectorXd q = fb->V.transpose() * p;
      bool inside = true;
      for (int i = 0; i < 3; ++i) inside = inside && b.local[static_cast<std::size_t>(i)].contains(q[i]);
      CHECK_FALSE(inside);
    }
  }
  CHECK(claimed > 1000);
}

TEST_CASE("hull and round trip enclose sampled points") {
  std::mt19937_64 g(8);
  for (int t = 0; t < 200; ++t) {
    FramePtr f = random_frame(g);
    OrientedBox b{f, IntervalBox::around(Eigen::VectorXd::Random(3), 0.2)};
    IntervalBox hull = obox_to_world_hull(b);
    for (const auto& c : b.corners()) {
      CHECK(contains(hull, c));
      IntervalBox back = to_frame(*f, IntervalBox::point(c));
      CHECK(contains(b.local.inflate(1e-12), back));
    }
  }
}
