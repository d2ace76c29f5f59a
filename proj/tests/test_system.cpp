#include <cmath>
#include <random>

#include "certsurf/parser.hpp"
#include "certsurf/system.hpp"
#include "doctest.h"

using namespace certsurf;

namespace {
AnalyticSystem make(const std::string& src) {
  ParsedSystem ps = parse_system(src, std::vector<std::string>{"x", "y", "z"});
  return AnalyticSystem(ps.equations, 3, 3 - ps.equations.size(), ps.variables);
}
Eigen::VectorXd v3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}
}  // namespace

TEST_CASE("point and box evaluation of the worked examples") {
  AnalyticSystem sphere = make("x^2 + y^2 + z^2 - 1");
  CHECK(sphere.eval_point(v3(0, 0, 1))[0] == 0.0);
  IntervalBox b{Interval(-0.05, 0.05), Interval(-0.05, 0.05), Interval(1)};
  IntervalBox r = sphere.eval_box(b);
  CHECK(r[0].lo() == 0.0);
  CHECK(r[0].hi() >= 0.005);
  CHECK(r[0].hi() <= 0.005 + 1e-15);

  AnalyticSystem torus = make("(sqrt(x^2 + y^2) - 2)^2 + z^2 - 0.64");
  CHECK(std::fabs(torus.eval_point(v3(2.8, 0, 0))[0]) < 1e-15);
}

TEST_CASE("Jacobians") {
  AnalyticSystem plane = make("z");
  IntervalBox any{Interval(-3, 2), Interval(0, 1), Interval(5, 6)};
  IntervalMatrix J = plane.jacobian_sub_box(any.slice(0, 2), any.slice(2, 1));
  CHECK(J(0, 0) == Interval(1));

  AnalyticSystem sphere = make("x^2 + y^2 + z^2 - 1");
  IntervalMatrix Js = sphere.jacobian_sub_box(IntervalBox{Interval(-0.05, 0.05), Interval(-0.05, 0.05)},
                                              IntervalBox{Interval(0.95, 1.05)});
  CHECK(Js(0, 0).lo() <= 1.9);
  CHECK(Js(0, 0).lo() >= 1.9 - 1e-15);
  CHECK(Js(0, 0).hi() >= 2.1);
  CHECK(Js(0, 0).hi() <= 2.1 + 1e-15);

  AnalyticSystem lin = make("x + y + z");
  IntervalMatrix Jl = lin.jacobian_box(any);
  for (std::size_t j = 0; j < 3; ++j) CHECK(Jl(0, j) == Interval(1));
}

TEST_CASE("transforms") {
  AnalyticSystem sphere = make("x^2 + y^2 + z^2 - 1");
  Eigen::MatrixXd I3 = Eigen::MatrixXd::Identity(3, 3), I1 = Eigen::MatrixXd::Identity(1, 1);
  AnalyticSystem same = sphere.transform(I1, I3);
  CHECK(same.eval_point(v3(0.2, 0.3, 0.4))[0] == doctest::Approx(sphere.eval_point(v3(0.2, 0.3, 0.4))[0]));

  AnalyticSystem lin = make("x + y + z");
  // Orthogonal V whose first column is (1,1,1)/sqrt(3).
  Eigen::Vector3d a = Eigen::Vector3d::Ones().normalized();
  Eigen::Vector3d b = Eigen::Vector3d(1, -1, 0).normalized();
  Eigen::Vector3d c = a.cross(b);
  Eigen::MatrixXd V(3, 3);
  V << a, b, c;
  AnalyticSystem t = lin.transform(I1, V);
  Eigen::MatrixXd J = t.jacobian_point(Eigen::VectorXd::Zero(3));
  CHECK(J(0, 0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(std::fabs(J(0, 1)) < 1e-15);
  CHECK(std::fabs(J(0, 2)) < 1e-15);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3) * 2;
  CHECK_THROWS_AS(lin.transform(I1, bad), Error);
}

TEST_CASE("box evaluations enclose sampled values in a rotated frame") {
  AnalyticSystem torus = make("(sqrt(x^2 + y^2) - 2)^2 + z^2 - 0.64");
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Random(3, 3).householderQr().householderQ();
    AnalyticSystem t = torus.transform(Eigen::MatrixXd::Identity(1, 1), Q);
    Eigen::VectorXd c = Q.transpose() * v3(2.8 + 0.1 * u(g), 0.1 * u(g), 0.1 * u(g));
    IntervalBox box = IntervalBox::around(c, 0.05);
    IntervalBox nat = t.eval_box(box), cen = t.eval_box_centered(box);
    IntervalMatrix J = t.jacobian_box(box);
    for (int s = 0; s < 40; ++s) {
      Eigen::VectorXd p = c + 0.05 * Eigen::VectorXd::Random(3);
      double f = t.eval_point(p)[0];
      CHECK(nat[0].contains(f));
      CHECK(cen[0].contains(f));
      Eigen::MatrixXd Jp = t.jacobian_point(p);
      for (Eigen::Index j = 0; j < 3; ++j) CHECK(J(0, static_cast<std::size_t>(j)).contains(Jp(0, j)));
    }
    CHECK(cen[0].width() <= nat[0].width());
  }
}
