#include <cmath>
#include <cstdio>
#include <random>

#include "certsurf/krawczyk.hpp"
#include "certsurf/parser.hpp"
#include "doctest.h"

using namespace certsurf;

namespace {
AnalyticSystem make(const std::string& src) {
  ParsedSystem ps = parse_system(src, std::vector<std::string>{"x", "y", "z"});
  return AnalyticSystem(ps.equations, 3, 2, ps.variables);
}
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
Eigen::MatrixXd scalar(double a) { return Eigen::MatrixXd::Constant(1, 1, a); }
}  // namespace

TEST_CASE("plane: K vanishes") {
  AnalyticSystem plane = make("z");
  auto in = KrawczykInput::uniform(vec({0, 0, 0}), 2, 0.1, 0.1, scalar(1), 0.125);
  KrawczykCertificate c = krawczyk_test(plane, in);
  CHECK(c.passed);
  CHECK(c.norm_K == 0.0);
  CHECK(c.margin > 0);
}

TEST_CASE("sphere at the pole: the hand-computed pair") {
  AnalyticSystem sphere = make("x^2 + y^2 + z^2 - 1");
  auto fail = krawczyk_test(sphere, KrawczykInput::uniform(vec({0, 0, 1}), 2, 0.1, 0.1, scalar(0.5), 0.125));
  CHECK_FALSE(fail.passed);
  CHECK(fail.norm_K >= 0.0199);
  CHECK(fail.norm_K <= 0.0201);
  CHECK(fail.margin < 0);

  auto pass = krawczyk_test(sphere, KrawczykInput::uniform(vec({0, 0, 1}), 2, 0.05, 0.05, scalar(0.5), 0.125));
  CHECK(pass.passed);
  CHECK(pass.norm_K >= 0.00499);
  CHECK(pass.norm_K <= 0.00501);
  CHECK(pass.K[0].lo() >= -0.005 - 1e-15);
  CHECK(pass.K[0].hi() <= 0.0025 + 1e-15);
  CHECK(pass.margin > 0);
}

TEST_CASE("choose_A is the inverse fiber derivative") {
  CHECK(choose_A(make("x^2 + y^2 + z^2 - 1"), vec({0, 0, 1}))(0, 0) == 0.5);
  CHECK(choose_A(make("z"), vec({0, 0, 0}))(0, 0) == 1.0);
  CHECK(choose_A(make("z^2 - 1"), vec({0, 0, 1}))(0, 0) == 0.5);
  CHECK_THROWS_AS(choose_A(make("z^2 - 1"), vec({0, 0, 0})), Error);
}

TEST_CASE("domain errors fail the test instead of passing it") {
  AnalyticSystem s = make("sqrt(z) - 0.1");
  auto c = krawczyk_test(s, KrawczykInput::uniform(vec({0, 0, 0.01}), 2, 0.1, 0.1, scalar(0.2), 0.5));
  CHECK_FALSE(c.passed);
  CHECK_FALSE(c.error.empty());
}

TEST_CASE("input validation") {
  AnalyticSystem plane = make("z");
  CHECK_THROWS_AS(krawczyk_test(plane, KrawczykInput::uniform(vec({0, 0, 0}), 2, 0.1, 0.1, scalar(1), 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(krawczyk_test(plane, KrawczykInput::uniform(vec({0, 0, 0}), 2, 0.1, -0.1, scalar(1), 0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(krawczyk_test(plane, KrawczykInput::uniform(vec({0, 0, 0}), 2, 0.1, 0.1, scalar(0), 0.5)),
                  std::invalid_argument);
}

TEST_CASE("refine_fiber_root examples") {
  AnalyticSystem plane = make("z");
  FiberRoot p = refine_fiber_root(plane, vec({0.03, -0.04}), IntervalBox{Interval(-0.1, 0.1)}, 1e-12);
  CHECK(p.y[0] == 0.0);

  AnalyticSystem sphere = make("x^2 + y^2 + z^2 - 1");
  FiberRoot a = refine_fiber_root(sphere, vec({0, 0}), IntervalBox{Interval(0.9, 1.1)}, 1e-8);
  CHECK(std::fabs(a.y[0] - 1) <= 1e-8);
  CHECK(a.enclosure[0].contains(1.0));
  FiberRoot b = refine_fiber_root(sphere, vec({0.03, 0.04}), IntervalBox{Interval(0.9, 1.1)}, 1e-14);
  const double exact = std::sqrt(1 - 0.0025);
  CHECK(std::fabs(b.y[0] - exact) <= 1e-14);
  CHECK(std::fabs(b.y[0] - 0.99874921777190884) <= 2e-16);
}

TEST_CASE("K shrinks with the base radius and is deterministic") {
  AnalyticSystem sphere = make("x^2 + y^2 + z^2 - 1");
  auto big = krawczyk_test(sphere, KrawczykInput::uniform(vec({0, 0, 1}), 2, 0.05, 0.05, scalar(0.5), 0.125));
  auto small = krawczyk_test(sphere, KrawczykInput::uniform(vec({0, 0, 1}), 2, 0.02, 0.05, scalar(0.5), 0.125));
  CHECK(contains(big.K, small.K));
  auto again = krawczyk_test(sphere, KrawczykInput::uniform(vec({0, 0, 1}), 2, 0.05, 0.05, scalar(0.5), 0.125));
  CHECK(again.K == big.K);
}

TEST_CASE("soundness spot-check on random quadrics") {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> u(-1, 1), ur(0.005, 0.2);
  const double rhos[] = {0.125, 0.25, 0.5, 0.875};
  int passing = 0, attempts = 0;
  while (passing < 200 && attempts < 20000) {
    ++attempts;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g*x^2 + %.17g*y^2 + %.17g*z^2 + %.17g*x*y + %.17g*x + %.17g*y + z + %.17g",
                  u(g), u(g), u(g), u(g), u(g), u(g), 0.1 * u(g));
    AnalyticSystem s = make(buf);
    Eigen::VectorXd x0 = 0.3 * Eigen::VectorXd::Random(2);
    auto y0 = newton_fiber(s, x0, vec({0.0}));
    if (!y0) continue;
    Eigen::VectorXd c(3);
    c << x0, *y0;
    Eigen::MatrixXd A;
    try {
      A = choose_A(s, c);
    } catch (const Error&) {
      continue;
    }
    const double r1 = ur(g), r2 = ur(g), rho = rhos[attempts % 4];
    KrawczykInput in = KrawczykInput::uniform(c, 2, r1, r2, A, rho);
    KrawczykCertificate cert = krawczyk_test(s, in);
    if (!cert.passed) continue;
    ++passing;
    const IntervalBox J = in.fiber_box(2);
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd xb = x0 + r1 * Eigen::VectorXd::Random(2);
      FiberRoot root = refine_fiber_root(s, xb, J, 1e-12);
      CHECK(contains(J, root.enclosure));
      CHECK(std::fabs(root.y[0] - (*y0)[0]) <= r2 * rho + 1e-8);
      CHECK(std::fabs(s.eval_point((Eigen::VectorXd(3) << xb, root.y).finished())[0]) < 1e-9);
    }
  }
  CHECK(passing == 200);
}
