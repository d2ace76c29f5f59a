#include <quadmath.h>

#include <cmath>
#include <random>

#include "certsurf/interval.hpp"
#include "doctest.h"

using namespace certsurf;

TEST_CASE("endpoint arithmetic") {
  CHECK(Interval(1, 2) + Interval(3, 4) == Interval(4, 6));
  CHECK(Interval(1, 2) * Interval(-3, 4) == Interval(-6, 8));
  CHECK(Interval(1, 2) - Interval(3, 4) == Interval(-3, -1));
  Interval p = pow(Interval(-0.05, 0.05), 2);
  CHECK(p.lo() == 0.0);
  CHECK(p.hi() >= 0.0025);
  CHECK(p.hi() <= std::nextafter(0.0025, 1.0));
  CHECK(square(Interval(-3, 2)) == Interval(0, 9));
  CHECK(pow(Interval(-2, 1), 3) == Interval(-8, 1));
}

TEST_CASE("division and sqrt domains") {
  CHECK_THROWS_AS(Interval(1) / Interval(-1, 1), DomainError);
  CHECK_FALSE(try_div(Interval(1), Interval(0, 1)).has_value());
  Interval q = Interval(1) / Interval(3);
  CHECK(q.lo() < q.hi());
  CHECK(q.lo() <= 1.0 / 3.0);
  CHECK(q.hi() >= 1.0 / 3.0);
  CHECK_THROWS_AS(sqrt(Interval(-2, -1)), DomainError);
  CHECK(sqrt(Interval(4)).contains(2.0));
  CHECK(sqrt(Interval(2)).lo() <= std::sqrt(2.0));
}

TEST_CASE("norms, hull, intersection") {
  CHECK(IntervalBox{Interval(-3, 2)}.norm() == 3.0);
  CHECK(IntervalBox{Interval(0), Interval(0)}.norm() == 0.0);
  CHECK(IntervalBox{Interval(-0.02, 0.01)}.norm() == 0.02);
  CHECK(intersect(Interval(0, 2), Interval(1, 3)) == Interval(1, 2));
  CHECK(intersect(Interval(0, 1), Interval(2, 3)).is_empty());
  CHECK(contains(IntervalBox{Interval(-1, 1), Interval(-1, 1)}, IntervalBox{Interval(0, 0.5), Interval(0, 0.5)}));
  CHECK(IntervalBox{Interval(0.9, 1.1)}.midpoint()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hull(Interval(0, 1), Interval(3, 4)) == Interval(0, 4));
}

TEST_CASE("interval matrix products") {
  IntervalBox x{Interval(1, 2), Interval(3, 4)};
  CHECK(mul(IntervalMatrix::identity(2), x) == x);
  Eigen::MatrixXd half(1, 1);
  half << 0.5;
  CHECK(mul(half, IntervalBox{Interval(0, 0.005)}) == IntervalBox{Interval(0, 0.0025)});
  IntervalMatrix m(1, 1);
  m(0, 0) = Interval(-0.1, 0.1);
  IntervalBox y = mul(m, IntervalBox{Interval(-0.1, 0.1)});
  CHECK(y[0].lo() <= -0.01);
  CHECK(y[0].hi() >= 0.01);
  CHECK(y[0].hi() <= std::nextafter(0.01, 1.0));
}

TEST_CASE("from_decimal encloses the literal") {
  Interval t = Interval::from_decimal("0.1");
  CHECK(t.lo() < t.hi());
  CHECK(t.contains(0.1));
  CHECK(Interval::from_decimal("0.125") == Interval(0.125));
}

namespace {

using q128 = __float128;

bool inside(const Interval& r, q128 v) { return q128(r.lo()) <= v && v <= q128(r.hi()); }

double draw(std::mt19937_64& g) {
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> ex(-60, 60);
  switch (kind(g)) {
    case 0: return 0.0;
    case 1: return std::ldexp(1.0, ex(g));
    default: return std::ldexp(u(g), ex(g));
  }
}

Interval draw_interval(std::mt19937_64& g) {
  double a = draw(g), b = draw(g);
  if (std::uniform_int_distribution<int>(0, 4)(g) == 0) b = a;
  return Interval(std::min(a, b), std::max(a, b));
}

double pick(std::mt19937_64& g, const Interval& x) {
  std::uniform_int_distribution<int> k(0, 3);
  switch (k(g)) {
    case 0: return x.lo();
    case 1: return x.hi();
    default: {
      double t = std::uniform_real_distribution<double>(0, 1)(g);
      double v = x.lo() + t * (x.hi() - x.lo());
      return std::clamp(v, x.lo(), x.hi());
    }
  }
}

}  // namespace

TEST_CASE("containment fuzz against a float128 oracle") {
  std::mt19937_64 g(20240611);
  int violations = 0;
  const int cases = 100000;
  for (int i = 0; i < cases; ++i) {
    Interval X = draw_interval(g), Y = draw_interval(g);
    double x = pick(g, X), y = pick(g, Y);
    q128 qx = x, qy = y;
    violations += !inside(X + Y, qx + qy);
    violations += !inside(X - Y, qx - qy);
    violations += !inside(X * Y, qx * qy);
    violations += !inside(square(X), qx * qx);
    violations += !inside(pow(X, 3), qx * qx * qx);
    if (auto Q = try_div(X, Y)) violations += !inside(*Q, qx / qy);
    if (x >= 0) violations += !inside(sqrt(intersect(X, Interval(0, INFINITY))), sqrtq(qx));
  }
  CHECK(violations == 0);
}

TEST_CASE("directed rounding brackets the exact result") {
  std::mt19937_64 g(7);
  for (int i = 0; i < 20000; ++i) {
    double a = draw(g), b = draw(g);
    q128 s = q128(a) + q128(b), p = q128(a) * q128(b);
    CHECK(q128(rounding::add_down(a, b)) <= s);
    CHECK(q128(rounding::add_up(a, b)) >= s);
    CHECK(q128(rounding::mul_down(a, b)) <= p);
    CHECK(q128(rounding::mul_up(a, b)) >= p);
    if (b != 0) {
      q128 d = q128(a) / q128(b);
      CHECK(q128(rounding::div_down(a, b)) <= d);
      CHECK(q128(rounding::div_up(a, b)) >= d);
    }
  }
}

TEST_CASE("boxes") {
  Eigen::VectorXd c(2);
  c << 0.1, -0.3;
  IntervalBox b = IntervalBox::around(c, 0.1);
  CHECK(contains(b, c));
  CHECK(b[0].lo() <= 0.0);
  CHECK(b.max_radius() >= 0.1);
  CHECK(disjoint(IntervalBox{Interval(0, 1)}, IntervalBox{Interval(2, 3)}));
  CHECK_FALSE(disjoint(IntervalBox{Interval(0, 1)}, IntervalBox{Interval(1, 3)}));
  CHECK(b.slice(1, 1).concat(b.slice(0, 1)).size() == 2);
  CHECK_THROWS_AS(Interval(2, 1), std::invalid_argument);
}
