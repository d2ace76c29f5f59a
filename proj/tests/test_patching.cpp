#include <cmath>

#include "certsurf/parser.hpp"
#include "certsurf/patching.hpp"
#include "doctest.h"

using namespace certsurf;

namespace {
AnalyticSystem make(const std::string& src) {
  ParsedSystem ps = parse_system(src, std::vector<std::string>{"x", "y", "z"});
  return AnalyticSystem(ps.equations, 3, 2, ps.variables);
}
Eigen::VectorXd v3(double a, double b, double c) { return (Eigen::VectorXd(3) << a, b, c).finished(); }
Eigen::VectorXd on_sphere(double x, double y) { return v3(x, y, std::sqrt(1 - x * x - y * y)); }

AddBoxOptions aligned() {
  AddBoxOptions o;
  o.reference_axes = Eigen::MatrixXd::Identity(3, 2);
  return o;
}

bool pairwise_disjoint(const std::vector<CertifiedPatch>& a, const std::vector<CertifiedPatch>& b) {
  for (const auto& p : a)
    for (const auto& q : b)
      if (obox_disjoint(p.box, q.box) != Separation::provably_disjoint) return false;
  return true;
}
}  // namespace

TEST_CASE("add_box halves until the certificate passes") {
  AnalyticSystem s = make("x^2 + y^2 + z^2 - 1");
  CertifiedPatch p = add_box(s, v3(0, 0, 1), 0.1, 0.125);
  CHECK(p.certificate.passed);
  CHECK(p.base_radius() == 0.05);
  CHECK(p.fiber_radius() == 0.05);
  CHECK(reverify(p));
  CHECK(obox_contains_point(p.box, v3(0, 0, 1)));

  // A start point off the surface is pulled onto it first.
  CertifiedPatch q = add_box(s, v3(0.01, 0, 1.02), 0.1, 0.125);
  CHECK(q.certificate.passed);
  Eigen::VectorXd c = q.box.frame->V * q.test.center;
  CHECK(std::fabs(c.norm() - 1) < 1e-12);
}

TEST_CASE("add_box reports singular points") {
  CHECK_THROWS_AS(add_box(make("x^2 + y^2 - z^2"), v3(0, 0, 0), 0.1, 0.125), Error);
}

TEST_CASE("root enclosure holds the sheet") {
  AnalyticSystem s = make("x^2 + y^2 + z^2 - 1");
  CertifiedPatch p = add_box(s, on_sphere(0.3, 0.2), 0.1, 0.125, aligned());
  IntervalBox e = p.root_enclosure();
  CHECK(contains(p.fiber(), e));
  CHECK(e[0].width() <= 2 * p.fiber_radius() * p.rho + 1e-12);
}

TEST_CASE("inclusion between overlapping patches of one sheet") {
  AnalyticSystem s = make("x^2 + y^2 + z^2 - 1");
  CertifiedPatch a = add_box(s, v3(0, 0, 1), 0.05, 0.125, aligned());
  CertifiedPatch b = add_box(s, on_sphere(0.05, 0), 0.05, 0.125, aligned());
  CHECK(inclusion_test(a, b));
  CHECK(inclusion_test(b, a));
  auto w = inclusion_witness(a, b);
  REQUIRE(w.has_value());
  CHECK(obox_contains_local(b.box, *a.box.frame, *w));
  ComponentResult r = component_test(a, b, 0.125);
  CHECK(r.same_sheet);
  CHECK(r.rounds == 0);
}

TEST_CASE("two sheets z^2 = 0.01: component test is false") {
  AnalyticSystem s = make("z^2 - 0.01");
  CertifiedPatch up = add_box(s, v3(0, 0, 0.1), 0.1, 0.875);
  CertifiedPatch down = add_box(s, v3(0, 0, -0.1), 0.1, 0.875);
  ComponentResult r = component_test(up, down, 0.875);
  CHECK_FALSE(r.same_sheet);
  CHECK(pairwise_disjoint(r.refinement_a, r.refinement_b));
}

TEST_CASE("boxes meeting off the surface are separated by refinement") {
  // Two neighbouring sphere patches whose tilted cubes overlap only away
  // from the sphere.
  AnalyticSystem s = make("x^2 + y^2 + z^2 - 1");
  CertifiedPatch a = add_box(s, on_sphere(0.0812, 0.0098), 0.0391, 0.125, aligned());
  CertifiedPatch b = add_box(s, on_sphere(0.0, 0.0812), 0.0391, 0.125, aligned());
  REQUIRE(obox_disjoint(a.box, b.box) == Separation::possibly_intersecting);
  ComponentResult r = component_test(a, b, 0.125);
  CHECK_FALSE(r.same_sheet);
  CHECK(r.rounds > 0);
  CHECK(pairwise_disjoint(r.refinement_a, r.refinement_b));
  for (const auto& p : r.refinement_b) CHECK(reverify(p));
}

TEST_CASE("refinement slabs cover the parent's sheet") {
  AnalyticSystem s = make("x^2 + y^2 + z^2 - 1");
  CertifiedPatch a = add_box(s, on_sphere(0.2, -0.1), 0.05, 0.125, aligned());
  auto slabs = refine_patch(a, 0.0625, 0.0125);
  const double per_axis = std::round(a.base_radius() / 0.0125);
  CHECK(per_axis >= 2);
  CHECK(static_cast<double>(slabs.size()) >= per_axis * per_axis);
  for (const auto& p : slabs) {
    CHECK(reverify(p));
    CHECK(p.base_radius() <= 0.0125 * (1 + 1e-12));
    CHECK(contains(a.base(), p.base()));
  }
}
