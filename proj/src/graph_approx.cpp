#include "certsurf/graph_approx.hpp"

#include <cmath>
#include <deque>

#include "certsurf/linalg.hpp"

namespace certsurf {

using rounding::mul_up;
using rounding::sub_up;

int fiber_exponent(int s1) {
  // ceil(s1/2): integer division truncates toward zero, which is the
  // ceiling for negative s1.
  return s1 >= 0 ? (s1 + 1) / 2 : s1 / 2;
}

SubdivisionCell SubdivisionCell::root(std::size_t d) {
  SubdivisionCell c;
  c.lower = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), -1.0);
  c.s1 = 0;
  c.s2 = 0;
  return c;
}

double SubdivisionCell::side() const { return std::ldexp(1.0, s1 + 1); }

Eigen::VectorXd SubdivisionCell::center() const {
  return lower.array() + std::ldexp(1.0, s1);
}

std::vector<SubdivisionCell> subdivide(const SubdivisionCell& cell) {
  const auto d = static_cast<std::size_t>(cell.lower.size());
  const double half = std::ldexp(1.0, cell.s1);
  std::vector<SubdivisionCell> out;
  out.reserve(std::size_t{1} << d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    SubdivisionCell c;
    c.lower = cell.lower;
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (std::size_t{1} << i)) c.lower[static_cast<Eigen::Index>(i)] += half;
    c.s1 = cell.s1 - 1;
    c.s2 = fiber_exponent(c.s1);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<IntervalBox> isolate_fiber_roots(const AnalyticSystem& system, const Eigen::VectorXd& base_point,
                                             const IntervalBox& search, int max_depth) {
  const std::size_t m = system.m();
  if (search.size() != m || static_cast<std::size_t>(base_point.size()) != system.d())
    throw std::invalid_argument("isolate_fiber_roots: dimension mismatch");
  const IntervalBox x = IntervalBox::point(base_point);
  const double min_width = std::ldexp(search.max_radius(), -max_depth);

  std::vector<IntervalBox> roots;
  std::vector<IntervalBox> stack{search};
  while (!stack.empty()) {
    IntervalBox Y = stack.back();
    stack.pop_back();
    bool excluded = false, isolated = false;
    IntervalBox K;
    try {
      IntervalBox g = system.eval_box_centered(x.concat(Y));
      for (const auto& gi : g)
        if (!gi.contains_zero()) excluded = true;
      if (!excluded) {
        Eigen::VectorXd y = Y.midpoint();
        Eigen::VectorXd z(base_point.size() + y.size());
        z << base_point, y;
        Eigen::MatrixXd A = approx_inverse(system.jacobian_sub_point(z));
        IntervalBox yb = IntervalBox::point(y);
        IntervalBox f = system.eval_box(x.concat(yb));
        IntervalMatrix contraction = sub(IntervalMatrix::identity(m), mul(A, system.jacobian_sub_box(x, Y)));
        K = yb - mul(A, f) + mul(contraction, Y - yb);
        if (intersect(K, Y).is_empty()) {
          excluded = true;
        } else {
          isolated = true;
          for (std::size_t i = 0; i < m; ++i)
            if (!K[i].interior_subset_of(Y[i])) isolated = false;
        }
      }
    } catch (const Error&) {
      // Domain error or singular midpoint Jacobian: decide by bisection.
    }
    if (excluded) continue;
    if (isolated) {
      roots.push_back(intersect(K, Y));
      continue;
    }
    if (Y.max_radius() < min_width)
      throw Error("fiber root isolation did not converge; roots may be singular or on the search boundary");
    std::size_t axis = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (Y[i].width() > Y[axis].width()) axis = i;
    // Off-center split: roots at round numbers would sit on every cut.
    const double mid = Y[axis].lo() + 0.4609375 * Y[axis].width();
    IntervalBox left = Y, right = Y;
    left[axis] = Interval(Y[axis].lo(), mid);
    right[axis] = Interval(mid, Y[axis].hi());
    stack.push_back(right);
    stack.push_back(left);
  }
  return roots;
}

namespace {

struct PendingCell {
  SubdivisionCell cell;
  std::vector<Eigen::VectorXd> seeds;
};

bool closed_disjoint(const IntervalBox& a, const IntervalBox& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].hi() < b[i].lo() || b[i].hi() < a[i].lo()) return true;
  return false;
}

}  // namespace

std::vector<GraphSlab> graph_approximation(const AnalyticSystem& system, const IntervalBox& U, double rho,
                                           const GraphOptions& options) {
  const std::size_t d = system.d(), m = system.m();
  if (U.size() != d) throw std::invalid_argument("base box U has the wrong dimension");
  if (U.is_empty()) throw std::invalid_argument("base box U is empty");
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must lie in (0, 1)");
  if (options.sheets < 1) throw std::invalid_argument("sheets must be positive");
  if (options.sheets > 1 && !options.fiber_search)
    throw std::invalid_argument("several sheets require a fiber search box");

  // Scaling: x = c + h t with t in [-1,1]^d.
  Eigen::VectorXd c(static_cast<Eigen::Index>(d)), h(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    c[k] = U[i].mid();
    h[k] = std::max(sub_up(c[k], U[i].lo()), sub_up(U[i].hi(), c[k]));
    if (!(h[k] > 0) || !std::isfinite(h[k])) throw std::invalid_argument("base box U must have positive finite width");
  }
  const double hmax = h.maxCoeff();

  std::vector<Eigen::VectorXd> seeds;
  if (options.fiber_search) {
    if (options.fiber_search->size() != m) throw std::invalid_argument("fiber search box has the wrong dimension");
    auto roots = isolate_fiber_roots(system, c, *options.fiber_search);
    if (roots.size() != static_cast<std::size_t>(options.sheets))
      throw Error("expected " + std::to_string(options.sheets) + " fiber roots over the center of U, found " +
                  std::to_string(roots.size()));
    for (const auto& r : roots) {
      auto y = newton_fiber(system, c, r.midpoint(), 2 * r.max_radius() + 1e-300);
      seeds.push_back(y ? *y : r.midpoint());
    }
  } else if (options.fiber_seed) {
    if (static_cast<std::size_t>(options.fiber_seed->size()) != m)
      throw std::invalid_argument("fiber seed has the wrong dimension");
    seeds.push_back(*options.fiber_seed);
  } else {
    seeds.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)));
  }

  std::vector<GraphSlab> out;
  std::deque<PendingCell> queue;
  queue.push_back({SubdivisionCell::root(d), seeds});
  std::size_t processed = 0;

  while (!queue.empty()) {
    PendingCell item = std::move(queue.front());
    queue.pop_front();
    if (++processed > options.max_cells) throw Error("graph approximation exceeded its cell budget");
    const SubdivisionCell& cell = item.cell;

    IntervalBox base(d);
    Eigen::VectorXd radii(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      Interval lo = Interval(c[k]) + Interval(h[k]) * Interval(cell.lower[k]);
      Interval hi = Interval(c[k]) + Interval(h[k]) * Interval(cell.lower[k] + cell.side());
      base[i] = Interval(lo.lo(), hi.hi());
    }
    Eigen::VectorXd x = base.midpoint();
    for (std::size_t i = 0; i < d; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      radii[k] = std::max(sub_up(x[k], base[i].lo()), sub_up(base[i].hi(), x[k]));
    }
    const double r2 = mul_up(hmax, std::ldexp(1.0, cell.s2));

    std::vector<GraphSlab> slabs;
    std::vector<Eigen::VectorXd> next_seeds = item.seeds;
    bool ok = true;
    for (std::size_t k = 0; k < item.seeds.size(); ++k) {
      auto y = newton_fiber(system, x, item.seeds[k], 4 * r2);
      if (!y) {
        ok = false;
        continue;
      }
      next_seeds[k] = *y;
      Eigen::VectorXd z(static_cast<Eigen::Index>(d + m));
      z << x, *y;
      GraphSlab slab;
      slab.base = base;
      slab.sheet_id = static_cast<int>(k);
      slab.cell = cell;
      slab.test.center = z;
      slab.test.base_radii = radii;
      slab.test.fiber_radius = r2;
      slab.test.rho = rho;
      try {
        slab.test.A = choose_A(system, z);
      } catch (const Error&) {
        ok = false;
        continue;
      }
      slab.certificate = krawczyk_test(system, slab.test);
      if (!slab.certificate.passed) {
        ok = false;
        continue;
      }
      slab.fiber = IntervalBox::around(*y, options.refined ? mul_up(rho, r2) : r2);
      if (options.fiber_clip) {
        slab.fiber = intersect(slab.fiber, *options.fiber_clip);
        if (slab.fiber.is_empty()) throw Error("certified fiber misses the clip box");
      }
      slabs.push_back(std::move(slab));
    }
    if (ok && slabs.size() > 1) {
      for (std::size_t a = 0; a < slabs.size() && ok; ++a)
        for (std::size_t b = a + 1; b < slabs.size() && ok; ++b)
          if (!closed_disjoint(slabs[a].fiber, slabs[b].fiber)) ok = false;
    }
    if (ok && (options.min_base_radius <= 0 || radii.maxCoeff() <= options.min_base_radius)) {
      for (auto& s : slabs) out.push_back(std::move(s));
      continue;
    }
    if (cell.s1 - 1 < options.floor_exponent)
      throw Error("graph hypothesis likely violated or precision exhausted");
    for (auto& child : subdivide(cell)) queue.push_back({std::move(child), next_seeds});
  }
  return out;
}

}  // namespace certsurf
