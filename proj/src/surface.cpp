#include "certsurf/surface.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace certsurf {

// ---------------------------------------------------------------- coverage

EdgeCoverage EdgeCoverage::full(const IntervalBox& base) {
  if (base.size() != 2) throw std::invalid_argument("edge coverage needs a two-dimensional base");
  EdgeCoverage c;
  for (int e = 0; e < 4; ++e) c.uncovered[e].push_back(base[free_axis(e)]);
  return c;
}

EdgeCoverage EdgeCoverage::none() { return EdgeCoverage{}; }

bool EdgeCoverage::empty() const {
  return std::all_of(uncovered.begin(), uncovered.end(), [](const auto& v) { return v.empty(); });
}

double EdgeCoverage::length() const {
  double total = 0;
  for (const auto& edge : uncovered)
    for (const auto& t : edge) total += t.hi() - t.lo();
  return total;
}

void EdgeCoverage::subtract(int edge, const Interval& t) {
  std::vector<Interval> next;
  for (const auto& u : uncovered[edge]) {
    if (t.hi() < u.lo() || u.hi() < t.lo()) {
      next.push_back(u);
      continue;
    }
    if (u.lo() < t.lo()) next.emplace_back(u.lo(), t.lo());
    if (t.hi() < u.hi()) next.emplace_back(t.hi(), u.hi());
  }
  uncovered[edge] = std::move(next);
}

std::optional<std::pair<int, Interval>> EdgeCoverage::longest() const {
  std::optional<std::pair<int, Interval>> best;
  double len = -1;
  for (int e = 0; e < 4; ++e)
    for (const auto& t : uncovered[e])
      if (t.hi() - t.lo() > len) {
        len = t.hi() - t.lo();
        best = {e, t};
      }
  return best;
}

// ---------------------------------------------------------------- run store

std::vector<int> SurfaceRun::live_ids() const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < patches.size(); ++i)
    if (alive[i]) ids.push_back(static_cast<int>(i));
  return ids;
}

std::size_t SurfaceRun::live_count() const {
  return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), true));
}

namespace {

int insert_patch(SurfaceRun& run, CertifiedPatch patch, EdgeCoverage cov) {
  const int id = static_cast<int>(run.patches.size());
  patch.id = id;
  IntervalBox hull = obox_to_world_hull(patch.box);
  run.sweep_width = std::max(run.sweep_width, hull[0].width());
  run.sweep.emplace(hull[0].lo(), id);
  run.hulls.push_back(hull);
  run.patches.push_back(std::move(patch));
  run.coverage.push_back(std::move(cov));
  run.alive.push_back(true);
  run.exclusions.emplace_back();
  return id;
}

// Local box over an edge piece: pinned coordinate x free range x fiber.
IntervalBox edge_box(const CertifiedPatch& p, int edge, const Interval& t, const IntervalBox& fiber) {
  IntervalBox base(2);
  const double c = EdgeCoverage::pinned_value(p.base(), edge);
  base[EdgeCoverage::pinned_axis(edge)] = Interval(c);
  base[EdgeCoverage::free_axis(edge)] = t;
  return base.concat(fiber);
}

// Certifies the sheet curve over an edge piece with a Krawczyk test pinned
// to the edge line (the facet system F plus the edge equation).  Returns
// the enclosing local box when it is the patch's own sheet.
std::optional<IntervalBox> facet_enclosure(const CertifiedPatch& p, int edge, const Interval& t) {
  const std::size_t d = p.d(), m = p.system.m();
  Eigen::VectorXd x(static_cast<Eigen::Index>(d));
  x[static_cast<Eigen::Index>(EdgeCoverage::pinned_axis(edge))] = EdgeCoverage::pinned_value(p.base(), edge);
  x[static_cast<Eigen::Index>(EdgeCoverage::free_axis(edge))] = t.mid();
  try {
    FiberRoot root = refine_fiber_root(p.system, x, p.root_enclosure(), 0.0);
    KrawczykInput in;
    in.center = Eigen::VectorXd(static_cast<Eigen::Index>(d + m));
    in.center << x, root.y;
    in.base_radii = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    in.base_radii[static_cast<Eigen::Index>(EdgeCoverage::free_axis(edge))] = t.rad();
    in.fiber_radius = std::max(t.rad(), 1e-300);
    in.A = choose_A(p.system, in.center);
    in.rho = p.rho;
    KrawczykCertificate cert = krawczyk_test(p.system, in);
    if (!cert.passed) return std::nullopt;
    IntervalBox yhat = IntervalBox::point(root.y);
    IntervalBox enc = intersect(yhat + cert.K, in.fiber_box(d));
    if (enc.is_empty() || !contains(p.test.fiber_box(d), enc)) return std::nullopt;
    return edge_box(p, edge, t, enc);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void cover_piece(const CertifiedPatch& p, const CertifiedPatch& q, int edge, const Interval& t, int depth,
                 std::vector<Interval>& out) {
  IntervalBox local = edge_box(p, edge, t, p.root_enclosure());
  if (obox_disjoint(OrientedBox{p.box.frame, local}, q.box) == Separation::provably_disjoint) return;
  if (obox_contains_local(q.box, *p.box.frame, local)) {
    out.push_back(t);
    return;
  }
  if (auto enc = facet_enclosure(p, edge, t)) {
    if (obox_contains_local(q.box, *p.box.frame, *enc)) {
      out.push_back(t);
      return;
    }
  }
  if (depth <= 0) return;
  const double mid = t.mid();
  if (!(t.lo() < mid && mid < t.hi())) return;
  cover_piece(p, q, edge, Interval(t.lo(), mid), depth - 1, out);
  cover_piece(p, q, edge, Interval(mid, t.hi()), depth - 1, out);
}

}  // namespace

std::vector<int> intersecting_patches(const SurfaceRun& run, const OrientedBox& box, int skip) {
  IntervalBox hull = obox_to_world_hull(box);
  std::vector<int> out;
  auto it = run.sweep.lower_bound(rounding::sub_down(hull[0].lo(), run.sweep_width));
  for (; it != run.sweep.end() && it->first <= hull[0].hi(); ++it) {
    const int id = it->second;
    if (id == skip || !run.alive[static_cast<std::size_t>(id)]) continue;
    if (disjoint(run.hulls[static_cast<std::size_t>(id)], hull)) continue;
    if (obox_disjoint(run.patches[static_cast<std::size_t>(id)].box, box) == Separation::possibly_intersecting)
      out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double coverage_update(SurfaceRun& run, int owner, int other) {
  const CertifiedPatch& p = run.patches.at(static_cast<std::size_t>(owner));
  const CertifiedPatch& q = run.patches.at(static_cast<std::size_t>(other));
  EdgeCoverage& cov = run.coverage.at(static_cast<std::size_t>(owner));
  const double before = cov.length();
  for (int e = 0; e < 4; ++e) {
    std::vector<Interval> pieces;
    for (const auto& t : cov.uncovered[e]) cover_piece(p, q, e, t, run.options.coverage_depth, pieces);
    for (const auto& t : pieces) {
      cov.subtract(e, t);
      cov.covered[e].push_back(t);
    }
  }
  return before - cov.length();
}

void clip_to_domain(const CertifiedPatch& patch, EdgeCoverage& cov, const IntervalBox& domain, int depth) {
  const IntervalBox fiber = patch.root_enclosure();
  for (int e = 0; e < 4; ++e) {
    std::vector<Interval> outside;
    std::vector<std::pair<Interval, int>> stack;
    for (const auto& t : cov.uncovered[e]) stack.emplace_back(t, depth);
    while (!stack.empty()) {
      auto [t, left] = stack.back();
      stack.pop_back();
      IntervalBox hull = obox_to_world_hull(OrientedBox{patch.box.frame, edge_box(patch, e, t, fiber)});
      if (disjoint(hull, domain)) {
        outside.push_back(t);
        continue;
      }
      if (contains(domain, hull) || left <= 0) continue;
      const double mid = t.mid();
      if (!(t.lo() < mid && mid < t.hi())) continue;
      stack.emplace_back(Interval(t.lo(), mid), left - 1);
      stack.emplace_back(Interval(mid, t.hi()), left - 1);
    }
    for (const auto& t : outside) {
      cov.subtract(e, t);
      cov.outside[e].push_back(t);
    }
  }
}

namespace {

EdgeCoverage initial_coverage(const SurfaceRun& run, const CertifiedPatch& p) {
  EdgeCoverage cov = EdgeCoverage::full(p.base());
  if (run.options.domain) clip_to_domain(p, cov, *run.options.domain);
  return cov;
}

// Slab edges on the parent's outer boundary inherit its uncovered pieces;
// interior edges face sibling slabs of the same sheet and start covered.
EdgeCoverage inherited_coverage(const SurfaceRun& run, const CertifiedPatch& parent, const EdgeCoverage& pcov,
                                const CertifiedPatch& slab) {
  EdgeCoverage cov;
  const IntervalBox pb = parent.base(), sb = slab.base();
  const double tol = 1e-9 * parent.base_radius();
  for (int e = 0; e < 4; ++e) {
    const double pv = EdgeCoverage::pinned_value(pb, e), sv = EdgeCoverage::pinned_value(sb, e);
    if (std::fabs(pv - sv) > tol) continue;
    const Interval range = sb[EdgeCoverage::free_axis(e)];
    for (const auto& t : pcov.uncovered[e]) {
      Interval piece = intersect(t, range);
      if (!piece.is_empty() && piece.lo() < piece.hi()) cov.uncovered[e].push_back(piece);
    }
  }
  if (run.options.domain) clip_to_domain(slab, cov, *run.options.domain);
  return cov;
}

void replace_patch(SurfaceRun& run, int id, std::vector<CertifiedPatch> refinement, std::deque<int>& queue) {
  const auto idx = static_cast<std::size_t>(id);
  run.alive[idx] = false;
  run.stats.replacements++;
  const CertifiedPatch parent = run.patches[idx];
  const EdgeCoverage pcov = run.coverage[idx];
  std::vector<int> ids;
  for (auto& slab : refinement) {
    EdgeCoverage cov = inherited_coverage(run, parent, pcov, slab);
    const bool pending = !cov.empty();
    const int nid = insert_patch(run, std::move(slab), std::move(cov));
    ids.push_back(nid);
    if (pending) queue.push_back(nid);
  }
  // Slabs of one sheet whose closed bases meet both hold the root over the
  // common base points, so they share a point of the variety.
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const IntervalBox bi = run.patches[static_cast<std::size_t>(ids[i])].base();
      const IntervalBox bj = run.patches[static_cast<std::size_t>(ids[j])].base();
      if (!disjoint(bi, bj)) run.same_sheet.insert({ids[i], ids[j]});
    }
}

Eigen::VectorXd edge_point_world(const CertifiedPatch& p, int edge, double t) {
  const std::size_t d = p.d();
  Eigen::VectorXd x(static_cast<Eigen::Index>(d));
  x[static_cast<Eigen::Index>(EdgeCoverage::pinned_axis(edge))] = EdgeCoverage::pinned_value(p.base(), edge);
  x[static_cast<Eigen::Index>(EdgeCoverage::free_axis(edge))] = t;
  Eigen::VectorXd y;
  try {
    y = refine_fiber_root(p.system, x, p.root_enclosure(), 0.0).y;
  } catch (const Error&) {
    auto yn = newton_fiber(p.system, x, p.test.center.tail(static_cast<Eigen::Index>(p.system.m())));
    if (!yn) throw Error("no fiber point over the patch boundary; certificate misuse");
    y = *yn;
  }
  Eigen::VectorXd z(static_cast<Eigen::Index>(p.n()));
  z << x, y;
  return p.box.frame->V * z;
}

}  // namespace

SurfaceRun certified_surface_approximation(const AnalyticSystem& system, const Eigen::VectorXd& z0,
                                           const SurfaceOptions& options) {
  if (system.d() != 2) throw std::invalid_argument("surface approximation needs n - 2 equations");
  if (system.is_transformed()) throw std::invalid_argument("surface approximation expects world coordinates");
  if (options.domain && options.domain->size() != system.n())
    throw std::invalid_argument("domain has the wrong dimension");
  SurfaceRun run(system);
  run.options = options;

  CertifiedPatch first = add_box(system, z0, options.r, options.rho);
  first.color = ColorTag::initial;
  EdgeCoverage cov0 = initial_coverage(run, first);
  std::deque<int> queue;
  const bool pending0 = !cov0.empty();
  const int id0 = insert_patch(run, std::move(first), std::move(cov0));
  if (pending0) queue.push_back(id0);

  ComponentOptions budget = options.component;
  budget.max_rounds = std::min(budget.max_rounds, options.undecided_rounds);
  int stalls = 0;
  while (!queue.empty()) {
    if (options.max_boxes && run.live_count() >= *options.max_boxes) {
      run.truncated = true;
      break;
    }
    const int pid = queue.front();
    queue.pop_front();
    const auto pidx = static_cast<std::size_t>(pid);
    if (!run.alive[pidx] || run.coverage[pidx].empty()) continue;
    run.stats.iterations++;

    auto target = run.coverage[pidx].longest();
    const double len_before = run.coverage[pidx].length();
    const Eigen::VectorXd zhat = edge_point_world(run.patches[pidx], target->first, target->second.mid());

    double s = 2 * options.growth * run.patches[pidx].base_radius();
    const double s_floor = std::ldexp(run.patches[pidx].base_radius(), -40);
    std::optional<CertifiedPatch> q;
    std::vector<int> neighbors;
    for (;;) {
      s *= 0.5;
      if (s < s_floor) throw Error("patch growth collapsed near a boundary point; precision exhausted");
      AddBoxOptions abo;
      abo.reference_axes = run.patches[pidx].box.frame->V.leftCols(2);
      q = add_box(system, zhat, s, options.rho, abo);
      neighbors = intersecting_patches(run, q->box);
      bool all_true = true;
      for (int nid : neighbors) {
        if (!run.alive[static_cast<std::size_t>(nid)]) continue;
        run.stats.component_tests++;
        ComponentResult res;
        try {
          res = component_test(*q, run.patches[static_cast<std::size_t>(nid)], options.rho, budget);
        } catch (const Error&) {
          // Undecided within the budget (boxes barely touching): shrink.
          run.stats.undecided++;
          all_true = false;
          break;
        }
        if (res.same_sheet) continue;
        all_true = false;
        if (res.rounds > 0) replace_patch(run, nid, std::move(res.refinement_b), queue);
      }
      if (all_true) break;
    }

    const int qid = insert_patch(run, std::move(*q), EdgeCoverage{});
    run.coverage[static_cast<std::size_t>(qid)] = initial_coverage(run, run.patches[static_cast<std::size_t>(qid)]);
    for (int nid : neighbors) {
      if (!run.alive[static_cast<std::size_t>(nid)]) continue;
      run.same_sheet.insert({std::min(nid, qid), std::max(nid, qid)});
      coverage_update(run, nid, qid);
      coverage_update(run, qid, nid);
    }
    if (!run.coverage[static_cast<std::size_t>(qid)].empty()) queue.push_back(qid);
    if (run.alive[pidx] && !run.coverage[pidx].empty()) queue.push_back(pid);

    const bool progress = !run.alive[pidx] || run.coverage[pidx].length() < len_before;
    stalls = progress ? 0 : stalls + 1;
    if (stalls > options.stall_limit) throw Error("surface approximation stopped making progress");
  }
  if (run.truncated) {
    // Replacements in the last iteration can overshoot the cap; the newest
    // boxes go.  Each remaining box keeps its own certificate.
    std::vector<int> ids = run.live_ids();
    for (auto it = ids.rbegin(); it != ids.rend() && run.live_count() > *options.max_boxes; ++it) {
      run.alive[static_cast<std::size_t>(*it)] = false;
      run.stats.dropped++;
    }
  } else if (options.trim) {
    post_process_trim(run);
  }
  return run;
}

void post_process_trim(SurfaceRun& run) {
  const std::vector<int> ids = run.live_ids();
  std::vector<int> parent(run.patches.size());
  std::iota(parent.begin(), parent.end(), 0);
  ComponentOptions budget = run.options.component;
  budget.max_rounds = std::min(budget.max_rounds, run.options.trim_rounds);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (int a : ids) {
    for (int b : intersecting_patches(run, run.patches[static_cast<std::size_t>(a)].box, a)) {
      if (b < a) continue;
      bool joined = run.same_sheet.count({a, b}) > 0;
      if (!joined) {
        bool same = false;
        try {
          run.stats.component_tests++;
          same = component_test(run.patches[static_cast<std::size_t>(a)], run.patches[static_cast<std::size_t>(b)],
                                run.options.rho, budget)
                     .same_sheet;
        } catch (const Error&) {
          run.stats.undecided++;
          same = false;
        }
        if (same) {
          run.same_sheet.insert({a, b});
          joined = true;
        } else {
          run.exclusions[static_cast<std::size_t>(a)].push_back(b);
          run.exclusions[static_cast<std::size_t>(b)].push_back(a);
          run.stats.trimmed_pairs++;
        }
      }
      if (joined) parent[static_cast<std::size_t>(find(a))] = find(b);
    }
  }
  // A component survives if some member holds a certified zero.
  std::vector<bool> keep(run.patches.size(), false);
  for (int a : ids)
    if (run.patches[static_cast<std::size_t>(a)].certificate.passed) keep[static_cast<std::size_t>(find(a))] = true;
  for (int a : ids)
    if (!keep[static_cast<std::size_t>(find(a))]) {
      run.alive[static_cast<std::size_t>(a)] = false;
      run.stats.dropped++;
    }
}

}  // namespace certsurf
