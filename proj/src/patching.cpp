#include "certsurf/patching.hpp"

#include <algorithm>
#include <sstream>

#include "certsurf/linalg.hpp"

namespace certsurf {


IntervalBox CertifiedPatch::root_enclosure() const {
  const std::size_t m = system.m();
  IntervalBox yhat = IntervalBox::point(test.center.tail(static_cast<Eigen::Index>(m)));
  IntervalBox enc = fiber();
  if (certificate.K.size() == m) {
    IntervalBox tight = intersect(enc, yhat + certificate.K);
    if (!tight.is_empty()) enc = tight;
  }
  return enc;
}

namespace {

std::string describe(const Eigen::VectorXd& z) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < z.size(); ++i) os << (i ? ", " : "") << z[i];
  os << ")";
  return os.str();
}

}  // namespace

CertifiedPatch add_box(const AnalyticSystem& system, const Eigen::VectorXd& z, double r, double rho,
                       const AddBoxOptions& options) {
  if (system.is_transformed()) throw std::invalid_argument("add_box expects an untransformed system");
  if (static_cast<std::size_t>(z.size()) != system.n()) throw std::invalid_argument("start point has wrong dimension");
  if (!(r > 0) || !std::isfinite(r)) throw std::invalid_argument("radius must be positive");
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must lie in (0, 1)");
  const std::size_t d = system.d(), m = system.m();
  const auto D = static_cast<Eigen::Index>(d), M = static_cast<Eigen::Index>(m);
  const std::string where = "cannot certify near " + describe(z) + "; surface may be singular here";

  // Newton in the normal directions of the SVD frame, then once more in the
  // frame of the refined point.
  Eigen::VectorXd world = z;
  std::optional<FramedSystem> framed;
  for (int pass = 0; pass < 2; ++pass) {
    try {
      framed = unitary_transformation(system, world,
                                      options.reference_axes ? &*options.reference_axes : nullptr);
    } catch (const Error&) {
      throw Error(where);
    }
    auto y = newton_fiber(framed->system, framed->z.head(D), framed->z.tail(M),
                          std::numeric_limits<double>::infinity(), options.newton_iterations);
    if (!y) throw Error(where);
    framed->z.tail(M) = *y;
    world = framed->frame->V * framed->z;
  }

  Eigen::MatrixXd A;
  try {
    A = choose_A(framed->system, framed->z);
  } catch (const Error&) {
    throw Error(where);
  }
  const double floor = r * options.floor_factor;
  for (double s = r; s >= floor; s *= 0.5) {
    KrawczykInput in = KrawczykInput::uniform(framed->z, d, s, s, A, rho);
    KrawczykCertificate cert = krawczyk_test(framed->system, in);
    if (!cert.passed) continue;
    OrientedBox box{framed->frame, IntervalBox::around(framed->z, s)};
    return CertifiedPatch{-1, framed->system, std::move(box), std::move(in), std::move(cert), rho, ColorTag::normal};
  }
  throw Error(where);
}

std::optional<IntervalBox> inclusion_witness(const CertifiedPatch& a, const CertifiedPatch& b) {
  const std::size_t d = a.d();
  const IntervalBox base = a.base();
  const double acc = a.fiber_radius() * a.fiber_radius();

  std::vector<Eigen::VectorXd> candidates;
  auto clip = [&](Eigen::VectorXd x) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      double lo = base[i].lo(), hi = base[i].hi();
      double margin = std::min(acc, 0.25 * (hi - lo));
      x[k] = std::clamp(x[k], lo + margin, hi - margin);
    }
    return x;
  };
  IntervalBox hull_in_a = to_frame(*a.box.frame, obox_to_world_hull(b.box)).slice(0, d);
  IntervalBox overlap = intersect(hull_in_a, base);
  if (!overlap.is_empty()) candidates.push_back(clip(overlap.midpoint()));
  Eigen::VectorXd cb = a.box.frame->V.transpose() * (b.box.frame->V * b.box.center());
  Eigen::VectorXd xb = clip(cb.head(static_cast<Eigen::Index>(d)));
  candidates.push_back(xb);
  candidates.push_back(clip(0.5 * (xb + base.midpoint())));
  // Thin overlaps: a coarse grid over the overlap's base shadow.
  if (!overlap.is_empty() && d == 2) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd x(2);
        x << overlap[0].lo() + (i + 0.5) / 3 * overlap[0].width(), overlap[1].lo() + (j + 0.5) / 3 * overlap[1].width();
        candidates.push_back(clip(x));
      }
  }

  const IntervalBox J0 = a.root_enclosure();
  for (const auto& x : candidates) {
    if (!contains(base, x)) continue;
    FiberRoot root;
    try {
      root = refine_fiber_root(a.system, x, J0, acc);
    } catch (const Error&) {
      continue;
    }
    IntervalBox witness = IntervalBox::point(x).concat(root.enclosure);
    if (obox_contains_local(b.box, *a.box.frame, witness)) return witness;
  }
  return std::nullopt;
}

bool inclusion_test(const CertifiedPatch& a, const CertifiedPatch& b) { return inclusion_witness(a, b).has_value(); }

CertifiedPatch patch_from_slab(const CertifiedPatch& parent, const GraphSlab& slab, double rho) {
  CertifiedPatch p{-1, parent.system, OrientedBox{parent.box.frame, slab.box()}, slab.test, slab.certificate, rho,
                   parent.color};
  return p;
}

std::vector<CertifiedPatch> refine_patch(const CertifiedPatch& patch, double rho, double min_base_radius) {
  GraphOptions opt;
  opt.refined = true;
  opt.min_base_radius = min_base_radius;
  opt.fiber_seed = Eigen::VectorXd(patch.test.center.tail(static_cast<Eigen::Index>(patch.system.m())));
  opt.fiber_clip = patch.fiber();
  std::vector<CertifiedPatch> out;
  for (const auto& slab : graph_approximation(patch.system, patch.base(), rho, opt))
    out.push_back(patch_from_slab(patch, slab, rho));
  return out;
}

bool reverify(const CertifiedPatch& patch) {
  try {
    return krawczyk_test(patch.system, patch.test).passed;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

namespace {

bool touches_any(const CertifiedPatch& p, const std::vector<CertifiedPatch>& others) {
  for (const auto& q : others)
    if (obox_disjoint(p.box, q.box) == Separation::possibly_intersecting) return true;
  return false;
}

}  // namespace

ComponentResult component_test(const CertifiedPatch& a, const CertifiedPatch& b, double rho,
                               const ComponentOptions& options) {
  ComponentResult res;
  res.refinement_a = {a};
  res.refinement_b = {b};
  if (inclusion_test(a, b) || inclusion_test(b, a)) {
    res.same_sheet = true;
    return res;
  }
  if (obox_disjoint(a.box, b.box) == Separation::provably_disjoint) return res;

  const double ra = a.base_radius(), rb = b.base_radius();
  for (int k = 1; k <= options.max_rounds; ++k) {
    res.rounds = k;
    const double rho_k = std::ldexp(rho, -k);
    // Only slabs that may still meet the other side are refined further.
    auto refine_side = [&](std::vector<CertifiedPatch>& mine, const std::vector<CertifiedPatch>& other,
                           double r0) {
      std::vector<CertifiedPatch> next;
      for (auto& p : mine) {
        if (!touches_any(p, other)) {
          next.push_back(std::move(p));
          continue;
        }
        for (auto& q : refine_patch(p, rho_k, std::ldexp(r0, -k))) next.push_back(std::move(q));
      }
      mine = std::move(next);
    };
    const std::vector<CertifiedPatch> old_b = res.refinement_b;
    refine_side(res.refinement_a, old_b, ra);
    refine_side(res.refinement_b, res.refinement_a, rb);

    for (const auto& p : res.refinement_a)
      if (obox_disjoint(p.box, b.box) == Separation::possibly_intersecting && inclusion_test(p, b)) {
        res.same_sheet = true;
        return res;
      }
    for (const auto& p : res.refinement_b)
      if (obox_disjoint(p.box, a.box) == Separation::possibly_intersecting && inclusion_test(p, a)) {
        res.same_sheet = true;
        return res;
      }
    bool separated = true;
    for (const auto& p : res.refinement_a) {
      if (touches_any(p, res.refinement_b)) {
        separated = false;
        break;
      }
    }
    if (separated) return res;
  }
  throw Error("cannot separate or join sheets; precision exhausted");
}

}  // namespace certsurf
