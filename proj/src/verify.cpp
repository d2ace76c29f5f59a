#include "certsurf/verify.hpp"

#include <cmath>

namespace certsurf {

std::size_t VerifyReport::failures() const {
  std::size_t k = 0;
  for (const auto& c : checks) k += c.ok ? 0 : 1;
  return k;
}

namespace {

std::string check_record(const AnalyticSystem& world, const BoxRecord& r, double rel_tol) {
  const std::size_t n = world.n(), d = world.d();
  if (static_cast<std::size_t>(r.V.rows()) != n || static_cast<std::size_t>(r.V.cols()) != n)
    return "frame V has the wrong shape";
  if (static_cast<std::size_t>(r.U.rows()) != n - d || static_cast<std::size_t>(r.U.cols()) != n - d)
    return "frame U has the wrong shape";
  if (r.local.size() != n) return "box has the wrong dimension";
  if (!(r.margin > 0)) return "stored margin is not positive";
  const bool identity = r.V.isIdentity(0.0) && r.U.isIdentity(0.0);
  AnalyticSystem sys = identity ? world : world.transform(r.U, r.V);
  KrawczykCertificate c;
  try {
    c = krawczyk_test(sys, r.test);
  } catch (const std::exception& e) {
    return std::string("test input rejected: ") + e.what();
  }
  if (!c.passed) return c.error.empty() ? "certificate does not pass" : "evaluation failed: " + c.error;
  const double scale = std::max({std::fabs(c.norm_K), std::fabs(r.norm_K), 1e-300});
  if (!(std::fabs(c.norm_K - r.norm_K) <= rel_tol * scale)) return "stored norm_K disagrees with recomputation";
  const double mscale = std::max({std::fabs(c.margin), std::fabs(r.margin), 1e-300});
  if (!(std::fabs(c.margin - r.margin) <= rel_tol * mscale)) return "stored margin disagrees with recomputation";
  if (!contains(r.test.base_box(d), r.local.slice(0, d))) return "emitted base exceeds the tested base";
  return "";
}

}  // namespace

VerifyReport verify_box_file(const BoxFile& file, double rel_tol) {
  VerifyReport rep;
  AnalyticSystem world = file.system();
  for (const auto& r : file.records) {
    std::string why = check_record(world, r, rel_tol);
    rep.checks.push_back({r.id, why.empty(), why});
  }
  return rep;
}

}  // namespace certsurf
