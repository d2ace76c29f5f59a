#include "certsurf/interval.hpp"

#include <algorithm>
#include <cfenv>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace certsurf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude the FMA residual of a product or quotient may itself
// be rounded, so we fall back to unconditional widening.
constexpr double kTiny = 0x1p-960;

double down(double x) { return std::nextafter(x, -kInf); }
double up(double x) { return std::nextafter(x, kInf); }

}  // namespace

namespace rounding {

double add_down(double a, double b) {
  double s = a + b;
  if (!std::isfinite(s)) {
    if (std::isinf(s) && std::isfinite(a) && std::isfinite(b)) return s > 0 ? DBL_MAX : s;
    return s;
  }
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return err < 0 ? down(s) : s;
}

double add_up(double a, double b) {
  double s = a + b;
  if (!std::isfinite(s)) {
    if (std::isinf(s) && std::isfinite(a) && std::isfinite(b)) return s < 0 ? -DBL_MAX : s;
    return s;
  }
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return err > 0 ? up(s) : s;
}

double sub_down(double a, double b) { return add_down(a, -b); }
double sub_up(double a, double b) { return add_up(a, -b); }

double mul_down(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  double p = a * b;
  if (!std::isfinite(p)) {
    if (std::isfinite(a) && std::isfinite(b)) return p > 0 ? DBL_MAX : p;
    return p;
  }
  if (std::fabs(p) < kTiny) return down(p);
  double err = std::fma(a, b, -p);
  return err < 0 ? down(p) : p;
}

double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  double p = a * b;
  if (!std::isfinite(p)) {
    if (std::isfinite(a) && std::isfinite(b)) return p < 0 ? -DBL_MAX : p;
    return p;
  }
  if (std::fabs(p) < kTiny) return up(p);
  double err = std::fma(a, b, -p);
  return err > 0 ? up(p) : p;
}

namespace {
// Sign of (a/b - q) where q is the rounded quotient: +1, 0 or -1, or 2 when
// unknown.
int quotient_error_sign(double a, double b, double q) {
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return 2;
  double r = std::fma(-q, b, a);
  if (r == 0.0) return 0;
  return ((r > 0) == (b > 0)) ? 1 : -1;
}
}  // namespace

double div_down(double a, double b) {
  if (a == 0.0) return 0.0;
  double q = a / b;
  if (!std::isfinite(q)) {
    if (std::isfinite(a) && std::isfinite(b) && b != 0.0) return q > 0 ? DBL_MAX : q;
    return q;
  }
  if (std::isinf(b)) return q;
  int s = quotient_error_sign(a, b, q);
  return (s < 0 || s == 2) ? down(q) : q;
}

double div_up(double a, double b) {
  if (a == 0.0) return 0.0;
  double q = a / b;
  if (!std::isfinite(q)) {
    if (std::isfinite(a) && std::isfinite(b) && b != 0.0) return q < 0 ? -DBL_MAX : q;
    return q;
  }
  if (std::isinf(b)) return q;
  int s = quotient_error_sign(a, b, q);
  return (s > 0) ? up(q) : q;
}

double sqrt_down(double a) {
  double s = std::sqrt(a);
  if (s == 0.0 || !std::isfinite(s)) return s;
  if (a < kTiny) return down(s);
  double r = std::fma(-s, s, a);
  return r < 0 ? down(s) : s;
}

double sqrt_up(double a) {
  double s = std::sqrt(a);
  if (!std::isfinite(s)) return s;
  if (a < kTiny) return up(s);
  double r = std::fma(-s, s, a);
  return r > 0 ? up(s) : s;
}

}  // namespace rounding

using namespace rounding;

Interval Interval::entire() { return Interval(-kInf, kInf); }

Interval Interval::from_decimal(const std::string& text) {
  const int saved = std::fegetround();
  std::fesetround(FE_DOWNWARD);
  double lo = std::strtod(text.c_str(), nullptr);
  std::fesetround(FE_UPWARD);
  double hi = std::strtod(text.c_str(), nullptr);
  std::fesetround(saved);
  if (std::isnan(lo) || std::isnan(hi)) throw std::invalid_argument("not a number: " + text);
  return {lo, hi};
}

double Interval::mid() const {
  if (empty_) throw std::logic_error("midpoint of empty interval");
  if (lo_ == -kInf && hi_ == kInf) return 0.0;
  if (lo_ == -kInf) return -DBL_MAX;
  if (hi_ == kInf) return DBL_MAX;
  double m = 0.5 * lo_ + 0.5 * hi_;
  return std::clamp(m, lo_, hi_);
}

double Interval::rad() const {
  if (empty_) return 0.0;
  double m = mid();
  return std::max(sub_up(hi_, m), sub_up(m, lo_));
}

double Interval::width() const { return empty_ ? 0.0 : sub_up(hi_, lo_); }

double Interval::mag() const { return empty_ ? 0.0 : std::max(std::fabs(lo_), std::fabs(hi_)); }

double Interval::mig() const {
  if (empty_ || contains_zero()) return 0.0;
  return std::min(std::fabs(lo_), std::fabs(hi_));
}

bool Interval::subset_of(const Interval& outer) const {
  if (empty_) return true;
  if (outer.empty_) return false;
  return outer.lo_ <= lo_ && hi_ <= outer.hi_;
}

bool Interval::interior_subset_of(const Interval& outer) const {
  if (empty_) return true;
  if (outer.empty_) return false;
  return outer.lo_ < lo_ && hi_ < outer.hi_;
}

Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }

Interval operator+(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return {add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi())};
}

Interval operator-(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return {sub_down(a.lo(), b.hi()), sub_up(a.hi(), b.lo())};
}

Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if (a.lo() == a.hi() && b.lo() == b.hi()) {
    double x = a.lo(), y = b.lo();
    return {mul_down(x, y), mul_up(x, y)};
  }
  const double ps[4][2] = {{a.lo(), b.lo()}, {a.lo(), b.hi()}, {a.hi(), b.lo()}, {a.hi(), b.hi()}};
  double lo = kInf, hi = -kInf;
  for (const auto& p : ps) {
    lo = std::min(lo, mul_down(p[0], p[1]));
    hi = std::max(hi, mul_up(p[0], p[1]));
  }
  return {lo, hi};
}

std::optional<Interval> try_div(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if (b.contains_zero()) return std::nullopt;
  const double ps[4][2] = {{a.lo(), b.lo()}, {a.lo(), b.hi()}, {a.hi(), b.lo()}, {a.hi(), b.hi()}};
  double lo = kInf, hi = -kInf;
  for (const auto& p : ps) {
    double l = div_down(p[0], p[1]);
    double h = div_up(p[0], p[1]);
    if (std::isnan(l) || std::isnan(h)) return Interval::entire();
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
  return Interval(lo, hi);
}

Interval operator/(const Interval& a, const Interval& b) {
  auto q = try_div(a, b);
  if (!q) throw DomainError("division by an interval containing zero: " + to_string(b));
  return *q;
}

namespace {
double pow_down_nonneg(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = mul_down(r, x);
  return r;
}
double pow_up_nonneg(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = mul_up(r, x);
  return r;
}
}  // namespace

Interval pow(const Interval& a, int k) {
  if (a.is_empty()) return a;
  if (k == 0) return 1.0;
  if (k < 0) return Interval(1.0) / pow(a, -k);
  if (k % 2 == 0) return {pow_down_nonneg(a.mig(), k), pow_up_nonneg(a.mag(), k)};
  double lo = a.lo() >= 0 ? pow_down_nonneg(a.lo(), k) : -pow_up_nonneg(-a.lo(), k);
  double hi = a.hi() >= 0 ? pow_up_nonneg(a.hi(), k) : -pow_down_nonneg(-a.hi(), k);
  return {lo, hi};
}

Interval square(const Interval& a) { return pow(a, 2); }

std::optional<Interval> try_sqrt(const Interval& a) {
  if (a.is_empty()) return a;
  if (a.hi() < 0) return std::nullopt;
  double lo = std::max(a.lo(), 0.0);
  return Interval(sqrt_down(lo), sqrt_up(a.hi()));
}

Interval sqrt(const Interval& a) {
  auto r = try_sqrt(a);
  if (!r) throw DomainError("square root of a negative interval: " + to_string(a));
  return *r;
}

Interval hull(const Interval& a, const Interval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  double lo = std::max(a.lo(), b.lo());
  double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return Interval::empty();
  return {lo, hi};
}

std::string to_string(const Interval& a) {
  if (a.is_empty()) return "[empty]";
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", a.lo(), a.hi());
  return buf;
}

// ---------------------------------------------------------------------------

IntervalBox IntervalBox::point(const Eigen::VectorXd& p) {
  IntervalBox b(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) b[i] = Interval(p[i]);
  return b;
}

IntervalBox IntervalBox::around(const Eigen::VectorXd& center, double radius) {
  return around(center, Eigen::VectorXd::Constant(center.size(), radius));
}

IntervalBox IntervalBox::around(const Eigen::VectorXd& center, const Eigen::VectorXd& radii) {
  if (center.size() != radii.size()) throw std::invalid_argument("center/radii dimension mismatch");
  IntervalBox b(static_cast<std::size_t>(center.size()));
  for (Eigen::Index i = 0; i < center.size(); ++i) {
    if (radii[i] < 0) throw std::invalid_argument("negative radius");
    b[i] = Interval(sub_down(center[i], radii[i]), add_up(center[i], radii[i]));
  }
  return b;
}

bool IntervalBox::is_empty() const {
  return std::any_of(c_.begin(), c_.end(), [](const Interval& x) { return x.is_empty(); });
}

Eigen::VectorXd IntervalBox::midpoint() const {
  Eigen::VectorXd m(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) m[i] = c_[i].mid();
  return m;
}

Eigen::VectorXd IntervalBox::radius() const {
  Eigen::VectorXd r(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] = c_[i].rad();
  return r;
}

double IntervalBox::max_radius() const {
  double r = 0.0;
  for (const auto& x : c_) r = std::max(r, x.rad());
  return r;
}

double IntervalBox::norm() const {
  if (c_.empty() || is_empty()) throw std::invalid_argument("norm of an empty box");
  double n = 0.0;
  for (const auto& x : c_) n = std::max(n, x.mag());
  return n;
}

IntervalBox IntervalBox::slice(std::size_t first, std::size_t count) const {
  if (first + count > c_.size()) throw std::invalid_argument("slice out of range");
  return IntervalBox(std::vector<Interval>(c_.begin() + first, c_.begin() + first + count));
}

IntervalBox IntervalBox::concat(const IntervalBox& tail) const {
  std::vector<Interval> c = c_;
  c.insert(c.end(), tail.c_.begin(), tail.c_.end());
  return IntervalBox(std::move(c));
}

IntervalBox IntervalBox::inflate(const Eigen::VectorXd& radii) const {
  if (static_cast<std::size_t>(radii.size()) != c_.size())
    throw std::invalid_argument("inflate: dimension mismatch");
  IntervalBox b(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i)
    b[i] = Interval(sub_down(c_[i].lo(), radii[i]), add_up(c_[i].hi(), radii[i]));
  return b;
}

IntervalBox IntervalBox::inflate(double radius) const {
  return inflate(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(c_.size()), radius));
}

namespace {
void require_same(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("box dimension mismatch");
}
}  // namespace

IntervalBox intersect(const IntervalBox& a, const IntervalBox& b) {
  require_same(a.size(), b.size());
  IntervalBox r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = intersect(a[i], b[i]);
  return r;
}

IntervalBox hull(const IntervalBox& a, const IntervalBox& b) {
  require_same(a.size(), b.size());
  IntervalBox r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
  return r;
}

bool contains(const IntervalBox& outer, const IntervalBox& inner) {
  require_same(outer.size(), inner.size());
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (!inner[i].subset_of(outer[i])) return false;
  return true;
}

bool contains(const IntervalBox& outer, const Eigen::VectorXd& p) {
  require_same(outer.size(), static_cast<std::size_t>(p.size()));
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (!outer[i].contains(p[i])) return false;
  return true;
}

bool disjoint(const IntervalBox& a, const IntervalBox& b) {
  require_same(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (intersect(a[i], b[i]).is_empty()) return true;
  return false;
}

IntervalBox operator+(const IntervalBox& a, const IntervalBox& b) {
  require_same(a.size(), b.size());
  IntervalBox r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

IntervalBox operator-(const IntervalBox& a, const IntervalBox& b) {
  require_same(a.size(), b.size());
  IntervalBox r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

IntervalBox operator-(const IntervalBox& a) {
  IntervalBox r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

// ---------------------------------------------------------------------------

IntervalMatrix IntervalMatrix::from(const Eigen::MatrixXd& m) {
  IntervalMatrix r(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Interval(m(i, j));
  return r;
}

IntervalMatrix IntervalMatrix::identity(std::size_t n) {
  IntervalMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) r(i, i) = Interval(1.0);
  return r;
}

IntervalMatrix IntervalMatrix::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw std::invalid_argument("columns out of range");
  IntervalMatrix r(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) r(i, j) = (*this)(i, first + j);
  return r;
}

IntervalMatrix IntervalMatrix::transpose() const {
  IntervalMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

Eigen::MatrixXd IntervalMatrix::midpoint() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).mid();
  return m;
}

double IntervalMatrix::norm_inf() const {
  double n = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s = add_up(s, (*this)(i, j).mag());
    n = std::max(n, s);
  }
  return n;
}

bool IntervalMatrix::contains(const Eigen::MatrixXd& m) const {
  if (static_cast<std::size_t>(m.rows()) != rows_ || static_cast<std::size_t>(m.cols()) != cols_)
    return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (!(*this)(i, j).contains(m(i, j))) return false;
  return true;
}

namespace {
void require_shape(std::size_t inner_a, std::size_t inner_b) {
  if (inner_a != inner_b) throw std::invalid_argument("matrix shape mismatch");
}
}  // namespace

IntervalBox mul(const Eigen::MatrixXd& a, const IntervalBox& x) {
  require_shape(static_cast<std::size_t>(a.cols()), x.size());
  IntervalBox r(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Interval s(0.0);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) s += Interval(a(i, j)) * x[j];
    r[i] = s;
  }
  return r;
}

IntervalBox mul(const IntervalMatrix& a, const IntervalBox& x) {
  require_shape(a.cols(), x.size());
  IntervalBox r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Interval s(0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

IntervalBox mul(const IntervalMatrix& a, const Eigen::VectorXd& x) {
  return mul(a, IntervalBox::point(x));
}

IntervalMatrix mul(const IntervalMatrix& a, const IntervalMatrix& b) {
  require_shape(a.cols(), b.rows());
  IntervalMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Interval s(0.0);
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

IntervalMatrix mul(const Eigen::MatrixXd& a, const IntervalMatrix& b) {
  require_shape(static_cast<std::size_t>(a.cols()), b.rows());
  IntervalMatrix r(static_cast<std::size_t>(a.rows()), b.cols());
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Interval s(0.0);
      for (std::size_t k = 0; k < b.rows(); ++k)
        if (a(i, k) != 0.0) s += Interval(a(i, k)) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

IntervalMatrix mul(const IntervalMatrix& a, const Eigen::MatrixXd& b) {
  require_shape(a.cols(), static_cast<std::size_t>(b.rows()));
  IntervalMatrix r(a.rows(), static_cast<std::size_t>(b.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) {
      Interval s(0.0);
      for (std::size_t k = 0; k < a.cols(); ++k)
        if (b(k, j) != 0.0) s += a(i, k) * Interval(b(k, j));
      r(i, j) = s;
    }
  return r;
}

IntervalMatrix sub(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shape mismatch");
  IntervalMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

}  // namespace certsurf
