#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace certsurf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arithmetic outside an operation's domain (division by an interval
/// containing zero, square root of negative values).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Directed-rounding primitives.  Each returns a bound on the exact real
/// result of the operation on two doubles: `*_down` never exceeds it and
/// `*_up` is never below it.  Rounding direction is recovered from the exact
/// error term of the round-to-nearest result, so no FPU mode is touched.
namespace rounding {
double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);
double sqrt_down(double a);
double sqrt_up(double a);
}  // namespace rounding

/// Closed interval [lo, hi] of extended reals, or the empty set.
class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double v) : lo_(v), hi_(v) { check(); }  // NOLINT
  constexpr Interval(double lo, double hi) : lo_(lo), hi_(hi) { check(); }

  static constexpr Interval empty() {
    Interval e;
    e.empty_ = true;
    return e;
  }
  static Interval entire();
  /// Smallest interval with double endpoints containing the decimal text.
  static Interval from_decimal(const std::string& text);

  constexpr double lo() const { return lo_; }
  constexpr double hi() const { return hi_; }
  constexpr bool is_empty() const { return empty_; }

  double mid() const;
  double rad() const;  ///< upper bound on half the width
  double width() const;
  double mag() const;  ///< max |x| over the interval
  double mig() const;  ///< min |x| over the interval

  bool contains(double x) const { return !empty_ && lo_ <= x && x <= hi_; }
  bool contains_zero() const { return contains(0.0); }
  bool subset_of(const Interval& outer) const;
  bool interior_subset_of(const Interval& outer) const;

  Interval operator-() const {
    return empty_ ? empty() : Interval(-hi_, -lo_);
  }
  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  constexpr void check() const {
    if (!(lo_ <= hi_)) throw std::invalid_argument("interval with lo > hi or NaN endpoint");
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
  bool empty_ = false;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
/// Throws DomainError when 0 is in b.
Interval operator/(const Interval& a, const Interval& b);

/// Division returning no value when the divisor contains zero.
std::optional<Interval> try_div(const Interval& a, const Interval& b);
/// x^k with the monomial rule (even powers are nonnegative); k may be negative.
Interval pow(const Interval& a, int k);
Interval square(const Interval& a);
/// Square root of a ∩ [0, ∞); no value if that intersection is empty.
std::optional<Interval> try_sqrt(const Interval& a);
/// Square root requiring a ⊆ [0, ∞) after intersection; throws otherwise.
Interval sqrt(const Interval& a);
Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);

std::string to_string(const Interval& a);

/// Axis-aligned box, the product of its component intervals.
class IntervalBox {
 public:
  IntervalBox() = default;
  explicit IntervalBox(std::size_t n) : c_(n) {}
  IntervalBox(std::initializer_list<Interval> c) : c_(c) {}
  explicit IntervalBox(std::vector<Interval> c) : c_(std::move(c)) {}
  /// Degenerate box at a point.
  static IntervalBox point(const Eigen::VectorXd& p);
  /// center ± radius in every coordinate (outward rounded).
  static IntervalBox around(const Eigen::VectorXd& center, double radius);
  static IntervalBox around(const Eigen::VectorXd& center, const Eigen::VectorXd& radii);

  std::size_t size() const { return c_.size(); }
  Interval& operator[](std::size_t i) { return c_[i]; }
  const Interval& operator[](std::size_t i) const { return c_[i]; }
  auto begin() const { return c_.begin(); }
  auto end() const { return c_.end(); }
  const std::vector<Interval>& components() const { return c_; }

  bool is_empty() const;
  Eigen::VectorXd midpoint() const;
  Eigen::VectorXd radius() const;
  double max_radius() const;
  double norm() const;  ///< max over components of max |x|, rounded up
  /// Sub-box of components [first, first+count).
  IntervalBox slice(std::size_t first, std::size_t count) const;
  IntervalBox concat(const IntervalBox& tail) const;
  /// Grow every component outward by the given radii.
  IntervalBox inflate(const Eigen::VectorXd& radii) const;
  IntervalBox inflate(double radius) const;

  friend bool operator==(const IntervalBox&, const IntervalBox&) = default;

 private:
  std::vector<Interval> c_;
};

IntervalBox intersect(const IntervalBox& a, const IntervalBox& b);
IntervalBox hull(const IntervalBox& a, const IntervalBox& b);
/// Every component of inner lies in the matching component of outer.
bool contains(const IntervalBox& outer, const IntervalBox& inner);
bool contains(const IntervalBox& outer, const Eigen::VectorXd& p);
/// Boxes share no point (some component pair is disjoint).
bool disjoint(const IntervalBox& a, const IntervalBox& b);
IntervalBox operator+(const IntervalBox& a, const IntervalBox& b);
IntervalBox operator-(const IntervalBox& a, const IntervalBox& b);
IntervalBox operator-(const IntervalBox& a);

/// Dense row-major matrix of intervals.
class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  IntervalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}
  static IntervalMatrix from(const Eigen::MatrixXd& m);
  static IntervalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Interval& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const Interval& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  IntervalMatrix columns(std::size_t first, std::size_t count) const;
  IntervalMatrix transpose() const;
  Eigen::MatrixXd midpoint() const;
  /// Max row sum of magnitudes, rounded up.
  double norm_inf() const;
  bool contains(const Eigen::MatrixXd& m) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Interval> e_;
};

/// Enclosures of all products of selections; dot products accumulate with
/// outward rounding.  Throws std::invalid_argument on shape mismatch.
IntervalBox mul(const Eigen::MatrixXd& a, const IntervalBox& x);
IntervalBox mul(const IntervalMatrix& a, const IntervalBox& x);
IntervalBox mul(const IntervalMatrix& a, const Eigen::VectorXd& x);
IntervalMatrix mul(const IntervalMatrix& a, const IntervalMatrix& b);
IntervalMatrix mul(const Eigen::MatrixXd& a, const IntervalMatrix& b);
IntervalMatrix mul(const IntervalMatrix& a, const Eigen::MatrixXd& b);
IntervalMatrix sub(const IntervalMatrix& a, const IntervalMatrix& b);

}  // namespace certsurf
