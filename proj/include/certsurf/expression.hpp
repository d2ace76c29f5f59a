#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "certsurf/interval.hpp"

namespace certsurf {

/// Evaluation hit a domain violation at a specific node.
class EvaluationError : public DomainError {
 public:
  EvaluationError(const std::string& what, std::size_t node) : DomainError(what), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

enum class NodeKind { Variable, Constant, Negate, Sqrt, Square, Add, Sub, Mul, Div, Pow };

struct Node;
using Expr = std::shared_ptr<const Node>;

/// Immutable expression tree node.  Subtrees are shared freely.
struct Node {
  NodeKind kind = NodeKind::Constant;
  std::size_t index = 0;  // Variable
  Interval value;         // Constant: exact enclosure of the literal
  std::string text;       // Constant: literal as written
  int exponent = 0;       // Pow
  Expr lhs;
  Expr rhs;
};

namespace expr {
Expr variable(std::size_t index);
/// Nonnegative literal; `text` is what the printer writes back.
Expr constant(const Interval& value, std::string text);
Expr constant(double value);
Expr literal(const std::string& text);

// Builders fold the trivial identities (0 + x, 1 * x, x^1, ...).
Expr negate(Expr a);
Expr sqrt(Expr a);
Expr square(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr a, int k);

/// Raw node constructors without folding, used by the parser so that the
/// tree mirrors the source text.
Expr make_unary(NodeKind kind, Expr a);
Expr make_binary(NodeKind kind, Expr a, Expr b);
Expr make_pow(Expr a, int k);

bool is_zero(const Expr& e);
bool is_one(const Expr& e);
}  // namespace expr

/// Symbolic partial derivative with respect to variable `var`.
Expr differentiate(const Expr& e, std::size_t var);

/// Infix text that parses back into the same tree.
std::string to_string(const Expr& e, std::span<const std::string> names);
std::size_t node_count(const Expr& e);
std::size_t max_variable_index(const Expr& e);  ///< one past the largest index
bool structurally_equal(const Expr& a, const Expr& b);

/// A straight-line program evaluating several expressions at once, with
/// shared subtrees computed once.
class Tape {
 public:
  Tape() = default;
  explicit Tape(std::span<const Expr> outputs);

  std::size_t num_outputs() const { return outputs_.size(); }
  std::size_t size() const { return code_.size(); }

  /// Point evaluation; throws EvaluationError on domain violations.
  void eval(std::span<const double> x, std::span<double> out) const;
  /// Natural interval extension; sqrt requires strictly positive arguments
  /// and division requires divisors excluding zero.
  void eval(std::span<const Interval> x, std::span<Interval> out) const;

 private:
  struct Instr {
    NodeKind kind = NodeKind::Constant;
    int a = -1;
    int b = -1;
    int k = 0;
    std::size_t var = 0;
    Interval c;
  };
  template <class T>
  void run(std::span<const T> x, std::vector<T>& scratch) const;

  std::vector<Instr> code_;
  std::vector<int> outputs_;
};

}  // namespace certsurf
