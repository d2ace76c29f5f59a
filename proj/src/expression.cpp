#include "certsurf/expression.hpp"

#include <charconv>
#include <cmath>
#include <unordered_map>

namespace certsurf {

namespace expr {

namespace {
Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool exact_constant(const Expr& e, double v) {
  return e->kind == NodeKind::Constant && e->value.lo() == v && e->value.hi() == v;
}
}  // namespace

Expr variable(std::size_t index) {
  Node n;
  n.kind = NodeKind::Variable;
  n.index = index;
  return make(std::move(n));
}

Expr constant(const Interval& value, std::string text) {
  if (value.lo() < 0) throw std::invalid_argument("constant nodes hold nonnegative literals");
  Node n;
  n.kind = NodeKind::Constant;
  n.value = value;
  n.text = std::move(text);
  return make(std::move(n));
}

Expr constant(double value) {
  if (value < 0) return negate(constant(-value));
  return constant(Interval(value), shortest(value));
}

Expr literal(const std::string& text) { return constant(Interval::from_decimal(text), text); }

bool is_zero(const Expr& e) { return exact_constant(e, 0.0); }
bool is_one(const Expr& e) { return exact_constant(e, 1.0); }

Expr make_unary(NodeKind kind, Expr a) {
  Node n;
  n.kind = kind;
  n.lhs = std::move(a);
  return make(std::move(n));
}

Expr make_binary(NodeKind kind, Expr a, Expr b) {
  Node n;
  n.kind = kind;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

Expr make_pow(Expr a, int k) {
  Node n;
  n.kind = NodeKind::Pow;
  n.lhs = std::move(a);
  n.exponent = k;
  return make(std::move(n));
}

Expr negate(Expr a) {
  if (is_zero(a)) return a;
  if (a->kind == NodeKind::Negate) return a->lhs;
  return make_unary(NodeKind::Negate, std::move(a));
}

Expr sqrt(Expr a) { return make_unary(NodeKind::Sqrt, std::move(a)); }

Expr square(Expr a) {
  if (is_zero(a) || is_one(a)) return a;
  return make_unary(NodeKind::Square, std::move(a));
}

Expr add(Expr a, Expr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  if (b->kind == NodeKind::Negate) return make_binary(NodeKind::Sub, std::move(a), b->lhs);
  return make_binary(NodeKind::Add, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return negate(std::move(b));
  return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
  if (is_zero(a) || is_zero(b)) return constant(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  if (a->kind == NodeKind::Negate) return negate(mul(a->lhs, std::move(b)));
  if (b->kind == NodeKind::Negate) return negate(mul(std::move(a), b->lhs));
  return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
  if (is_zero(a)) return a;
  if (is_one(b)) return a;
  return make_binary(NodeKind::Div, std::move(a), std::move(b));
}

Expr pow(Expr a, int k) {
  if (k == 0) return constant(1.0);
  if (k == 1) return a;
  if (k == 2) return square(std::move(a));
  return make_pow(std::move(a), k);
}

}  // namespace expr

Expr differentiate(const Expr& e, std::size_t var) {
  using namespace expr;
  switch (e->kind) {
    case NodeKind::Variable:
      return constant(e->index == var ? 1.0 : 0.0);
    case NodeKind::Constant:
      return constant(0.0);
    case NodeKind::Negate:
      return negate(differentiate(e->lhs, var));
    case NodeKind::Sqrt:
      return div(differentiate(e->lhs, var), mul(constant(2.0), e));
    case NodeKind::Square:
      return mul(mul(constant(2.0), e->lhs), differentiate(e->lhs, var));
    case NodeKind::Add:
      return add(differentiate(e->lhs, var), differentiate(e->rhs, var));
    case NodeKind::Sub:
      return sub(differentiate(e->lhs, var), differentiate(e->rhs, var));
    case NodeKind::Mul:
      return add(mul(differentiate(e->lhs, var), e->rhs), mul(e->lhs, differentiate(e->rhs, var)));
    case NodeKind::Div: {
      Expr du = differentiate(e->lhs, var);
      Expr dv = differentiate(e->rhs, var);
      return sub(div(du, e->rhs), div(mul(e->lhs, dv), square(e->rhs)));
    }
    case NodeKind::Pow: {
      const int k = e->exponent;
      Expr factor = mul(constant(static_cast<double>(k)), pow(e->lhs, k - 1));
      return mul(factor, differentiate(e->lhs, var));
    }
  }
  throw std::logic_error("unknown node kind");
}

namespace {

// Binding strength used for parenthesization; mirrors the parser grammar.
int precedence(const Expr& e) {
  switch (e->kind) {
    case NodeKind::Add:
    case NodeKind::Sub:
      return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
      return 2;
    case NodeKind::Negate:
      return 3;
    case NodeKind::Square:
    case NodeKind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print(const Expr& e, std::span<const std::string> names, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::span<const std::string> names, std::string& out) {
  if (wrap) out += '(';
  print(e, names, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::span<const std::string> names, std::string& out) {
  switch (e->kind) {
    case NodeKind::Variable:
      if (e->index < names.size())
        out += names[e->index];
      else
        out += "x" + std::to_string(e->index);
      return;
    case NodeKind::Constant:
      out += e->text;
      return;
    case NodeKind::Negate:
      out += '-';
      print_wrapped(e->lhs, precedence(e->lhs) < 3, names, out);
      return;
    case NodeKind::Sqrt:
      out += "sqrt(";
      print(e->lhs, names, out);
      out += ')';
      return;
    case NodeKind::Square:
    case NodeKind::Pow:
      print_wrapped(e->lhs, precedence(e->lhs) < 5, names, out);
      out += '^';
      out += std::to_string(e->kind == NodeKind::Square ? 2 : e->exponent);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
      print(e->lhs, names, out);
      out += e->kind == NodeKind::Add ? " + " : " - ";
      print_wrapped(e->rhs, precedence(e->rhs) <= 1, names, out);
      return;
    case NodeKind::Mul:
    case NodeKind::Div:
      print_wrapped(e->lhs, precedence(e->lhs) < 2, names, out);
      out += e->kind == NodeKind::Mul ? "*" : "/";
      print_wrapped(e->rhs, precedence(e->rhs) <= 2, names, out);
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e, std::span<const std::string> names) {
  std::string out;
  print(e, names, out);
  return out;
}

std::size_t node_count(const Expr& e) {
  if (!e) return 0;
  return 1 + node_count(e->lhs) + node_count(e->rhs);
}

std::size_t max_variable_index(const Expr& e) {
  if (!e) return 0;
  if (e->kind == NodeKind::Variable) return e->index + 1;
  return std::max(max_variable_index(e->lhs), max_variable_index(e->rhs));
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Variable:
      return a->index == b->index;
    case NodeKind::Constant:
      return a->value == b->value;
    case NodeKind::Pow:
      if (a->exponent != b->exponent) return false;
      break;
    default:
      break;
  }
  return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
}

// ---------------------------------------------------------------------------

Tape::Tape(std::span<const Expr> outputs) {
  std::unordered_map<const Node*, int> slot;
  // Post-order emission with an explicit stack; shared subtrees emit once.
  auto emit = [&](const Expr& root) {
    std::vector<std::pair<const Node*, bool>> stack{{root.get(), false}};
    while (!stack.empty()) {
      auto [n, expanded] = stack.back();
      stack.pop_back();
      if (slot.count(n)) continue;
      if (!expanded) {
        stack.push_back({n, true});
        if (n->rhs) stack.push_back({n->rhs.get(), false});
        if (n->lhs) stack.push_back({n->lhs.get(), false});
        continue;
      }
      Instr in;
      in.kind = n->kind;
      if (n->lhs) in.a = slot.at(n->lhs.get());
      if (n->rhs) in.b = slot.at(n->rhs.get());
      in.k = n->exponent;
      in.var = n->index;
      if (n->kind == NodeKind::Constant) in.c = n->value;
      slot[n] = static_cast<int>(code_.size());
      code_.push_back(in);
    }
    return slot.at(root.get());
  };
  for (const auto& e : outputs) outputs_.push_back(emit(e));
}

namespace {

[[noreturn]] void fail(const char* what, std::size_t node) {
  throw EvaluationError(std::string(what) + " at node " + std::to_string(node), node);
}

inline double op_const(const Interval& c, double) { return c.mid(); }
inline Interval op_const(const Interval& c, const Interval&) { return c; }

inline double op_sqrt(double a, std::size_t node) {
  if (!(a >= 0)) fail("square root of a negative value", node);
  return std::sqrt(a);
}
inline Interval op_sqrt(const Interval& a, std::size_t node) {
  if (!(a.lo() > 0)) fail("square root argument not strictly positive", node);
  return sqrt(a);
}

inline double op_div(double a, double b, std::size_t node) {
  if (b == 0.0) fail("division by zero", node);
  return a / b;
}
inline Interval op_div(const Interval& a, const Interval& b, std::size_t node) {
  auto q = try_div(a, b);
  if (!q) fail("division by an interval containing zero", node);
  return *q;
}

inline double op_pow(double a, int k) {
  if (k < 0) return 1.0 / op_pow(a, -k);
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a;
  return r;
}
inline Interval op_pow(const Interval& a, int k) { return pow(a, k); }

inline double op_square(double a) { return a * a; }
inline Interval op_square(const Interval& a) { return square(a); }

}  // namespace

template <class T>
void Tape::run(std::span<const T> x, std::vector<T>& s) const {
  s.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.kind) {
      case NodeKind::Variable:
        if (in.var >= x.size()) throw std::invalid_argument("variable index out of range");
        s[i] = x[in.var];
        break;
      case NodeKind::Constant:
        s[i] = op_const(in.c, T{});
        break;
      case NodeKind::Negate:
        s[i] = -s[in.a];
        break;
      case NodeKind::Sqrt:
        s[i] = op_sqrt(s[in.a], i);
        break;
      case NodeKind::Square:
        s[i] = op_square(s[in.a]);
        break;
      case NodeKind::Add:
        s[i] = s[in.a] + s[in.b];
        break;
      case NodeKind::Sub:
        s[i] = s[in.a] - s[in.b];
        break;
      case NodeKind::Mul:
        s[i] = s[in.a] * s[in.b];
        break;
      case NodeKind::Div:
        s[i] = op_div(s[in.a], s[in.b], i);
        break;
      case NodeKind::Pow:
        s[i] = op_pow(s[in.a], in.k);
        break;
    }
  }
}

void Tape::eval(std::span<const double> x, std::span<double> out) const {
  thread_local std::vector<double> scratch;
  run(x, scratch);
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = scratch[outputs_[i]];
}

void Tape::eval(std::span<const Interval> x, std::span<Interval> out) const {
  thread_local std::vector<Interval> scratch;
  run(x, scratch);
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = scratch[outputs_[i]];
}

}  // namespace certsurf
