#include "certsurf/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace certsurf {

namespace {

constexpr int kMaxDepth = 256;

class Parser {
 public:
  Parser(const std::string& text, std::vector<std::string>* names, bool discover, int line)
      : s_(text), names_(names), discover_(discover), line_(line) {}

  Expr parse() {
    Expr e = expression();
    skip();
    if (pos_ < s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) p.error("expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  Expr expression() {
    DepthGuard guard(*this);
    Expr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = expr::make_binary(NodeKind::Add, lhs, term());
      else if (accept('-'))
        lhs = expr::make_binary(NodeKind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = expr::make_binary(NodeKind::Mul, lhs, unary());
      else if (accept('/'))
        lhs = expr::make_binary(NodeKind::Div, lhs, unary());
      else
        return lhs;
    }
  }

  Expr unary() {
    DepthGuard guard(*this);
    if (accept('-')) return expr::make_unary(NodeKind::Negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    skip();
    bool negative = false;
    if (accept('-'))
      negative = true;
    else
      accept('+');
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) error("exponent must be an integer literal");
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      error("non-integer exponent");
    std::string digits = s_.substr(start, pos_ - start);
    if (digits.size() > 6) error("exponent too large");
    int k = std::stoi(digits);
    if (negative) k = -k;
    if (k == 2) return expr::make_unary(NodeKind::Square, base);
    return expr::make_pow(base, k);
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t d = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ - d;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) error("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    std::string text = s_.substr(start, pos_ - start);
    Interval v;
    try {
      v = Interval::from_decimal(text);
    } catch (const std::invalid_argument&) {
      error("malformed number");
    }
    return expr::constant(v, text);
  }

  Expr primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!accept(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string ident = s_.substr(start, pos_ - start);
      if (ident == "sqrt") {
        if (!accept('(')) error("expected '(' after sqrt");
        Expr e = expression();
        if (!accept(')')) error("expected ')'");
        return expr::make_unary(NodeKind::Sqrt, e);
      }
      if (peek() == '(') {
        pos_ = start;
        error("unknown function '" + ident + "'");
      }
      auto it = std::find(names_->begin(), names_->end(), ident);
      if (it == names_->end()) {
        if (!discover_) {
          pos_ = start;
          error("unknown identifier '" + ident + "'");
        }
        names_->push_back(ident);
        it = names_->end() - 1;
      }
      return expr::variable(static_cast<std::size_t>(it - names_->begin()));
    }
    if (c == '\0') error("unexpected end of input");
    error("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::vector<std::string>* names_;
  bool discover_;
  int line_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_literal_zero(const Expr& e) {
  return e->kind == NodeKind::Constant && e->value.lo() == 0.0 && e->value.hi() == 0.0;
}

}  // namespace

Expr parse_expression(const std::string& text, const std::vector<std::string>& names, int line) {
  std::vector<std::string> copy = names;
  return Parser(text, &copy, false, line).parse();
}

ParsedSystem parse_system(const std::string& source,
                          const std::optional<std::vector<std::string>>& variables) {
  ParsedSystem out;
  bool discover = !variables.has_value();
  if (variables) out.variables = *variables;

  std::istringstream in(source);
  std::string raw;
  int line = 0;
  bool first_content = true;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    if (first_content) {
      first_content = false;
      for (const char* key : {"variables:", "variables", "vars:", "vars"}) {
        std::string k(key);
        if (text.rfind(k, 0) == 0 && (k.back() == ':' || (text.size() > k.size() && std::isspace(
                                                                   static_cast<unsigned char>(text[k.size()]))))) {
          std::string rest = text.substr(k.size());
          std::replace(rest.begin(), rest.end(), ',', ' ');
          std::istringstream names(rest);
          std::vector<std::string> declared;
          for (std::string v; names >> v;) {
            if (!(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_') || v == "sqrt")
              throw ParseError("invalid variable name '" + v + "'", line, 1);
            if (std::find(declared.begin(), declared.end(), v) != declared.end())
              throw ParseError("duplicate variable '" + v + "'", line, 1);
            declared.push_back(v);
          }
          if (declared.empty()) throw ParseError("empty variable declaration", line, 1);
          out.variables = declared;
          discover = false;
          text.clear();
          break;
        }
      }
      if (text.empty()) continue;
    }

    auto eq = text.find('=');
    Expr e;
    if (eq == std::string::npos) {
      e = Parser(text, &out.variables, discover, line).parse();
    } else {
      if (text.find('=', eq + 1) != std::string::npos)
        throw ParseError("more than one '='", line, static_cast<int>(eq) + 1);
      std::string lhs_text = text.substr(0, eq);
      std::string rhs_text = text.substr(eq + 1);
      Expr lhs = Parser(lhs_text, &out.variables, discover, line).parse();
      Expr rhs = Parser(rhs_text, &out.variables, discover, line).parse();
      e = is_literal_zero(rhs) ? lhs : expr::make_binary(NodeKind::Sub, lhs, rhs);
    }
    out.equations.push_back(e);
  }
  for (const auto& e : out.equations) out.sources.push_back(to_string(e, out.variables));
  if (out.equations.empty()) throw ParseError("no equations", std::max(line, 1), 1);
  return out;
}

Interval parse_number(const std::string& text) {
  Expr e = parse_expression(text, {});
  Tape tape(std::span<const Expr>(&e, 1));
  Interval v;
  tape.eval(std::span<const Interval>{}, std::span<Interval>(&v, 1));
  return v;
}

}  // namespace certsurf
