#pragma once

#include <optional>
#include <string>
#include <vector>

#include "certsurf/expression.hpp"

namespace certsurf {

/// Malformed input text; carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ParsedSystem {
  std::vector<std::string> variables;
  std::vector<Expr> equations;
  std::vector<std::string> sources;  ///< one normalized source line per equation
};

// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' ['-'|'+'] integer)?
//   primary := number | identifier | 'sqrt' '(' expr ')' | '(' expr ')'
// `x^2` becomes a Square node; p/q literals are ordinary divisions.

/// Parses one expression over the given variable names.
Expr parse_expression(const std::string& text, const std::vector<std::string>& names, int line = 1);

/// Parses a system: one equation per line, each optionally written as
/// `lhs = rhs` (meaning lhs - rhs; `= 0` is dropped).  Blank lines and lines
/// starting with '#' are ignored.  A leading `variables: x y z` line fixes
/// the variable order; otherwise variables are ordered by first appearance.
ParsedSystem parse_system(const std::string& source,
                          const std::optional<std::vector<std::string>>& variables = std::nullopt);

/// Parses a real number that may be written as a rational `p/q`.  Returns an
/// enclosure of the exact value.
Interval parse_number(const std::string& text);

}  // namespace certsurf
