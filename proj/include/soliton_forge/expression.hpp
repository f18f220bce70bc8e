#pragma once

// Arithmetic expressions over named variables, evaluated on jets.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?        right associative, binds tighter than unary minus
//   primary := number | name | name '(' expr ')' | '(' expr ')'
//
// Functions: ln, exp, sin, cos, arctan (alias atan), sqrt. Constants: pi.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "soliton_forge/errors.hpp"
#include "soliton_forge/jet.hpp"

namespace sforge {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t column) : Error(what), column_(column) {}
  /// 1-based column of the offending token.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class Expression {
 public:
  struct Node;

  /// Throws ParseError. Names not in `variables` (other than pi) are rejected.
  static Expression parse(std::string_view text, const std::vector<std::string>& variables);
  static Expression constant(double value);

  /// `vars` in the order given to parse.
  Jet3 evaluate(std::span<const Jet3> vars) const;
  double evaluate(std::span<const double> vars) const;

  bool is_constant() const;
  const std::string& text() const noexcept { return text_; }
  /// Indices of the variables that occur.
  std::vector<int> dependencies() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace sforge
