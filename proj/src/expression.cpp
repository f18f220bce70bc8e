#include "soliton_forge/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

namespace sforge {

enum class Op { number, variable, negate, add, sub, mul, div, pow, ln, exp, sin, cos, atan, sqrt };

struct Expression::Node {
  Op op = Op::number;
  double value = 0.0;
  int var = -1;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

bool constant_tree(const Expression::Node& n) {
  if (n.op == Op::variable) return false;
  if (n.lhs && !constant_tree(*n.lhs)) return false;
  if (n.rhs && !constant_tree(*n.rhs)) return false;
  return true;
}

class Parser {
 public:
  Parser(std::string_view s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  NodePtr parse() {
    skip();
    if (pos_ == s_.size()) fail("empty expression");
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at column " + std::to_string(pos_ + 1), pos_ + 1);
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

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Op::add, lhs, term());
      else if (accept('-'))
        lhs = make(Op::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Op::mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Op::div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Op::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ == s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr literal() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == first) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return number(v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      static const std::pair<const char*, Op> fns[] = {{"ln", Op::ln},         {"exp", Op::exp},  {"sin", Op::sin},
                                                       {"cos", Op::cos},       {"arctan", Op::atan},
                                                       {"atan", Op::atan},     {"sqrt", Op::sqrt}};
      for (const auto& [fname, op] : fns) {
        if (id != fname) continue;
        ++pos_;
        auto arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(op, arg);
      }
      pos_ = start;
      fail("unknown function '" + id + "'");
    }
    const auto it = std::find(vars_.begin(), vars_.end(), id);
    if (it != vars_.end()) {
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::variable;
      n->var = static_cast<int>(it - vars_.begin());
      return n;
    }
    if (id == "pi") return number(std::numbers::pi);
    pos_ = start;
    fail("unknown name '" + id + "'");
  }

  std::string_view s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

template <int N>
Jet<N> eval(const Expression::Node& n, std::span<const Jet<N>> vars, int dim) {
  switch (n.op) {
    case Op::number:
      return Jet<N>::constant(dim, n.value);
    case Op::variable:
      return vars[static_cast<std::size_t>(n.var)];
    case Op::negate:
      return eval<N>(*n.lhs, vars, dim) * -1.0;
    case Op::add:
      return eval<N>(*n.lhs, vars, dim) + eval<N>(*n.rhs, vars, dim);
    case Op::sub:
      return eval<N>(*n.lhs, vars, dim) - eval<N>(*n.rhs, vars, dim);
    case Op::mul:
      return eval<N>(*n.lhs, vars, dim) * eval<N>(*n.rhs, vars, dim);
    case Op::div:
      return eval<N>(*n.lhs, vars, dim) / eval<N>(*n.rhs, vars, dim);
    case Op::pow:
      return pow(eval<N>(*n.lhs, vars, dim), eval<N>(*n.rhs, vars, dim));
    case Op::ln:
      return log(eval<N>(*n.lhs, vars, dim));
    case Op::exp:
      return exp(eval<N>(*n.lhs, vars, dim));
    case Op::sin:
      return sin(eval<N>(*n.lhs, vars, dim));
    case Op::cos:
      return cos(eval<N>(*n.lhs, vars, dim));
    case Op::atan:
      return atan(eval<N>(*n.lhs, vars, dim));
    case Op::sqrt:
      return sqrt(eval<N>(*n.lhs, vars, dim));
  }
  throw UsageError("bad expression node");
}

void collect(const Expression::Node& n, std::set<int>& out) {
  if (n.op == Op::variable) out.insert(n.var);
  if (n.lhs) collect(*n.lhs, out);
  if (n.rhs) collect(*n.rhs, out);
}

}  // namespace

Expression Expression::parse(std::string_view text, const std::vector<std::string>& variables) {
  Expression e;
  e.root_ = Parser(text, variables).parse();
  e.text_ = std::string(text);
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  e.root_ = number(value);
  e.text_ = detail::format_value(value);
  return e;
}

Jet3 Expression::evaluate(std::span<const Jet3> vars) const {
  const int dim = vars.empty() ? 0 : vars.front().dim();
  return eval<3>(*root_, vars, dim);
}

double Expression::evaluate(std::span<const double> vars) const {
  std::vector<Jet<0>> v;
  v.reserve(vars.size());
  const int dim = static_cast<int>(vars.size());
  for (double x : vars) v.push_back(Jet<0>::constant(dim, x));
  return eval<0>(*root_, std::span<const Jet<0>>(v), dim).value();
}

bool Expression::is_constant() const { return constant_tree(*root_); }

std::vector<int> Expression::dependencies() const {
  std::set<int> s;
  collect(*root_, s);
  return {s.begin(), s.end()};
}

}  // namespace sforge
