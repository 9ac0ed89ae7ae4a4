#include "rankdeg_cli/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "rankdeg/types.hpp"

namespace rankdeg::cli {

enum class Op { number, var_t, var_s, var_y, neg, add, sub, mul, div, pow, sin, cos, exp };

struct Expression::Node {
  Op op = Op::number;
  double value = 0.0;
  int index = 0;  // y index, 0-based
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr leaf(Op op, double value = 0.0, int index = 0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  n->index = index;
  return n;
}

NodePtr node(Op op, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := '-' unary | '+' unary | power
// power  := atom ('^' unary)?
// atom   := number | name | name '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view text, int max_y, bool allow_s) : text_(text), max_y_(max_y), allow_s_(allow_s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("expression \"" + std::string(text_) + "\" at " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) {
        lhs = node(Op::add, lhs, term());
      } else if (eat('-')) {
        lhs = node(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) {
        lhs = node(Op::mul, lhs, unary());
      } else if (eat('/')) {
        lhs = node(Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (eat('-')) return node(Op::neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return node(Op::pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("bad number");
    pos_ += static_cast<size_t>(end - rest.c_str());
    return leaf(Op::number, v);
  }

  NodePtr name() {
    const size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string id(text_.substr(start, pos_ - start));
    if (id == "sin" || id == "cos" || id == "exp") {
      if (!eat('(')) fail("expected '(' after " + id);
      NodePtr arg = expr();
      if (!eat(')')) fail("expected ')'");
      return node(id == "sin" ? Op::sin : id == "cos" ? Op::cos : Op::exp, arg);
    }
    if (id == "t") return leaf(Op::var_t);
    if (id == "s") {
      if (!allow_s_) fail("variable s is not available here");
      return leaf(Op::var_s);
    }
    if (id == "pi") return leaf(Op::number, std::numbers::pi);
    if (id.size() > 1 && id[0] == 'y' &&
        id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::atoi(id.c_str() + 1);
      if (k < 1 || k > max_y_) fail("variable " + id + " out of range");
      return leaf(Op::var_y, 0.0, k - 1);
    }
    fail("unknown name '" + id + "'");
  }

  std::string_view text_;
  int max_y_;
  bool allow_s_;
  size_t pos_ = 0;
};

double eval(const Expression::Node& n, const ExprScope& sc) {
  switch (n.op) {
    case Op::number:
      return n.value;
    case Op::var_t:
      return sc.t;
    case Op::var_s:
      return sc.s;
    case Op::var_y:
      if (!sc.y || n.index >= sc.y->size()) throw EvaluationError("expression: state vector too short");
      return (*sc.y)(n.index);
    case Op::neg:
      return -eval(*n.a, sc);
    case Op::add:
      return eval(*n.a, sc) + eval(*n.b, sc);
    case Op::sub:
      return eval(*n.a, sc) - eval(*n.b, sc);
    case Op::mul:
      return eval(*n.a, sc) * eval(*n.b, sc);
    case Op::div:
      return eval(*n.a, sc) / eval(*n.b, sc);
    case Op::pow:
      return std::pow(eval(*n.a, sc), eval(*n.b, sc));
    case Op::sin:
      return std::sin(eval(*n.a, sc));
    case Op::cos:
      return std::cos(eval(*n.a, sc));
    case Op::exp:
      return std::exp(eval(*n.a, sc));
  }
  return 0.0;
}

bool constant_tree(const Expression::Node& n) {
  switch (n.op) {
    case Op::var_t:
    case Op::var_s:
    case Op::var_y:
      return false;
    case Op::number:
      return true;
    default:
      return constant_tree(*n.a) && (!n.b || constant_tree(*n.b));
  }
}

}  // namespace

Expression Expression::parse(std::string_view text, int max_y, bool allow_s) {
  Expression e;
  e.root_ = Parser(text, max_y, allow_s).run();
  e.text_ = std::string(text);
  return e;
}

Expression Expression::constant(double v) {
  Expression e;
  e.root_ = leaf(Op::number, v);
  e.text_ = std::to_string(v);
  return e;
}

double Expression::operator()(const ExprScope& scope) const {
  if (!root_) throw EvaluationError("expression: empty");
  return eval(*root_, scope);
}

bool Expression::is_constant() const { return root_ && constant_tree(*root_); }

}  // namespace rankdeg::cli
