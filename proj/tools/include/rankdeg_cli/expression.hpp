#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace rankdeg::cli {

/// Variables an expression may reference. y1..yr index into y (1-based in the text).
struct ExprScope {
  double t = 0.0;
  double s = 0.0;
  const Eigen::VectorXd* y = nullptr;
};

/// Parsed scalar expression over t, s, y1..yr with + - * / ^ (right associative), unary
/// minus, parentheses, numeric literals, pi, and the functions sin, cos, exp.
class Expression {
 public:
  struct Node;

  /// Throws rankdeg::InvalidInput with the offending position on syntax errors, and when
  /// a y index exceeds max_y (0 forbids y entirely) or s appears without allow_s.
  static Expression parse(std::string_view text, int max_y = 0, bool allow_s = false);
  static Expression constant(double v);

  double operator()(const ExprScope& scope) const;
  const std::string& text() const { return text_; }
  bool is_constant() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace rankdeg::cli
