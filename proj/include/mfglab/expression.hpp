#pragma once

#include <memory>
#include <string>

namespace mfg {

/// Closed-form scalar function of the density, parsed from a config string.
/// Grammar: + - * / ^, unary minus, parentheses, numeric literals, the
/// variable `rho`, and the functions sqrt, exp, log, abs, sin, cos.
/// Parse failures throw ConfigError naming the offending position.
class ScalarExpression {
 public:
  ScalarExpression() = default;
  static ScalarExpression parse(const std::string& text);

  double operator()(double rho) const;
  const std::string& source() const { return source_; }
  bool empty() const { return root_ == nullptr; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace mfg
