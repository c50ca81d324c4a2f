#include "mfglab/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "mfglab/errors.hpp"

namespace mfg {

struct ScalarExpression::Node {
  enum class Op {
    Constant, Variable, Add, Sub, Mul, Div, Pow, Neg,
    Sqrt, Exp, Log, Abs, Sin, Cos
  };
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double rho) const {
    switch (op) {
      case Op::Constant: return value;
      case Op::Variable: return rho;
      case Op::Add: return lhs->eval(rho) + rhs->eval(rho);
      case Op::Sub: return lhs->eval(rho) - rhs->eval(rho);
      case Op::Mul: return lhs->eval(rho) * rhs->eval(rho);
      case Op::Div: return lhs->eval(rho) / rhs->eval(rho);
      case Op::Pow: return std::pow(lhs->eval(rho), rhs->eval(rho));
      case Op::Neg: return -lhs->eval(rho);
      case Op::Sqrt: return std::sqrt(lhs->eval(rho));
      case Op::Exp: return std::exp(lhs->eval(rho));
      case Op::Log: return std::log(lhs->eval(rho));
      case Op::Abs: return std::fabs(lhs->eval(rho));
      case Op::Sin: return std::sin(lhs->eval(rho));
      case Op::Cos: return std::cos(lhs->eval(rho));
    }
    return 0.0;
  }
};

namespace {

using Node = ScalarExpression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node::Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr,
                  double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    auto node = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("bad expression \"" + text_ + "\" at position " +
                      std::to_string(pos_) + ": " + why);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expression() {
    auto node = term();
    while (true) {
      if (consume('+')) {
        node = make_node(Node::Op::Add, node, term());
      } else if (consume('-')) {
        node = make_node(Node::Op::Sub, node, term());
      } else {
        return node;
      }
    }
  }

  NodePtr term() {
    auto node = factor();
    while (true) {
      if (consume('*')) {
        node = make_node(Node::Op::Mul, node, factor());
      } else if (consume('/')) {
        node = make_node(Node::Op::Div, node, factor());
      } else {
        return node;
      }
    }
  }

  // Unary minus binds looser than '^' (so -rho^2 is -(rho^2)), and '^' is
  // right-associative with a signed exponent allowed (2^-3).
  NodePtr factor() {
    if (consume('-')) return make_node(Node::Op::Neg, factor());
    if (consume('+')) return factor();
    auto base = primary();
    if (consume('^')) {
      return make_node(Node::Op::Pow, base, factor());
    }
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return identifier();
    }
    if (consume('(')) {
      auto node = expression();
      if (!consume(')')) fail("expected ')'");
      return node;
    }
    fail("expected a number, name, or '('");
  }

  NodePtr number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_node(Node::Op::Constant, nullptr, nullptr, v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "rho") return make_node(Node::Op::Variable);

    Node::Op op;
    if (name == "sqrt") op = Node::Op::Sqrt;
    else if (name == "exp") op = Node::Op::Exp;
    else if (name == "log") op = Node::Op::Log;
    else if (name == "abs") op = Node::Op::Abs;
    else if (name == "sin") op = Node::Op::Sin;
    else if (name == "cos") op = Node::Op::Cos;
    else fail("unknown name '" + name + "'");

    if (!consume('(')) fail("expected '(' after '" + name + "'");
    auto arg = expression();
    if (!consume(')')) fail("expected ')'");
    return make_node(op, arg);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarExpression ScalarExpression::parse(const std::string& text) {
  ScalarExpression e;
  e.root_ = Parser(text).parse();
  e.source_ = text;
  return e;
}

double ScalarExpression::operator()(double rho) const {
  if (!root_) throw StructuralError("evaluating an empty expression");
  return root_->eval(rho);
}

}  // namespace mfg
