#include "fbreg/cli/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace fbreg::cli {

ExpressionError::ExpressionError(std::size_t column, const std::string& message)
    : Error(Module::Cli, ErrorCode::Config,
            "E_SYNTAX: column " + std::to_string(column) + ": " + message),
      column_(column),
      detail_(message) {}

struct Expression::Node {
  enum class Kind { Number, X, Y, T, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

double pos_part(double v) { return v > 0.0 ? v : 0.0; }
double f_abs(double v) { return std::fabs(v); }
double f_exp(double v) { return std::exp(v); }
double f_log(double v) { return std::log(v); }
double f_sqrt(double v) { return std::sqrt(v); }
double f_sin(double v) { return std::sin(v); }
double f_cos(double v) { return std::cos(v); }

struct Function {
  std::string_view name;
  double (*fn)(double);
};

constexpr std::array<Function, 7> kFunctions{{{"pos", pos_part},
                                              {"abs", f_abs},
                                              {"exp", f_exp},
                                              {"log", f_log},
                                              {"sqrt", f_sqrt},
                                              {"sin", f_sin},
                                              {"cos", f_cos}}};

NodePtr make(Node::Kind kind, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Node>();
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    skip();
    if (pos_ == s_.size()) throw ExpressionError(1, "empty expression");
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& msg) const { throw ExpressionError(pos_ + 1, msg); }

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

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+'))
        n = make(Node::Kind::Add, n, product());
      else if (accept('-'))
        n = make(Node::Kind::Sub, n, product());
      else
        return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make(Node::Kind::Mul, n, unary());
      else if (accept('/'))
        n = make(Node::Kind::Div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ == s_.size()) error("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = sum();
      if (!accept(')')) error("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    error("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr literal() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || !std::isfinite(v)) error("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return number(v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);
    if (id == "x") return make(Node::Kind::X);
    if (id == "y") return make(Node::Kind::Y);
    if (id == "t") return make(Node::Kind::T);
    if (id == "pi") return number(std::numbers::pi);
    if (id == "e") return number(std::numbers::e);
    for (const auto& f : kFunctions) {
      if (f.name != id) continue;
      if (!accept('(')) error("expected '(' after " + std::string(id));
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Call;
      n->fn = f.fn;
      n->a = sum();
      if (!accept(')')) error("expected ')'");
      return n;
    }
    pos_ = start;
    error("unknown name '" + std::string(id) + "'");
  }
};

double eval(const Node& n, double x, double y, double t) {
  switch (n.kind) {
    case Node::Kind::Number: return n.value;
    case Node::Kind::X: return x;
    case Node::Kind::Y: return y;
    case Node::Kind::T: return t;
    case Node::Kind::Neg: return -eval(*n.a, x, y, t);
    case Node::Kind::Add: return eval(*n.a, x, y, t) + eval(*n.b, x, y, t);
    case Node::Kind::Sub: return eval(*n.a, x, y, t) - eval(*n.b, x, y, t);
    case Node::Kind::Mul: return eval(*n.a, x, y, t) * eval(*n.b, x, y, t);
    case Node::Kind::Div: return eval(*n.a, x, y, t) / eval(*n.b, x, y, t);
    case Node::Kind::Pow: return std::pow(eval(*n.a, x, y, t), eval(*n.b, x, y, t));
    case Node::Kind::Call: return n.fn(eval(*n.a, x, y, t));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = std::string(text);
  return e;
}

double Expression::operator()(double x, double y, double t) const {
  require(root_ != nullptr, Module::Cli, ErrorCode::InvalidArgument, "empty expression");
  return eval(*root_, x, y, t);
}

}  // namespace fbreg::cli
