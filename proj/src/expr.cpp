#include "measurefit/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

namespace measurefit::expr {

namespace {

enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs, Tanh };

constexpr std::array<std::string_view, 8> kFuncNames = {
    "sin", "cos", "tan", "exp", "ln", "sqrt", "abs", "tanh"};

double apply_func(Func f, double v) {
  switch (f) {
    case Func::Sin:  return std::sin(v);
    case Func::Cos:  return std::cos(v);
    case Func::Tan:  return std::tan(v);
    case Func::Exp:  return std::exp(v);
    case Func::Ln:   return std::log(v);
    case Func::Sqrt: return std::sqrt(v);
    case Func::Abs:  return std::abs(v);
    case Func::Tanh: return std::tanh(v);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

struct Expr::Node {
  enum class Kind { Number, Variable, Parameter, Negate, Binary, Call };

  Kind kind;
  double number = 0.0;           // Kind::Number
  std::string name;              // Kind::Parameter
  char op = 0;                   // Kind::Binary: one of + - * / ^
  Func func = Func::Sin;         // Kind::Call
  std::shared_ptr<const Node> lhs, rhs;  // rhs null for Negate/Call
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Node = Expr::Node;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_unary(Node::Kind kind, NodePtr child) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(child);
  return n;
}

class Parser {
public:
  Parser(std::string_view src, std::set<std::string>& params)
      : src_(src), params_(params) {}

  NodePtr run() {
    NodePtr e = parse_additive();
    skip_ws();
    if (pos_ != src_.size()) fail("end of input or an operator (+, -, *, /, ^)");
    return e;
  }

private:
  static constexpr int kMaxDepth = 200;

  std::string_view src_;
  std::set<std::string>& params_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError(pos_, expected);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool eof() {
    skip_ws();
    return pos_ >= src_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth)
        throw ParseError(p_.pos_, "a shallower expression (nesting too deep)");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  NodePtr parse_additive() {
    DepthGuard guard(*this);
    NodePtr lhs = parse_multiplicative();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      NodePtr rhs = parse_multiplicative();
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Binary;
      n->op = c;
      n->lhs = std::move(lhs);
      n->rhs = std::move(rhs);
      lhs = std::move(n);
    }
  }

  NodePtr parse_multiplicative() {
    DepthGuard guard(*this);
    NodePtr lhs = parse_unary();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      NodePtr rhs = parse_unary();
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Binary;
      n->op = c;
      n->lhs = std::move(lhs);
      n->rhs = std::move(rhs);
      lhs = std::move(n);
    }
  }

  NodePtr parse_unary() {
    DepthGuard guard(*this);
    if (consume('-')) return make_unary(Node::Kind::Negate, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    DepthGuard guard(*this);
    NodePtr base = parse_atom();
    if (!consume('^')) return base;
    // Right associative; the exponent admits a leading unary minus (2^-3).
    NodePtr exponent = parse_unary();
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = '^';
    n->lhs = std::move(base);
    n->rhs = std::move(exponent);
    return n;
  }

  NodePtr parse_atom() {
    DepthGuard guard(*this);
    if (eof()) fail("an expression (number, 'x', identifier, '(' or '-')");
    char c = src_[pos_];

    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_additive();
      if (!consume(')')) fail("')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    fail("an expression (number, 'x', identifier, '(' or '-')");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && src_[start] == '.')) {
      pos_ = start;
      fail("a number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
        ++pos_;
      if (pos_ < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // no digits after the exponent marker: literal ends here
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_,
                                     value);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("a number");
    }
    return make_number(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));

    if (peek() == '(') {
      // Function call; the name must be a known function.
      int found = -1;
      for (std::size_t i = 0; i < kFuncNames.size(); ++i)
        if (kFuncNames[i] == name) found = static_cast<int>(i);
      if (found < 0) {
        pos_ = start;
        throw ParseError(start, "a known function name (sin, cos, tan, exp, "
                                "ln, sqrt, abs, tanh); got '" + name + "'");
      }
      ++pos_;  // '('
      NodePtr arg = parse_additive();
      if (!consume(')')) fail("')'");
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Call;
      n->func = static_cast<Func>(found);
      n->lhs = std::move(arg);
      return n;
    }

    if (name == "x") {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Variable;
      return n;
    }
    params_.insert(name);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Parameter;
    n->name = std::move(name);
    return n;
  }
};

double eval_node(const Node& n, double x, const Bindings& bindings) {
  switch (n.kind) {
    case Node::Kind::Number:
      return n.number;
    case Node::Kind::Variable:
      return x;
    case Node::Kind::Parameter: {
      auto it = bindings.find(n.name);
      if (it == bindings.end())
        throw EvalError("unbound parameter '" + n.name + "'");
      return it->second;
    }
    case Node::Kind::Negate:
      return -eval_node(*n.lhs, x, bindings);
    case Node::Kind::Binary: {
      const double a = eval_node(*n.lhs, x, bindings);
      const double b = eval_node(*n.rhs, x, bindings);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
      }
      return std::numeric_limits<double>::quiet_NaN();
    }
    case Node::Kind::Call:
      return apply_func(n.func, eval_node(*n.lhs, x, bindings));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Precedence levels used by the printer; must agree with the grammar.
int prec(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Binary:
      if (n.op == '+' || n.op == '-') return 1;
      if (n.op == '*' || n.op == '/') return 2;
      return 4;  // '^'
    case Node::Kind::Negate:
      return 3;
    default:
      return 5;
  }
}

void print_node(const Node& n, std::string& out) {
  auto child = [&](const Node& c, bool parens) {
    if (parens) out += '(';
    print_node(c, out);
    if (parens) out += ')';
  };
  switch (n.kind) {
    case Node::Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case Node::Kind::Variable:
      out += 'x';
      return;
    case Node::Kind::Parameter:
      out += n.name;
      return;
    case Node::Kind::Negate:
      out += '-';
      child(*n.lhs, prec(*n.lhs) < 3);
      return;
    case Node::Kind::Binary: {
      const int p = prec(n);
      if (n.op == '^') {
        // Right associative; the base must outrank '^', the exponent is
        // parsed at unary level.
        child(*n.lhs, prec(*n.lhs) <= 4);
        out += '^';
        child(*n.rhs, prec(*n.rhs) < 3);
      } else {
        child(*n.lhs, prec(*n.lhs) < p);
        out += n.op;
        child(*n.rhs, prec(*n.rhs) <= p);
      }
      return;
    }
    case Node::Kind::Call:
      out += kFuncNames[static_cast<std::size_t>(n.func)];
      out += '(';
      print_node(*n.lhs, out);
      out += ')';
      return;
  }
}

bool nodes_identical(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::Number:
      return a.number == b.number;
    case Node::Kind::Variable:
      return true;
    case Node::Kind::Parameter:
      return a.name == b.name;
    case Node::Kind::Negate:
      return nodes_identical(*a.lhs, *b.lhs);
    case Node::Kind::Binary:
      return a.op == b.op && nodes_identical(*a.lhs, *b.lhs) &&
             nodes_identical(*a.rhs, *b.rhs);
    case Node::Kind::Call:
      return a.func == b.func && nodes_identical(*a.lhs, *b.lhs);
  }
  return false;
}

}  // namespace

Expr Expr::parse(std::string_view source) {
  std::set<std::string> params;
  Parser parser(source, params);
  NodePtr root = parser.run();
  return Expr(std::move(root),
              std::vector<std::string>(params.begin(), params.end()),
              std::string(source));
}

double Expr::evaluate(double x, const Bindings& bindings) const {
  return eval_node(*root_, x, bindings);
}

std::string Expr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool Expr::identical_to(const Expr& other) const noexcept {
  return nodes_identical(*root_, *other.root_);
}

}  // namespace measurefit::expr
