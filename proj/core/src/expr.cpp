#include "sdllb/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace sdllb {

ExprParseError::ExprParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
      offset_(offset) {}

namespace {

ExprAst make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprAst binary(BinaryOp op, ExprAst l, ExprAst r) {
  ExprNode n;
  n.kind = ExprNode::Kind::Binary;
  n.binary_op = op;
  n.lhs = std::move(l);
  n.rhs = std::move(r);
  return make_node(std::move(n));
}

ExprAst negate(ExprAst e) {
  ExprNode n;
  n.kind = ExprNode::Kind::Unary;
  n.unary_op = UnaryOp::Neg;
  n.lhs = std::move(e);
  return make_node(std::move(n));
}

ExprAst constant(double v) {
  ExprNode n;
  n.kind = ExprNode::Kind::Constant;
  n.value = v;
  return make_node(std::move(n));
}

ExprAst variable(int idx) {
  ExprNode n;
  n.kind = ExprNode::Kind::Variable;
  n.variable = idx;
  return make_node(std::move(n));
}

ExprAst call(FuncId f, ExprAst arg) {
  ExprNode n;
  n.kind = ExprNode::Kind::Call;
  n.func = f;
  n.lhs = std::move(arg);
  return make_node(std::move(n));
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprAst run() {
    ExprAst e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ExprParseError(what, pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  ExprAst expr() {
    ExprAst lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(BinaryOp::Add, lhs, term());
      } else if (accept('-')) {
        lhs = binary(BinaryOp::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  ExprAst term() {
    ExprAst lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(BinaryOp::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = binary(BinaryOp::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  ExprAst unary() {
    if (accept('-')) {
      return negate(unary());
    }
    return power();
  }

  ExprAst power() {
    ExprAst base = atom();
    if (accept('^')) {
      return binary(BinaryOp::Pow, base, exponent());
    }
    return base;
  }

  // Exponents are numeric literals (optionally negated), right-associative.
  ExprAst exponent() {
    bool neg = accept('-');
    skip_ws();
    if (pos_ >= src_.size() || !(std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      fail("exponent must be a numeric literal");
    ExprAst e = number();
    if (neg) e = negate(e);
    if (accept('^')) {
      e = binary(BinaryOp::Pow, e, exponent());
    }
    return e;
  }

  ExprAst number() {
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos_ += static_cast<std::size_t>(end - begin);
    return constant(v);
  }

  ExprAst atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      ExprAst e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprAst identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (name == "x") return variable(0);
    if (name == "y") return variable(1);
    if (name == "t") return variable(2);
    if (name == "pi")
      return constant(std::numbers::pi);

    FuncId f;
    if (name == "sin") f = FuncId::Sin;
    else if (name == "cos") f = FuncId::Cos;
    else if (name == "exp") f = FuncId::Exp;
    else if (name == "sqrt") f = FuncId::Sqrt;
    else if (name == "abs") f = FuncId::Abs;
    else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!accept('(')) fail("expected '(' after function name");
    ExprAst arg = expr();
    if (accept(',')) fail("functions take exactly one argument");
    if (!accept(')')) fail("expected ')'");
    return call(f, arg);
  }
};

double eval_pow(double base, double e) {
  double rounded = std::nearbyint(e);
  if (rounded == e && std::fabs(e) <= 64.0) {
    // integer exponent: repeated multiplication for exactness
    long n = static_cast<long>(rounded);
    bool invert = n < 0;
    if (invert) n = -n;
    double acc = 1.0;
    double b = base;
    while (n > 0) {
      if (n & 1) acc *= b;
      b *= b;
      n >>= 1;
    }
    return invert ? 1.0 / acc : acc;
  }
  return std::pow(base, e);
}

}  // namespace

ExprAst parse(std::string_view source) { return Parser(source).run(); }

double eval(const ExprAst& ast, double x, double y, double t) {
  const ExprNode& n = *ast;
  switch (n.kind) {
    case ExprNode::Kind::Constant:
      return n.value;
    case ExprNode::Kind::Variable:
      return n.variable == 0 ? x : (n.variable == 1 ? y : t);
    case ExprNode::Kind::Unary:
      return -eval(n.lhs, x, y, t);
    case ExprNode::Kind::Binary: {
      double a = eval(n.lhs, x, y, t);
      double b = eval(n.rhs, x, y, t);
      switch (n.binary_op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        case BinaryOp::Pow: return eval_pow(a, b);
      }
      break;
    }
    case ExprNode::Kind::Call: {
      double a = eval(n.lhs, x, y, t);
      switch (n.func) {
        case FuncId::Sin: return std::sin(a);
        case FuncId::Cos: return std::cos(a);
        case FuncId::Exp: return std::exp(a);
        case FuncId::Sqrt: return std::sqrt(a);
        case FuncId::Abs: return std::fabs(a);
      }
      break;
    }
  }
  return 0.0;  // unreachable
}

std::string to_string(const ExprAst& ast) {
  const ExprNode& n = *ast;
  switch (n.kind) {
    case ExprNode::Kind::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return buf;
    }
    case ExprNode::Kind::Variable:
      return n.variable == 0 ? "x" : (n.variable == 1 ? "y" : "t");
    case ExprNode::Kind::Unary:
      return "(-" + to_string(n.lhs) + ")";
    case ExprNode::Kind::Binary: {
      const char* op = nullptr;
      switch (n.binary_op) {
        case BinaryOp::Add: op = "+"; break;
        case BinaryOp::Sub: op = "-"; break;
        case BinaryOp::Mul: op = "*"; break;
        case BinaryOp::Div: op = "/"; break;
        case BinaryOp::Pow: op = "^"; break;
      }
      return "(" + to_string(n.lhs) + op + to_string(n.rhs) + ")";
    }
    case ExprNode::Kind::Call: {
      const char* f = nullptr;
      switch (n.func) {
        case FuncId::Sin: f = "sin"; break;
        case FuncId::Cos: f = "cos"; break;
        case FuncId::Exp: f = "exp"; break;
        case FuncId::Sqrt: f = "sqrt"; break;
        case FuncId::Abs: f = "abs"; break;
      }
      return std::string(f) + "(" + to_string(n.lhs) + ")";
    }
  }
  return "";
}

bool structurally_equal(const ExprAst& a, const ExprAst& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprNode::Kind::Constant:
      return a->value == b->value;
    case ExprNode::Kind::Variable:
      return a->variable == b->variable;
    case ExprNode::Kind::Unary:
      return a->unary_op == b->unary_op && structurally_equal(a->lhs, b->lhs);
    case ExprNode::Kind::Binary:
      return a->binary_op == b->binary_op && structurally_equal(a->lhs, b->lhs) &&
             structurally_equal(a->rhs, b->rhs);
    case ExprNode::Kind::Call:
      return a->func == b->func && structurally_equal(a->lhs, b->lhs);
  }
  return false;
}

ExprAst make_constant(double v) {
  ExprNode n;
  n.kind = ExprNode::Kind::Constant;
  n.value = v;
  return std::make_shared<const ExprNode>(std::move(n));
}

VectorExpr parse_vector(const std::array<std::string, 3>& sources) {
  return VectorExpr{{parse(sources[0]), parse(sources[1]), parse(sources[2])}};
}

VectorExpr zero_vector_expr() {
  ExprAst z = make_constant(0.0);
  return VectorExpr{{z, z, z}};
}

}  // namespace sdllb
