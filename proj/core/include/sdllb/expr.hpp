#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdllb {

// Scalar field expressions over the variables x, y, t.
//
// Grammar (whitespace-insensitive):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' exponent)?        exponent is a numeric literal,
//   exponent:= '-'? number ('^' exponent)? right-associative
//   atom    := number | 'pi' | 'x' | 'y' | 't' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt | abs
// Integer exponents are evaluated by repeated multiplication.

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class UnaryOp { Neg };
enum class FuncId { Sin, Cos, Exp, Sqrt, Abs };

struct ExprNode;
using ExprAst = std::shared_ptr<const ExprNode>;

/// Immutable after parse; shareable across threads.
struct ExprNode {
  enum class Kind { Constant, Variable, Unary, Binary, Call };
  Kind kind = Kind::Constant;
  double value = 0.0;  // Constant
  int variable = 0;    // Variable: 0 = x, 1 = y, 2 = t
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  FuncId func = FuncId::Sin;
  ExprAst lhs, rhs;  // Unary and Call use lhs only
};

class ExprParseError : public std::runtime_error {
 public:
  ExprParseError(const std::string& what, std::size_t offset);
  /// Byte offset into the source string where the error was detected.
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

ExprAst parse(std::string_view source);
double eval(const ExprAst& ast, double x, double y, double t);
std::string to_string(const ExprAst& ast);
bool structurally_equal(const ExprAst& a, const ExprAst& b);
ExprAst make_constant(double v);

/// Exactly three component expressions; planar data keeps the third zero.
struct VectorExpr {
  std::array<ExprAst, 3> components;

  std::array<double, 3> eval_at(double x, double y, double t) const {
    return {eval(components[0], x, y, t), eval(components[1], x, y, t),
            eval(components[2], x, y, t)};
  }
};

VectorExpr parse_vector(const std::array<std::string, 3>& sources);
VectorExpr zero_vector_expr();

}  // namespace sdllb
