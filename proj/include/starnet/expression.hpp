#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace starnet {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compiled arithmetic expression in the variables t, x, l.
///
/// Grammar: + - * / ^ (right-associative, binds tighter than unary minus),
/// parentheses, decimal literals, constants pi and e, and the functions
/// sin cos tan sinh cosh tanh exp log sqrt abs. Evaluation is in binary64
/// over a postfix program, so a compiled expression is cheap to copy and
/// safe to evaluate concurrently.
class Expression {
 public:
  Expression() = default;
  explicit Expression(const std::string& source);

  double operator()(double t, double x, double l) const;
  const std::string& source() const { return source_; }
  /// True when the expression does not mention the given variable.
  bool independent_of(char variable) const;

  enum class Op : unsigned char {
    Constant, VarT, VarX, VarL, Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs
  };
  struct Instr {
    Op op;
    double value = 0.0;
  };

 private:
  std::string source_;
  std::vector<Instr> program_;
  int max_stack_ = 0;
};

}  // namespace starnet
