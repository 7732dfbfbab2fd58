#include "starnet/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string_view>
#include <utility>

namespace starnet {
namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::vector<Instr> parse() {
    parse_sum();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError("expression \"" + std::string(src_) + "\": " + what + " at offset " +
                          std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void parse_sum() {
    parse_product();
    for (;;) {
      if (accept('+')) {
        parse_product();
        out_.push_back({Op::Add});
      } else if (accept('-')) {
        parse_product();
        out_.push_back({Op::Sub});
      } else {
        return;
      }
    }
  }

  void parse_product() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        out_.push_back({Op::Mul});
      } else if (accept('/')) {
        parse_unary();
        out_.push_back({Op::Div});
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      out_.push_back({Op::Neg});
      return;
    }
    if (accept('+')) {
      parse_unary();
      return;
    }
    parse_power();
  }

  void parse_power() {
    parse_primary();
    if (accept('^')) {
      parse_unary();
      out_.push_back({Op::Pow});
    }
  }

  void parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      parse_sum();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      parse_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      parse_identifier();
      return;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  void parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) fail("malformed number");
    out_.push_back({Op::Constant, value});
  }

  void parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    static constexpr std::array<std::pair<std::string_view, Op>, 10> functions{{
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"tan", Op::Tan}, {"sinh", Op::Sinh}, {"cosh", Op::Cosh},
        {"tanh", Op::Tanh}, {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs},
    }};
    for (const auto& [fname, op] : functions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        parse_sum();
        if (!accept(')')) fail("expected ')'");
        out_.push_back({op});
        return;
      }
    }
    if (name == "t") out_.push_back({Op::VarT});
    else if (name == "x") out_.push_back({Op::VarX});
    else if (name == "l") out_.push_back({Op::VarL});
    else if (name == "pi") out_.push_back({Op::Constant, std::numbers::pi});
    else if (name == "e") out_.push_back({Op::Constant, std::numbers::e});
    else fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Instr> out_;
};

int stack_effect(Op op) {
  switch (op) {
    case Op::Constant:
    case Op::VarT:
    case Op::VarX:
    case Op::VarL:
      return 1;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow:
      return -1;
    default:
      return 0;
  }
}

}  // namespace

Expression::Expression(const std::string& source) : source_(source) {
  program_ = Parser(source_).parse();
  int depth = 0;
  for (const auto& ins : program_) {
    depth += stack_effect(ins.op);
    max_stack_ = std::max(max_stack_, depth);
  }
}

bool Expression::independent_of(char variable) const {
  const Op wanted = variable == 't' ? Op::VarT : variable == 'x' ? Op::VarX : Op::VarL;
  for (const auto& ins : program_)
    if (ins.op == wanted) return false;
  return true;
}

double Expression::operator()(double t, double x, double l) const {
  if (program_.empty()) throw ExpressionError("evaluating an empty expression");
  constexpr int kInline = 32;
  std::array<double, kInline> inline_stack;
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (max_stack_ > kInline) {
    heap_stack.resize(max_stack_);
    stack = heap_stack.data();
  }
  int top = -1;
  for (const auto& ins : program_) {
    switch (ins.op) {
      case Op::Constant: stack[++top] = ins.value; break;
      case Op::VarT: stack[++top] = t; break;
      case Op::VarX: stack[++top] = x; break;
      case Op::VarL: stack[++top] = l; break;
      case Op::Add: --top; stack[top] += stack[top + 1]; break;
      case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
      case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
      case Op::Div: --top; stack[top] /= stack[top + 1]; break;
      case Op::Pow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
      case Op::Neg: stack[top] = -stack[top]; break;
      case Op::Sin: stack[top] = std::sin(stack[top]); break;
      case Op::Cos: stack[top] = std::cos(stack[top]); break;
      case Op::Tan: stack[top] = std::tan(stack[top]); break;
      case Op::Sinh: stack[top] = std::sinh(stack[top]); break;
      case Op::Cosh: stack[top] = std::cosh(stack[top]); break;
      case Op::Tanh: stack[top] = std::tanh(stack[top]); break;
      case Op::Exp: stack[top] = std::exp(stack[top]); break;
      case Op::Log: stack[top] = std::log(stack[top]); break;
      case Op::Sqrt: stack[top] = std::sqrt(stack[top]); break;
      case Op::Abs: stack[top] = std::abs(stack[top]); break;
    }
  }
  return stack[0];
}

}  // namespace starnet
