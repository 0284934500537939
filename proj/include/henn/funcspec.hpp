// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Target functions and dataset sampling. A target is either a builtin
// (sigmoid, tanh, relu, abs, sign, sin, gauss) or a parsed arithmetic
// expression in x; sampling produces the arithmetic grid -R, -R+step, ..., R.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "henn/detail/numio.hpp"
#include "henn/errors.hpp"

namespace henn {

// ---------------------------------------------------------------------------
// Expression AST

enum class ExprFunc { exp, sin, cos, tanh, abs, sign };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { number, var, neg, add, sub, mul, div, pow, call };

  Kind kind;
  double number = 0.0;   // Kind::number
  long exponent = 0;     // Kind::pow
  ExprFunc func = ExprFunc::exp;  // Kind::call
  ExprPtr lhs;
  ExprPtr rhs;
};

inline double eval_sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline double eval_expr(const Expr& e, double x) {
  switch (e.kind) {
    case Expr::Kind::number: return e.number;
    case Expr::Kind::var: return x;
    case Expr::Kind::neg: return -eval_expr(*e.lhs, x);
    case Expr::Kind::add: return eval_expr(*e.lhs, x) + eval_expr(*e.rhs, x);
    case Expr::Kind::sub: return eval_expr(*e.lhs, x) - eval_expr(*e.rhs, x);
    case Expr::Kind::mul: return eval_expr(*e.lhs, x) * eval_expr(*e.rhs, x);
    case Expr::Kind::div: return eval_expr(*e.lhs, x) / eval_expr(*e.rhs, x);
    case Expr::Kind::pow: {
      // Integer exponent by repeated squaring; negative exponents invert.
      double base = eval_expr(*e.lhs, x);
      long n = e.exponent;
      const bool invert = n < 0;
      if (invert) n = -n;
      double acc = 1.0;
      double sq = base;
      while (n > 0) {
        if (n & 1) acc *= sq;
        sq *= sq;
        n >>= 1;
      }
      return invert ? 1.0 / acc : acc;
    }
    case Expr::Kind::call: {
      double v = eval_expr(*e.lhs, x);
      switch (e.func) {
        case ExprFunc::exp: return std::exp(v);
        case ExprFunc::sin: return std::sin(v);
        case ExprFunc::cos: return std::cos(v);
        case ExprFunc::tanh: return std::tanh(v);
        case ExprFunc::abs: return std::fabs(v);
        case ExprFunc::sign: return eval_sign(v);
      }
      return 0.0;
    }
  }
  return 0.0;
}

inline std::string func_name(ExprFunc f) {
  switch (f) {
    case ExprFunc::exp: return "exp";
    case ExprFunc::sin: return "sin";
    case ExprFunc::cos: return "cos";
    case ExprFunc::tanh: return "tanh";
    case ExprFunc::abs: return "abs";
    case ExprFunc::sign: return "sign";
  }
  return "?";
}

// Fully parenthesized form; reparses to an equivalent expression.
inline std::string pretty_print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number: return detail::format_double(e.number);
    case Expr::Kind::var: return "x";
    case Expr::Kind::neg: return "(-" + pretty_print(*e.lhs) + ")";
    case Expr::Kind::add: return "(" + pretty_print(*e.lhs) + "+" + pretty_print(*e.rhs) + ")";
    case Expr::Kind::sub: return "(" + pretty_print(*e.lhs) + "-" + pretty_print(*e.rhs) + ")";
    case Expr::Kind::mul: return "(" + pretty_print(*e.lhs) + "*" + pretty_print(*e.rhs) + ")";
    case Expr::Kind::div: return "(" + pretty_print(*e.lhs) + "/" + pretty_print(*e.rhs) + ")";
    case Expr::Kind::pow:
      return "(" + pretty_print(*e.lhs) + "^" + std::to_string(e.exponent) + ")";
    case Expr::Kind::call: return func_name(e.func) + "(" + pretty_print(*e.lhs) + ")";
  }
  return "?";
}

namespace detail {

// Recursive-descent parser. Precedence: ^ binds tighter than unary minus,
// which binds tighter than * /, which bind tighter than + -. Binary
// operators associate left.
class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) {
      throw SyntaxError("unexpected trailing input", pos_);
    }
    return e;
  }

 private:
  static ExprPtr make(Expr node) { return std::make_shared<Expr>(std::move(node)); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
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

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_term();
    while (true) {
      if (consume('+')) {
        lhs = make({Expr::Kind::add, 0, 0, ExprFunc::exp, lhs, parse_term()});
      } else if (consume('-')) {
        lhs = make({Expr::Kind::sub, 0, 0, ExprFunc::exp, lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (true) {
      if (consume('*')) {
        lhs = make({Expr::Kind::mul, 0, 0, ExprFunc::exp, lhs, parse_factor()});
      } else if (consume('/')) {
        lhs = make({Expr::Kind::div, 0, 0, ExprFunc::exp, lhs, parse_factor()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_factor() {
    if (consume('-')) {
      return make({Expr::Kind::neg, 0, 0, ExprFunc::exp, parse_factor(), nullptr});
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    while (consume('^')) {
      base = make({Expr::Kind::pow, 0, parse_int_exponent(), ExprFunc::exp, base, nullptr});
    }
    return base;
  }

  long parse_int_exponent() {
    skip_space();
    std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    std::size_t digits = 0;
    long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw SyntaxError("expected integer exponent after '^'", start);
    if (pos_ < text_.size() && text_[pos_] == '.') {
      throw SyntaxError("exponent must be an integer", start);
    }
    return negative ? -value : value;
  }

  ExprPtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return parse_identifier();
    }
    if (consume('(')) {
      ExprPtr inner = parse_sum();
      if (!consume(')')) throw SyntaxError("expected ')'", pos_);
      return inner;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
  }

  ExprPtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to something else; not part of this number
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      throw SyntaxError("malformed number '" + token + "'", start);
    }
    return make({Expr::Kind::number, v, 0, ExprFunc::exp, nullptr, nullptr});
  }

  ExprPtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "x") {
      return make({Expr::Kind::var, 0, 0, ExprFunc::exp, nullptr, nullptr});
    }
    ExprFunc func;
    if (name == "exp") func = ExprFunc::exp;
    else if (name == "sin") func = ExprFunc::sin;
    else if (name == "cos") func = ExprFunc::cos;
    else if (name == "tanh") func = ExprFunc::tanh;
    else if (name == "abs") func = ExprFunc::abs;
    else if (name == "sign") func = ExprFunc::sign;
    else throw UnknownIdentifier("unknown identifier '" + name + "'", start);
    if (!consume('(')) throw SyntaxError("expected '(' after '" + name + "'", pos_);
    ExprPtr arg = parse_sum();
    if (!consume(')')) throw SyntaxError("expected ')'", pos_);
    return make({Expr::Kind::call, 0, 0, func, arg, nullptr});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse_expression_text(std::string_view text) {
  return detail::ExprParser(text).parse();
}

// ---------------------------------------------------------------------------
// Target functions

enum class Builtin { sigmoid, tanh, relu, abs, sign, sin, gauss };

inline double eval_builtin(Builtin b, double x) {
  switch (b) {
    case Builtin::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Builtin::tanh: return std::tanh(x);
    case Builtin::relu: return x > 0.0 ? x : 0.0;
    case Builtin::abs: return std::fabs(x);
    case Builtin::sign: return eval_sign(x);
    case Builtin::sin: return std::sin(x);
    case Builtin::gauss: return std::exp(-x * x);
  }
  return 0.0;
}

inline bool lookup_builtin(std::string_view name, Builtin& out) {
  if (name == "sigmoid") out = Builtin::sigmoid;
  else if (name == "tanh") out = Builtin::tanh;
  else if (name == "relu") out = Builtin::relu;
  else if (name == "abs") out = Builtin::abs;
  else if (name == "sign") out = Builtin::sign;
  else if (name == "sin") out = Builtin::sin;
  else if (name == "gauss") out = Builtin::gauss;
  else return false;
  return true;
}

// A target to approximate: builtin or expression, the interval radius R and
// the grid step (the precision 1/P).
class TargetFunction {
 public:
  static TargetFunction from_source(std::string_view source, double radius = 1.0,
                                    double sample_step = 0.01) {
    TargetFunction f;
    f.source_ = std::string(source);
    f.radius_ = radius;
    f.step_ = sample_step;
    if (radius <= 0.0) throw DomainError("interval radius must be positive");
    if (sample_step <= 0.0 || sample_step > 2.0 * radius) {
      throw DomainError("sample step must lie in (0, 2R]");
    }
    Builtin b;
    if (lookup_builtin(f.source_, b)) {
      f.fn_ = b;
    } else {
      f.fn_ = parse_expression_text(f.source_);
    }
    return f;
  }

  double operator()(double x) const {
    if (std::holds_alternative<Builtin>(fn_)) return eval_builtin(std::get<Builtin>(fn_), x);
    return eval_expr(*std::get<ExprPtr>(fn_), x);
  }

  const std::string& source() const { return source_; }
  double radius() const { return radius_; }
  double sample_step() const { return step_; }
  bool is_builtin() const { return std::holds_alternative<Builtin>(fn_); }

  TargetFunction with_grid(double radius, double sample_step) const {
    return from_source(source_, radius, sample_step);
  }

 private:
  TargetFunction() = default;

  std::string source_;
  std::variant<Builtin, ExprPtr> fn_;
  double radius_ = 1.0;
  double step_ = 0.01;
};

// Parses `text` as a target with default grid settings. A bare builtin name
// is accepted as well.
inline TargetFunction parse_expression(std::string_view text) {
  return TargetFunction::from_source(text);
}

// ---------------------------------------------------------------------------
// Sampling

// Ordered samples on the arithmetic grid -R, -R+step, ..., R.
struct SampleSet {
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t size() const { return xs.size(); }
};

inline std::size_t grid_point_count(double radius, double step) {
  const double q = 2.0 * radius / step;
  // Nudge before flooring so that steps dividing 2R exactly in the reals are
  // not lost to the binary representation (60/0.01 < 6000 in doubles).
  return static_cast<std::size_t>(std::floor(q * (1.0 + 1e-12) + 1e-12)) + 1;
}

inline SampleSet sample(const TargetFunction& f) {
  const double radius = f.radius();
  const double step = f.sample_step();
  const std::size_t n = grid_point_count(radius, step);
  SampleSet s;
  s.xs.reserve(n);
  s.ys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -radius + static_cast<double>(i) * step;
    const double y = f(x);
    if (!std::isfinite(y)) {
      throw NonFinite("target is not finite at x=" + detail::format_double(x));
    }
    s.xs.push_back(x);
    s.ys.push_back(y);
  }
  return s;
}

// Training set keeps every keep_every-th point starting at index 0; the
// leftover points become the validation set.
inline std::pair<SampleSet, SampleSet> split_train_validation(const SampleSet& s,
                                                              long keep_every) {
  if (keep_every < 1) throw DomainError("keep_every must be >= 1");
  SampleSet train;
  SampleSet validation;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i % static_cast<std::size_t>(keep_every) == 0) {
      train.xs.push_back(s.xs[i]);
      train.ys.push_back(s.ys[i]);
    } else {
      validation.xs.push_back(s.xs[i]);
      validation.ys.push_back(s.ys[i]);
    }
  }
  return {train, validation};
}

inline void write_samples_csv(const SampleSet& s, std::ostream& out) {
  out << "x,y\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << detail::format_double(s.xs[i]) << ',' << detail::format_double(s.ys[i]) << '\n';
  }
}

inline void write_samples_csv(const SampleSet& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_samples_csv(s, out);
}

inline SampleSet read_samples_csv(std::istream& in) {
  SampleSet s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != "x,y") throw MalformedRow("expected header 'x,y'", lineno);
      continue;
    }
    if (line.empty()) continue;
    auto fields = detail::split_csv_row(line);
    if (fields.size() != 2) throw MalformedRow("expected two fields", lineno);
    s.xs.push_back(detail::parse_double(fields[0], lineno));
    s.ys.push_back(detail::parse_double(fields[1], lineno));
  }
  return s;
}

inline SampleSet read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_samples_csv(in);
}

}  // namespace henn
