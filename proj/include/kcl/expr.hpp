#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "kcl/errors.hpp"

namespace kcl::expr {

enum class NodeKind { number, variable, parameter, constant, unary_neg, binary, call };
enum class BinaryOp { add, sub, mul, div, pow };
enum class ConstKind { pi, e };
enum class Func { sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, abs };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double number = 0.0;         // kind == number
  std::string name;            // kind == parameter
  ConstKind constant{};        // kind == constant
  BinaryOp op{};               // kind == binary
  Func fn{};                   // kind == call
  NodePtr lhs, rhs;            // binary: both; unary_neg/call: lhs only
};

class SyntaxError : public ConfigError {
public:
  SyntaxError(std::size_t offset, const std::string& expected, const std::string& found);
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

// Domain failure during evaluation (log/sqrt of a negative argument,
// division by zero, fractional power of a negative base, overflow to
// non-finite).  Carries the offending subexpression in printed form.
class EvalError : public NumericError {
public:
  EvalError(const std::string& message, std::string subexpression);
  const std::string& subexpression() const { return subexpr_; }

private:
  std::string subexpr_;
};

// Immutable expression tree over the radial variable `r`, named parameters
// and the usual scalar functions.  Reentrant; safe to share across threads.
class ExprAst {
public:
  // Grammar: ^ (right assoc) > unary minus > * / > + -, parentheses group,
  // whitespace ignored.  When `allowed_params` is given, any identifier
  // outside {r, pi, e, functions} and that set is rejected.
  static ExprAst parse(std::string_view source);
  static ExprAst parse(std::string_view source, const std::set<std::string>& allowed_params);

  double eval(double r) const;
  double eval(double r, const std::map<std::string, double>& params) const;

  // Canonical printed form; parse(str()) is structurally identical to *this.
  std::string str() const;
  // Every subexpression wrapped in parentheses; used by cross-checking tools.
  std::string str_full_parens() const;

  const std::set<std::string>& parameters() const { return params_; }
  bool structurally_equal(const ExprAst& other) const;
  const NodePtr& root() const { return root_; }

private:
  ExprAst(NodePtr root, std::set<std::string> params);
  NodePtr root_;
  std::set<std::string> params_;
};

// Max over the sample of
//   |central_difference(f, h = 1e-5 * max(1,|r|)) - fprime(r)| / max(1, |fprime(r)|).
double derivative_consistency(const ExprAst& f, const ExprAst& fprime,
                              std::span<const double> sample,
                              const std::map<std::string, double>& params = {});

}  // namespace kcl::expr
