#include "kcl/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace kcl::expr {
namespace {

const std::map<std::string, Func, std::less<>>& function_table() {
  static const std::map<std::string, Func, std::less<>> table = {
      {"sin", Func::sin},   {"cos", Func::cos},   {"tan", Func::tan},
      {"sinh", Func::sinh}, {"cosh", Func::cosh}, {"tanh", Func::tanh},
      {"exp", Func::exp},   {"log", Func::log},   {"sqrt", Func::sqrt},
      {"abs", Func::abs}};
  return table;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::tan: return "tan";
    case Func::sinh: return "sinh";
    case Func::cosh: return "cosh";
    case Func::tanh: return "tanh";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
  }
  return "?";
}

struct Token {
  enum Type { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
  Type type;
  std::size_t offset;
  double value = 0.0;
  std::string text;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    current_.offset = pos_;
    current_.text.clear();
    if (pos_ >= src_.size()) {
      current_.type = Token::end;
      return;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': current_.type = Token::plus; ++pos_; return;
      case '-': current_.type = Token::minus; ++pos_; return;
      case '*': current_.type = Token::star; ++pos_; return;
      case '/': current_.type = Token::slash; ++pos_; return;
      case '^': current_.type = Token::caret; ++pos_; return;
      case '(': current_.type = Token::lparen; ++pos_; return;
      case ')': current_.type = Token::rparen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.data() + pos_;
      char* parse_end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &parse_end);
      if (parse_end == begin)
        throw SyntaxError(pos_, "number", std::string(1, c));
      current_.type = Token::number;
      current_.value = v;
      pos_ += static_cast<std::size_t>(parse_end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      current_.type = Token::ident;
      current_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    throw SyntaxError(pos_, "number, identifier, operator or parenthesis", std::string(1, c));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_;
};

std::string token_text(const Token& t) {
  switch (t.type) {
    case Token::number: return "number";
    case Token::ident: return "'" + t.text + "'";
    case Token::plus: return "'+'";
    case Token::minus: return "'-'";
    case Token::star: return "'*'";
    case Token::slash: return "'/'";
    case Token::caret: return "'^'";
    case Token::lparen: return "'('";
    case Token::rparen: return "')'";
    case Token::end: return "end of input";
  }
  return "?";
}

class Parser {
public:
  Parser(std::string_view src, const std::set<std::string>* allowed)
      : lexer_(src), allowed_(allowed) {}

  NodePtr run(std::set<std::string>& params) {
    NodePtr root = additive();
    const Token& t = lexer_.peek();
    if (t.type != Token::end)
      throw SyntaxError(t.offset, "operator or end of input", token_text(t));
    params = params_;
    return root;
  }

private:
  NodePtr additive() {
    NodePtr node = multiplicative();
    while (true) {
      const Token& t = lexer_.peek();
      if (t.type == Token::plus || t.type == Token::minus) {
        BinaryOp op = (t.type == Token::plus) ? BinaryOp::add : BinaryOp::sub;
        lexer_.take();
        node = make_binary(op, node, multiplicative());
      } else {
        return node;
      }
    }
  }

  NodePtr multiplicative() {
    NodePtr node = unary();
    while (true) {
      const Token& t = lexer_.peek();
      if (t.type == Token::star || t.type == Token::slash) {
        BinaryOp op = (t.type == Token::star) ? BinaryOp::mul : BinaryOp::div;
        lexer_.take();
        node = make_binary(op, node, unary());
      } else {
        return node;
      }
    }
  }

  NodePtr unary() {
    const Token& t = lexer_.peek();
    if (t.type == Token::minus) {
      lexer_.take();
      auto node = std::make_shared<Node>();
      node->kind = NodeKind::unary_neg;
      node->lhs = unary();
      return node;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    const Token& t = lexer_.peek();
    if (t.type == Token::caret) {
      lexer_.take();
      return make_binary(BinaryOp::pow, base, unary());  // right-assoc, unary exponents ok
    }
    return base;
  }

  NodePtr primary() {
    Token t = lexer_.take();
    switch (t.type) {
      case Token::number: {
        auto node = std::make_shared<Node>();
        node->kind = NodeKind::number;
        node->number = t.value;
        return node;
      }
      case Token::lparen: {
        NodePtr inner = additive();
        Token close = lexer_.take();
        if (close.type != Token::rparen)
          throw SyntaxError(close.offset, "')'", token_text(close));
        return inner;
      }
      case Token::ident:
        return identifier(t);
      default:
        throw SyntaxError(t.offset, "number, identifier, '-' or '('", token_text(t));
    }
  }

  NodePtr identifier(const Token& t) {
    if (lexer_.peek().type == Token::lparen) {
      auto it = function_table().find(t.text);
      if (it == function_table().end())
        throw ConfigError("unknown function name '" + t.text + "' at byte " +
                          std::to_string(t.offset));
      lexer_.take();
      NodePtr arg = additive();
      Token close = lexer_.take();
      if (close.type != Token::rparen)
        throw SyntaxError(close.offset, "')'", token_text(close));
      auto node = std::make_shared<Node>();
      node->kind = NodeKind::call;
      node->fn = it->second;
      node->lhs = arg;
      return node;
    }
    auto node = std::make_shared<Node>();
    if (t.text == "r") {
      node->kind = NodeKind::variable;
      return node;
    }
    if (t.text == "pi") {
      node->kind = NodeKind::constant;
      node->constant = ConstKind::pi;
      return node;
    }
    if (t.text == "e") {
      node->kind = NodeKind::constant;
      node->constant = ConstKind::e;
      return node;
    }
    if (allowed_ && !allowed_->count(t.text))
      throw ConfigError("unknown identifier '" + t.text + "' at byte " +
                        std::to_string(t.offset));
    node->kind = NodeKind::parameter;
    node->name = t.text;
    params_.insert(t.text);
    return node;
  }

  static NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::binary;
    node->op = op;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  Lexer lexer_;
  const std::set<std::string>* allowed_;
  std::set<std::string> params_;
};

std::string print_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::binary:
      switch (n.op) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
      }
      return 0;
    case NodeKind::unary_neg: return 3;
    default: return 5;  // atoms and calls never need wrapping
  }
}

void print_node(const Node& n, std::ostream& os, bool full_parens);

void print_child(const NodePtr& child, int parent_prec, bool tight, std::ostream& os,
                 bool full_parens) {
  // `tight` wraps on equal precedence: the right side of - and /, the left
  // side of the right-associative ^, and the operand of unary minus when it
  // is an additive/multiplicative node.
  const int child_prec = precedence(*child);
  const bool wrap =
      full_parens ? child_prec < 5 : (child_prec < parent_prec || (tight && child_prec == parent_prec));
  if (wrap) os << '(';
  print_node(*child, os, full_parens);
  if (wrap) os << ')';
}

void print_node(const Node& n, std::ostream& os, bool full_parens) {
  switch (n.kind) {
    case NodeKind::number: os << print_number(n.number); return;
    case NodeKind::variable: os << 'r'; return;
    case NodeKind::parameter: os << n.name; return;
    case NodeKind::constant: os << (n.constant == ConstKind::pi ? "pi" : "e"); return;
    case NodeKind::unary_neg:
      os << '-';
      print_child(n.lhs, precedence(n), true, os, full_parens);
      return;
    case NodeKind::call:
      os << func_name(n.fn) << '(';
      print_node(*n.lhs, os, full_parens);
      os << ')';
      return;
    case NodeKind::binary: {
      const int prec = precedence(n);
      const char* sym = "?";
      bool right_tight = false, left_tight = false;
      switch (n.op) {
        case BinaryOp::add: sym = "+"; break;
        case BinaryOp::sub: sym = "-"; right_tight = true; break;
        case BinaryOp::mul: sym = "*"; break;
        case BinaryOp::div: sym = "/"; right_tight = true; break;
        case BinaryOp::pow: sym = "^"; left_tight = true; break;
      }
      print_child(n.lhs, prec, left_tight, os, full_parens);
      os << sym;
      print_child(n.rhs, prec, right_tight, os, full_parens);
      return;
    }
  }
}

class Evaluator {
public:
  Evaluator(double r, const std::map<std::string, double>* params) : r_(r), params_(params) {}

  double visit(const Node& n) const {
    switch (n.kind) {
      case NodeKind::number: return n.number;
      case NodeKind::variable: return r_;
      case NodeKind::constant:
        return n.constant == ConstKind::pi ? 3.14159265358979323846 : 2.71828182845904523536;
      case NodeKind::parameter: {
        if (params_) {
          auto it = params_->find(n.name);
          if (it != params_->end()) return it->second;
        }
        throw EvalError("unbound parameter '" + n.name + "'", print(n));
      }
      case NodeKind::unary_neg: return -visit(*n.lhs);
      case NodeKind::call: return call(n);
      case NodeKind::binary: return binary(n);
    }
    throw EvalError("corrupt expression node", "?");
  }

private:
  static std::string print(const Node& n) {
    std::ostringstream os;
    print_node(n, os, false);
    return os.str();
  }

  double finite(double v, const Node& n, const char* what) const {
    if (!std::isfinite(v)) throw EvalError(std::string(what), print(n));
    return v;
  }

  double call(const Node& n) const {
    const double a = visit(*n.lhs);
    switch (n.fn) {
      case Func::sin: return std::sin(a);
      case Func::cos: return std::cos(a);
      case Func::tan: return finite(std::tan(a), n, "tan overflow");
      case Func::sinh: return finite(std::sinh(a), n, "sinh overflow");
      case Func::cosh: return finite(std::cosh(a), n, "cosh overflow");
      case Func::tanh: return std::tanh(a);
      case Func::exp: return finite(std::exp(a), n, "exp overflow");
      case Func::log:
        if (!(a > 0.0)) throw EvalError("log of non-positive argument", print(n));
        return std::log(a);
      case Func::sqrt:
        if (a < 0.0) throw EvalError("sqrt of negative argument", print(n));
        return std::sqrt(a);
      case Func::abs: return std::fabs(a);
    }
    throw EvalError("corrupt call node", print(n));
  }

  double binary(const Node& n) const {
    const double a = visit(*n.lhs);
    const double b = visit(*n.rhs);
    switch (n.op) {
      case BinaryOp::add: return finite(a + b, n, "overflow in '+'");
      case BinaryOp::sub: return finite(a - b, n, "overflow in '-'");
      case BinaryOp::mul: return finite(a * b, n, "overflow in '*'");
      case BinaryOp::div:
        if (b == 0.0) throw EvalError("division by zero", print(n));
        return finite(a / b, n, "overflow in '/'");
      case BinaryOp::pow: {
        if (a < 0.0 && b != std::floor(b))
          throw EvalError("fractional power of a negative base", print(n));
        if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power", print(n));
        return finite(std::pow(a, b), n, "overflow in '^'");
      }
    }
    throw EvalError("corrupt binary node", print(n));
  }

  double r_;
  const std::map<std::string, double>* params_;
};

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::number: return a.number == b.number;
    case NodeKind::variable: return true;
    case NodeKind::parameter: return a.name == b.name;
    case NodeKind::constant: return a.constant == b.constant;
    case NodeKind::unary_neg: return nodes_equal(*a.lhs, *b.lhs);
    case NodeKind::call: return a.fn == b.fn && nodes_equal(*a.lhs, *b.lhs);
    case NodeKind::binary:
      return a.op == b.op && nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
  }
  return false;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, const std::string& expected,
                         const std::string& found)
    : ConfigError("syntax error at byte " + std::to_string(offset) + ": expected " + expected +
                  ", found " + found),
      offset_(offset),
      expected_(expected) {}

EvalError::EvalError(const std::string& message, std::string subexpression)
    : NumericError(message + " in '" + subexpression + "'"), subexpr_(std::move(subexpression)) {}

ExprAst::ExprAst(NodePtr root, std::set<std::string> params)
    : root_(std::move(root)), params_(std::move(params)) {}

ExprAst ExprAst::parse(std::string_view source) {
  Parser parser(source, nullptr);
  std::set<std::string> params;
  NodePtr root = parser.run(params);
  return ExprAst(std::move(root), std::move(params));
}

ExprAst ExprAst::parse(std::string_view source, const std::set<std::string>& allowed_params) {
  Parser parser(source, &allowed_params);
  std::set<std::string> params;
  NodePtr root = parser.run(params);
  return ExprAst(std::move(root), std::move(params));
}

double ExprAst::eval(double r) const { return Evaluator(r, nullptr).visit(*root_); }

double ExprAst::eval(double r, const std::map<std::string, double>& params) const {
  return Evaluator(r, &params).visit(*root_);
}

std::string ExprAst::str() const {
  std::ostringstream os;
  print_node(*root_, os, false);
  return os.str();
}

std::string ExprAst::str_full_parens() const {
  std::ostringstream os;
  print_node(*root_, os, true);
  return os.str();
}

bool ExprAst::structurally_equal(const ExprAst& other) const {
  return nodes_equal(*root_, *other.root_);
}

double derivative_consistency(const ExprAst& f, const ExprAst& fprime,
                              std::span<const double> sample,
                              const std::map<std::string, double>& params) {
  double worst = 0.0;
  for (double r : sample) {
    const double h = 1e-5 * std::max(1.0, std::fabs(r));
    const double diff = (f.eval(r + h, params) - f.eval(r - h, params)) / (2.0 * h);
    const double claimed = fprime.eval(r, params);
    const double dev = std::fabs(diff - claimed) / std::max(1.0, std::fabs(claimed));
    worst = std::max(worst, dev);
  }
  return worst;
}

}  // namespace kcl::expr
