#include "ncps/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace ncps::expr {

namespace {

std::string at_offset(std::size_t offset, const std::string& message) {
  return "syntax error at byte " + std::to_string(offset) + ": " + message;
}

}  // namespace

ParseError::ParseError(std::size_t off, const std::string& message)
    : std::runtime_error(at_offset(off, message)), offset(off) {}

EvalError::EvalError(const std::string& message, std::string frag)
    : std::runtime_error(message + (frag.empty() ? "" : " in '" + frag + "'")),
      fragment(std::move(frag)) {}

BindError::BindError(const std::string& message, std::string n)
    : std::runtime_error(message), name(std::move(n)) {}

const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names = {"sin", "cos", "tan", "exp",
                                                 "log", "sqrt", "abs"};
  return names;
}

namespace {

bool is_function(const std::string& name) {
  for (const auto& f : function_names())
    if (f == name) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  double number = 0.0;
  std::string text;
  std::size_t begin = 0, end = 0;
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
    current_.begin = pos_;
    if (pos_ >= src_.size()) {
      current_.kind = Tok::End;
      current_.end = pos_;
      return;
    }
    char c = src_[pos_];
    switch (c) {
      case '+': single(Tok::Plus); return;
      case '-': single(Tok::Minus); return;
      case '*': single(Tok::Star); return;
      case '/': single(Tok::Slash); return;
      case '^': single(Tok::Caret); return;
      case '(': single(Tok::LParen); return;
      case ')': single(Tok::RParen); return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      current_.kind = Tok::Ident;
      current_.text = std::string(src_.substr(start, pos_ - start));
      current_.end = pos_;
      return;
    }
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  void single(Tok k) {
    current_.kind = k;
    current_.text = std::string(1, src_[pos_]);
    ++pos_;
    current_.end = pos_;
  }

  void lex_number() {
    std::size_t start = pos_;
    bool digits_before = false, digits_after = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
      digits_before = true;
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        digits_after = true;
      }
    }
    if (!digits_before && !digits_after)
      throw ParseError(start, "malformed number literal");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
        throw ParseError(mark, "malformed exponent");
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    current_.kind = Tok::Number;
    current_.text = std::string(src_.substr(start, pos_ - start));
    current_.number = std::strtod(current_.text.c_str(), nullptr);
    current_.end = pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_;
};

// ---------------------------------------------------------------------------
// Parser

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(NodeKind kind, std::size_t begin, std::size_t end,
                  std::vector<NodePtr> args = {}, std::string name = {}, double num = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->number = num;
  n->name = std::move(name);
  n->args = std::move(args);
  n->begin = begin;
  n->end = end;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  NodePtr run() {
    NodePtr e = expression();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End)
      throw ParseError(t.begin, "expected operator or end of input");
    return e;
  }

 private:
  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind != Tok::Plus && t.kind != Tok::Minus) return lhs;
      Token op = lex_.take();
      NodePtr rhs = term();
      lhs = make_node(op.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub, lhs->begin,
                      rhs->end, {lhs, rhs});
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind != Tok::Star && t.kind != Tok::Slash) return lhs;
      Token op = lex_.take();
      NodePtr rhs = factor();
      lhs = make_node(op.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div, lhs->begin,
                      rhs->end, {lhs, rhs});
    }
  }

  NodePtr factor() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Minus) {
      Token op = lex_.take();
      NodePtr arg = factor();
      return make_node(NodeKind::Negate, op.begin, arg->end, {arg});
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (lex_.peek().kind == Tok::Caret) {
      lex_.take();
      NodePtr exp = factor();  // right-associative; exponent may be signed
      return make_node(NodeKind::Pow, base->begin, exp->end, {base, exp});
    }
    return base;
  }

  NodePtr primary() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::Number:
        return make_node(NodeKind::Number, t.begin, t.end, {}, {}, t.number);
      case Tok::Ident: {
        if (lex_.peek().kind == Tok::LParen) {
          if (!is_function(t.text))
            throw ParseError(t.begin, "unknown function '" + t.text + "'");
          lex_.take();
          NodePtr arg = expression();
          Token close = lex_.take();
          if (close.kind != Tok::RParen)
            throw ParseError(close.begin, "expected ')'");
          return make_node(NodeKind::Call, t.begin, close.end, {arg}, t.text);
        }
        return make_node(NodeKind::Variable, t.begin, t.end, {}, t.text);
      }
      case Tok::LParen: {
        NodePtr inner = expression();
        Token close = lex_.take();
        if (close.kind != Tok::RParen)
          throw ParseError(close.begin, "expected ')'");
        auto widened = std::make_shared<Node>(*inner);  // span includes the parens
        widened->begin = t.begin;
        widened->end = close.end;
        return widened;
      }
      case Tok::End:
        throw ParseError(t.begin, "unexpected end of input");
      default:
        throw ParseError(t.begin, "expected number, identifier or '('");
    }
  }

  Lexer lex_;
};

// ---------------------------------------------------------------------------
// Evaluation

double apply_function(const std::string& name, double x, const std::string& fragment) {
  if (name == "sin") return std::sin(x);
  if (name == "cos") return std::cos(x);
  if (name == "tan") return std::tan(x);
  if (name == "exp") return std::exp(x);
  if (name == "abs") return std::fabs(x);
  if (name == "log") {
    if (!(x > 0.0)) throw EvalError("log of non-positive value", fragment);
    return std::log(x);
  }
  if (name == "sqrt") {
    if (x < 0.0) throw EvalError("sqrt of negative value", fragment);
    return std::sqrt(x);
  }
  throw EvalError("unknown function '" + name + "'", fragment);
}

double checked_pow(double base, double exp, const std::string& fragment) {
  double r = std::pow(base, exp);
  if (std::isnan(r) && !std::isnan(base) && !std::isnan(exp))
    throw EvalError("invalid power", fragment);
  return r;
}

std::string fragment_of(const Node& n, const std::string& source) {
  if (n.end <= source.size() && n.begin <= n.end)
    return source.substr(n.begin, n.end - n.begin);
  return {};
}

double eval_node(const Node& n, const std::map<std::string, double>& env,
                 const std::string& source) {
  switch (n.kind) {
    case NodeKind::Number:
      return n.number;
    case NodeKind::Variable: {
      auto it = env.find(n.name);
      if (it == env.end())
        throw EvalError("unbound variable '" + n.name + "'", fragment_of(n, source));
      return it->second;
    }
    case NodeKind::Negate:
      return -eval_node(*n.args[0], env, source);
    case NodeKind::Add:
      return eval_node(*n.args[0], env, source) + eval_node(*n.args[1], env, source);
    case NodeKind::Sub:
      return eval_node(*n.args[0], env, source) - eval_node(*n.args[1], env, source);
    case NodeKind::Mul:
      return eval_node(*n.args[0], env, source) * eval_node(*n.args[1], env, source);
    case NodeKind::Div: {
      double num = eval_node(*n.args[0], env, source);
      double den = eval_node(*n.args[1], env, source);
      if (den == 0.0) throw EvalError("division by zero", fragment_of(n, source));
      return num / den;
    }
    case NodeKind::Pow:
      return checked_pow(eval_node(*n.args[0], env, source),
                         eval_node(*n.args[1], env, source), fragment_of(n, source));
    case NodeKind::Call:
      return apply_function(n.name, eval_node(*n.args[0], env, source),
                            fragment_of(n, source));
  }
  throw EvalError("corrupt expression node", {});
}

void collect_vars(const Node& n, std::set<std::string>& out) {
  if (n.kind == NodeKind::Variable) out.insert(n.name);
  for (const auto& a : n.args) collect_vars(*a, out);
}

// Pretty printer: parenthesize children only where precedence demands it.
// Levels: + - (1), * / (2), unary - (3), ^ (4), atoms (5).

int level_of(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, int min_level, std::string& out) {
  bool parens = level_of(n) < min_level;
  if (parens) out += '(';
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      break;
    }
    case NodeKind::Variable:
      out += n.name;
      break;
    case NodeKind::Negate:
      out += '-';
      print_node(*n.args[0], 3, out);
      break;
    case NodeKind::Add:
      print_node(*n.args[0], 1, out);
      out += '+';
      print_node(*n.args[1], 2, out);
      break;
    case NodeKind::Sub:
      print_node(*n.args[0], 1, out);
      out += '-';
      print_node(*n.args[1], 2, out);
      break;
    case NodeKind::Mul:
      print_node(*n.args[0], 2, out);
      out += '*';
      print_node(*n.args[1], 3, out);
      break;
    case NodeKind::Div:
      print_node(*n.args[0], 2, out);
      out += '/';
      print_node(*n.args[1], 3, out);
      break;
    case NodeKind::Pow:
      print_node(*n.args[0], 5, out);  // base must be atomic
      out += '^';
      print_node(*n.args[1], 3, out);  // exponent may carry a sign
      break;
    case NodeKind::Call:
      out += n.name;
      out += '(';
      print_node(*n.args[0], 1, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

double Expr::evaluate(const std::map<std::string, double>& env) const {
  if (!root_) throw EvalError("empty expression", {});
  return eval_node(*root_, env, source_);
}

std::set<std::string> Expr::free_variables() const {
  std::set<std::string> out;
  if (root_) collect_vars(*root_, out);
  return out;
}

std::string Expr::pretty() const {
  std::string out;
  if (root_) print_node(*root_, 0, out);
  return out;
}

Expr parse(std::string_view source) {
  std::size_t i = 0;
  while (i < source.size() && std::isspace(static_cast<unsigned char>(source[i]))) ++i;
  if (i == source.size()) throw ParseError(i, "empty expression");
  Parser p(source);
  return Expr(p.run(), std::string(source));
}

// ---------------------------------------------------------------------------
// Compiled form

struct Compiled::CNode {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  int slot = -1;
  std::string name;
  std::string fragment;
  std::vector<std::shared_ptr<const CNode>> args;
};

namespace {

std::shared_ptr<const Compiled::CNode> compile_node(
    const Node& n, const std::string& source, const std::vector<std::string>& coord_names,
    const std::map<std::string, double>& constants);

}  // namespace

double Compiled::operator()(std::span<const double> coords) const {
  struct Eval {
    std::span<const double> c;
    double run(const CNode& n) const {
      switch (n.kind) {
        case NodeKind::Number: return n.number;
        case NodeKind::Variable: return c[static_cast<std::size_t>(n.slot)];
        case NodeKind::Negate: return -run(*n.args[0]);
        case NodeKind::Add: return run(*n.args[0]) + run(*n.args[1]);
        case NodeKind::Sub: return run(*n.args[0]) - run(*n.args[1]);
        case NodeKind::Mul: return run(*n.args[0]) * run(*n.args[1]);
        case NodeKind::Div: {
          double num = run(*n.args[0]);
          double den = run(*n.args[1]);
          if (den == 0.0) throw EvalError("division by zero", n.fragment);
          return num / den;
        }
        case NodeKind::Pow:
          return checked_pow(run(*n.args[0]), run(*n.args[1]), n.fragment);
        case NodeKind::Call:
          return apply_function(n.name, run(*n.args[0]), n.fragment);
      }
      throw EvalError("corrupt expression node", {});
    }
  };
  if (!root_) throw EvalError("empty expression", {});
  return Eval{coords}.run(*root_);
}

namespace {

std::shared_ptr<const Compiled::CNode> compile_node(
    const Node& n, const std::string& source, const std::vector<std::string>& coord_names,
    const std::map<std::string, double>& constants) {
  auto out = std::make_shared<Compiled::CNode>();
  out->kind = n.kind;
  out->number = n.number;
  out->name = n.name;
  out->fragment = fragment_of(n, source);
  if (n.kind == NodeKind::Variable) {
    for (std::size_t i = 0; i < coord_names.size(); ++i) {
      if (coord_names[i] == n.name) {
        out->slot = static_cast<int>(i);
        return out;
      }
    }
    auto it = constants.find(n.name);
    if (it == constants.end())
      throw BindError("unknown identifier '" + n.name + "'", n.name);
    out->kind = NodeKind::Number;
    out->number = it->second;
    return out;
  }
  for (const auto& a : n.args)
    out->args.push_back(compile_node(*a, source, coord_names, constants));
  return out;
}

}  // namespace

Compiled compile(const Expr& e, const std::vector<std::string>& coord_names,
                 const std::map<std::string, double>& constants) {
  Compiled c;
  if (!e.empty()) c.root_ = compile_node(e.root(), e.source(), coord_names, constants);
  c.source_ = e.source();
  return c;
}

}  // namespace ncps::expr
