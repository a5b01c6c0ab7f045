#pragma once

// Scalar math expressions for model files: parsing, evaluation, and
// compilation against a fixed coordinate chart.
//
// Grammar (whitespace insignificant):
//   expression := term (('+'|'-') term)*
//   term       := factor (('*'|'/') factor)*
//   factor     := '-' factor | power
//   power      := primary ('^' factor)?        // right-associative
//   primary    := number | ident | ident '(' expression ')' | '(' expression ')'
//
// Precedence is ^ > unary minus > * / > + -, so "-x^2" is -(x^2) while
// "-2*3" is (-2)*3. The function set is closed: sin cos tan exp log sqrt abs.
// There is no implicit multiplication; "2x" is a syntax error.
//
// Parsed expressions are immutable and safe to evaluate concurrently.

#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ncps::expr {

struct ParseError : std::runtime_error {
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset = 0;
};

struct EvalError : std::runtime_error {
  EvalError(const std::string& message, std::string fragment);
  std::string fragment;  // offending sub-expression text
};

struct BindError : std::runtime_error {
  BindError(const std::string& message, std::string name);
  std::string name;
};

enum class NodeKind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  std::string name;  // variable reference or function name
  std::vector<std::shared_ptr<const Node>> args;
  std::size_t begin = 0, end = 0;  // byte span in the source text
};

class Expr {
 public:
  Expr() = default;
  Expr(std::shared_ptr<const Node> root, std::string source);

  bool empty() const { return root_ == nullptr; }
  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }

  double evaluate(const std::map<std::string, double>& env) const;
  std::set<std::string> free_variables() const;
  std::string pretty() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

Expr parse(std::string_view source);

const std::vector<std::string>& function_names();

// An Expr with variable references resolved to slots of a flat coordinate
// vector; names found in `constants` are folded in. Evaluation never touches
// a map, which matters when fields are sampled millions of times.
class Compiled {
 public:
  struct CNode;

  Compiled() = default;
  double operator()(std::span<const double> coords) const;

  friend Compiled compile(const Expr& e, const std::vector<std::string>& coord_names,
                          const std::map<std::string, double>& constants);

 private:
  std::shared_ptr<const CNode> root_;
  std::string source_;
};

Compiled compile(const Expr& e, const std::vector<std::string>& coord_names,
                 const std::map<std::string, double>& constants);

}  // namespace ncps::expr
