#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace measurefit::expr {

using Bindings = std::map<std::string, double>;

/// Syntax error with the byte offset of the offending token and the set of
/// tokens that would have been accepted there.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t offset, const std::string& expected)
      : std::runtime_error("syntax error at offset " + std::to_string(offset) +
                           ": expected " + expected),
        offset_(offset),
        expected_(expected) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

class EvalError : public std::runtime_error {
public:
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Immutable expression tree in one spatial variable `x` plus named
/// parameters. Precedence, low to high: + - | * / | unary - | ^ (right
/// associative) | atoms. Identifiers other than `x` are free parameters;
/// there are no built-in constants.
///
/// Evaluation is pure and deterministic; an Expr may be shared freely
/// across threads.
class Expr {
public:
  struct Node;

  static Expr parse(std::string_view source);

  /// IEEE double evaluation. Domain violations (ln of a negative, 0-division,
  /// negative base with fractional exponent) produce non-finite values rather
  /// than errors; unbound parameters throw EvalError.
  double evaluate(double x, const Bindings& bindings = {}) const;

  /// Free parameters, sorted, duplicates removed.
  const std::vector<std::string>& free_params() const noexcept {
    return params_;
  }

  /// Minimal-parentheses form that reparses to a structurally identical tree.
  std::string to_string() const;

  bool identical_to(const Expr& other) const noexcept;

  const std::string& source() const noexcept { return source_; }

private:
  Expr(std::shared_ptr<const Node> root, std::vector<std::string> params,
       std::string source)
      : root_(std::move(root)),
        params_(std::move(params)),
        source_(std::move(source)) {}

  std::shared_ptr<const Node> root_;
  std::vector<std::string> params_;
  std::string source_;
};

}  // namespace measurefit::expr
