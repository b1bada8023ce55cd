#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace boltdis {

/// A predicate applied to an ordered list of identifiers. Identifiers that
/// start with '?' are variables; everything else is a constant.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  Literal negation() const { return {atom, !negated}; }

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

std::string to_string(const Atom& atom);
std::string to_string(const Literal& literal);
std::ostream& operator<<(std::ostream& os, const Atom& atom);
std::ostream& operator<<(std::ostream& os, const Literal& literal);

bool is_variable(std::string_view identifier);

enum class PredicateKind { kSymbolic, kNeural };

struct PredicateInfo {
  std::string name;
  std::size_t arity = 0;
  PredicateKind kind = PredicateKind::kSymbolic;

  bool operator==(const PredicateInfo&) const = default;
};

/// A parameterized primitive: action(a), param(a), pre(a), eff(a).
/// Literal lists keep first-occurrence order and hold no duplicates.
struct ActionSchema {
  std::string name;
  std::vector<std::string> params;
  std::vector<Literal> pre;
  std::vector<Literal> eff;

  bool operator==(const ActionSchema&) const = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> constants;
  std::vector<PredicateInfo> predicates;
  std::vector<ActionSchema> actions;

  const PredicateInfo* find_predicate(std::string_view name) const;
  const ActionSchema* find_action(std::string_view name) const;
  bool is_neural(std::string_view predicate) const;

  /// Declared constants followed by every non-variable action parameter, in
  /// order of first appearance. These are the objects actions ground over.
  std::vector<std::string> objects() const;

  bool operator==(const Domain&) const = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<Literal> init;
  std::vector<Literal> goal;

  bool operator==(const Problem&) const = default;
};

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

class PddlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public PddlError {
 public:
  SyntaxError(SourcePos pos, std::string expected, const std::string& found);

  SourcePos pos() const { return pos_; }
  const std::string& expected() const { return expected_; }

 private:
  SourcePos pos_;
  std::string expected_;
};

class ArityMismatch : public PddlError {
 public:
  using PddlError::PddlError;
};

class DuplicateAction : public PddlError {
 public:
  using PddlError::PddlError;
};

class UnknownPredicate : public PddlError {
 public:
  using PddlError::PddlError;
};

/// Structurally well-formed input that breaks a semantic rule: contradictory
/// literal sets, unbound variables, empty goals and the like.
class ValidationError : public PddlError {
 public:
  using PddlError::PddlError;
};

struct ParseOptions {
  /// Accept the shorthand listing style: unbalanced parentheses are closed
  /// at block boundaries, the `(define ...)` wrapper is optional, and a bare
  /// use of a predicate is promoted to the arguments it has everywhere else.
  bool lenient = false;
};

Domain parse_domain(std::string_view text, const ParseOptions& options = {});
Problem parse_problem(std::string_view text, const Domain& domain,
                      const ParseOptions& options = {});

/// Canonical form with standard keywords. parse_domain(format_domain(d)) == d.
std::string format_domain(const Domain& domain);
std::string format_problem(const Problem& problem);

}  // namespace boltdis
