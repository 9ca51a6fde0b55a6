#pragma once

// LTL specifications whose atoms are arithmetic literals.
//
//   spec := decl* "property" ":" ltl
//   decl := ("env" | "sys") ident ":" ("int" | "real") ";"
//   ltl  := "G" ltl | "F" ltl | "X" ltl | ltl "U" ltl | ltl "R" ltl
//         | ltl "&&" ltl | ltl "||" ltl | "!" ltl | ltl "->" ltl | ltl "<->" ltl
//         | "(" ltl ")" | "true" | "false" | atom

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modsynth/logic.hpp"
#include "modsynth/solver.hpp"

namespace modsynth {

struct LtlNode {
  enum class Kind { True, False, Literal, Not, And, Or, Implies, Iff, Next, Until, Release, Eventually, Globally };

  Kind kind = Kind::True;
  std::size_t literal = 0;
  std::vector<LtlNode> children;

  static LtlNode constant(bool v) { return LtlNode{v ? Kind::True : Kind::False, 0, {}}; }
  static LtlNode lit(std::size_t i) { return LtlNode{Kind::Literal, i, {}}; }
  static LtlNode unary(Kind k, LtlNode c) { return LtlNode{k, 0, {std::move(c)}}; }
  static LtlNode binary(Kind k, LtlNode a, LtlNode b) { return LtlNode{k, 0, {std::move(a), std::move(b)}}; }

  friend bool operator==(const LtlNode& a, const LtlNode& b) {
    return a.kind == b.kind && a.literal == b.literal && a.children == b.children;
  }
};

struct LtlTSpec {
  std::vector<Variable> env;
  std::vector<Variable> sys;
  LtlNode property;
  /// Distinct normalized atoms l_0..l_{n-1}, in order of first occurrence.
  std::vector<Formula> literals;

  SortContext sorts() const;
  bool is_env(const std::string& name) const;
  /// Proposition name abstracting literal i ("s0", "s1", ...).
  static std::string proposition(std::size_t i) { return "s" + std::to_string(i); }
};

/// Throws SyntaxError (with line:column), UndeclaredVariable, DuplicateDeclaration.
/// A theory override replaces every declared sort.
LtlTSpec parse_spec(std::string_view text, std::optional<Sort> theory = std::nullopt);

const std::vector<Formula>& extract_literals(const LtlTSpec& spec);

enum class Fragment { GXSafety, General };

Fragment classify_fragment(const LtlNode& property);

/// Spec text that parses back to an equal spec.
std::string render_spec(const LtlTSpec& spec);

/// Renders an LTL tree, delegating literal leaves.
std::string render_ltl(const LtlNode& n, const std::function<std::string(std::size_t)>& leaf);

/// Parses LTL over the given proposition names (the Boolean side).
LtlNode parse_propositional_ltl(std::string_view text, const std::vector<std::string>& names);

/// True if the subtree contains no temporal operator.
bool is_boolean(const LtlNode& n);

/// Value of a temporal-free node under a valuation of the leaves.
bool eval_boolean(const LtlNode& n, const std::function<bool(std::size_t)>& leaf);

}  // namespace modsynth
