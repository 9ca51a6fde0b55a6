#pragma once

// Boolean abstraction of an LTL-modulo-theories specification: choices,
// their characteristic cubes, environment regions and valid reactions.

#include <cstdint>
#include <string>
#include <vector>

#include "modsynth/logic.hpp"
#include "modsynth/spec.hpp"

namespace modsynth {

/// Valuation of the propositions s_0..s_{n-1}; bit i set means s_i holds.
using Choice = std::uint32_t;

/// Index k of a choice in the c_k numbering, where c_0 makes every
/// proposition true and s_0 is the most significant position.
std::size_t choice_index(Choice c, std::size_t n);
Choice choice_at(std::size_t index, std::size_t n);

/// "110" means s_0, s_1 true and s_2 false.
std::string choice_bits(Choice c, std::size_t n);
Choice parse_choice_bits(const std::string& bits, std::size_t n);

inline bool choice_has(Choice c, std::size_t i) { return (c >> i) & 1U; }

/// Conjunction of the literals (or their negations) selected by c.
Formula characteristic_choice(Choice c, const LtlTSpec& spec);
Formula characteristic_choice(Choice c, const std::vector<Formula>& literals);

/// Environment inputs for which some system output realizes c, with the
/// system variables eliminated.
Formula choice_region(Choice c, const LtlTSpec& spec);

struct ReactionEntry {
  std::string letter;
  std::vector<Choice> reaction;  // ascending choice index
  Formula region;                // over the environment variables only

  bool contains(Choice c) const;
};

struct ValidReactionTable {
  std::vector<Variable> env;
  std::vector<Variable> sys;
  std::vector<Formula> literals;
  std::vector<ReactionEntry> entries;

  std::size_t literal_count() const { return literals.size(); }
  /// Throws SchemaError for unknown letters.
  std::size_t index_of(const std::string& letter) const;
};

struct AbstractionOptions {
  std::size_t max_literals = 12;
};

/// Model-guided discovery of the valid reactions. Throws
/// ChoiceBudgetExceeded when the literal count exceeds the bound.
ValidReactionTable enumerate_valid_reactions(const LtlTSpec& spec, const AbstractionOptions& options = {});

/// Equivalent quantifier-free formula with unsatisfiable DNF cubes dropped.
Formula simplify_region(const Formula& f);

struct BooleanSpec {
  LtlTSpec spec;
  LtlNode direct;  // property over s_i in place of l_i
  ValidReactionTable table;

  std::vector<std::string> propositions() const;
  std::vector<std::string> letters() const;

  std::string render_direct() const;
  std::string render_legal() const;
  std::string render_extra(std::size_t entry) const;
  /// direct && G(legal -> extra) as one formula.
  std::string render() const;
};

BooleanSpec booleanize(const LtlTSpec& spec, ValidReactionTable table);
BooleanSpec booleanize(const LtlTSpec& spec, const AbstractionOptions& options = {});

}  // namespace modsynth
