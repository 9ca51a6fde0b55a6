#pragma once

// Safety games for the G/X fragment and the Mealy controllers they yield.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "modsynth/booleanizer.hpp"

namespace modsynth {

struct MealyMachine {
  struct Transition {
    std::size_t from = 0;
    std::size_t letter = 0;
    std::size_t to = 0;
    Choice output = 0;

    friend bool operator==(const Transition&, const Transition&) = default;
  };

  std::vector<std::string> letters;
  std::vector<std::string> propositions;
  std::size_t states = 0;
  std::size_t initial = 0;
  std::vector<Transition> transitions;  // sorted by (from, letter)

  const Transition* find(std::size_t state, std::size_t letter) const;

  friend bool operator==(const MealyMachine&, const MealyMachine&) = default;
};

/// Game positions are pairs (initial-step flag, allowed next-step vectors):
/// `allowed` has bit w set when the valuation w of the Next-guarded
/// subformulas is still acceptable at the following step.
struct SafetyGame {
  struct Position {
    bool initial = false;
    std::uint64_t allowed = 0;

    friend bool operator==(const Position&, const Position&) = default;
  };
  struct Move {
    std::size_t letter = 0;
    Choice output = 0;
    std::size_t to = 0;
  };

  std::vector<LtlNode> next_terms;
  std::vector<LtlNode> invariants;    // bodies of the G conjuncts
  std::vector<LtlNode> initial_only;  // conjuncts constraining step 0
  std::vector<std::string> letters;
  std::vector<std::string> propositions;
  std::vector<Position> positions;  // 0 is initial
  std::vector<std::vector<Move>> moves;  // legal moves per position, by letter then choice index
};

/// Conjuncts of a G/X property: G bodies, step-0 constraints and the
/// distinct operands of Next.
struct SafetyStructure {
  std::vector<LtlNode> invariants;
  std::vector<LtlNode> initial_only;
  std::vector<LtlNode> next_terms;
};

SafetyStructure safety_structure(const LtlNode& property);

/// Value of a step formula: leaves come from `now`, Next operands from bit j
/// of `next_values`.
bool eval_step(const LtlNode& n, const std::function<bool(std::size_t)>& now, std::uint64_t next_values,
               const std::vector<LtlNode>& next_terms);

/// Throws FragmentError outside the G/X fragment.
SafetyGame build_game(const BooleanSpec& bspec);

struct GameResult {
  std::optional<MealyMachine> machine;
  /// Letters along which the environment wins when unrealizable.
  std::vector<std::string> witness;

  bool realizable() const { return machine.has_value(); }
};

GameResult solve_and_extract(const SafetyGame& game);

/// Replays letters against the least legal system answer. Returns the step
/// at which no legal answer exists, if any.
std::optional<std::size_t> replay_witness(const SafetyGame& game, const std::vector<std::string>& letters);

std::string export_mealy(const MealyMachine& m);

/// Throws SchemaError on malformed input and ExtraViolation when an output
/// is outside the reaction of its letter.
MealyMachine import_mealy(const std::string& text, const BooleanSpec& bspec);

/// The checks of import_mealy on an in-memory machine.
void validate_mealy(const MealyMachine& m, const BooleanSpec& bspec);

}  // namespace modsynth
