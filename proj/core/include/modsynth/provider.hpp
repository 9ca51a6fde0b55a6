#pragma once

// Providers turn a chosen cube into concrete system outputs: statically
// through Skolem functions (optionally shaped by adaptive constraints) or
// dynamically through a model search per step.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "modsynth/booleanizer.hpp"
#include "modsynth/solver.hpp"

namespace modsynth {

enum class ProviderKind { Static, Dynamic, Adaptive };

std::string_view to_string(ProviderKind k);
ProviderKind parse_provider_kind(std::string_view text);

enum class ZBinding { External, PrevInput, PrevOutput };

struct ZVariable {
  Variable var;
  ZBinding binding = ZBinding::External;
  std::string source;  // bound input or output for the Prev* bindings
  Rational initial{0};
};

struct AdaptiveConstraint {
  std::size_t letter = 0;
  Choice choice = 0;
  Formula constraint;  // over the inputs, the z variables and the outputs
};

struct AdaptiveDescription {
  std::vector<ZVariable> z;
  std::vector<AdaptiveConstraint> constraints;

  const AdaptiveConstraint* find(std::size_t letter, Choice c) const;
  std::vector<Variable> z_variables() const;
};

/// forall inputs. exists outputs. region -> cube.
/// Throws ChoiceNotInReaction.
Formula build_basic_formula(const ValidReactionTable& table, std::size_t letter, Choice c);

/// region -> cube, the matrix of the basic formula.
Formula provider_body(const ValidReactionTable& table, std::size_t letter, Choice c);

/// forall w. (psi[y <- w] -> |y - z| <= |w - z| (+ eps)). Real sorts need eps.
Formula build_closest_constraint(const Formula& psi, const std::string& y, const std::string& z, Sort sort,
                                 const std::optional<Rational>& eps = std::nullopt);

/// forall w. (psi[y <- w] -> w <= y), or w >= y when `greatest` is false.
Formula build_extremal_constraint(const Formula& psi, const std::string& y, Sort sort, bool greatest);

enum class AdaptiveShape { Greatest, Least, Closest };

/// region -> shape(cube) for one table pair; `target` names the z variable
/// of the closest shape.
Formula shaped_constraint(const ValidReactionTable& table, std::size_t letter, Choice c, AdaptiveShape shape,
                          const std::string& output, const std::string& target = {},
                          const std::optional<Rational>& eps = std::nullopt);

/// Skolem function of forall inputs. exists outputs. (psi && psi_plus).
/// Throws AdaptiveInvalid naming `label` when that formula is not valid.
SkolemFunction synthesize_adaptive(const std::vector<Variable>& inputs, const std::vector<Variable>& outputs,
                                   const Formula& psi, const Formula& psi_plus, const std::string& label);

/// Skolem function for one (letter, choice) pair, adaptive when gamma
/// constrains the pair. Throws AdaptiveInvalid when the shaped formula is
/// not valid.
SkolemFunction synthesize_pair(const ValidReactionTable& table, std::size_t letter, Choice c,
                               const AdaptiveDescription* gamma = nullptr);

enum class SynthesisMode { Lazy, Eager };

class StaticProvider {
 public:
  struct Entry {
    std::size_t letter;
    Choice choice;
    std::shared_ptr<const SkolemFunction> function;
  };

  /// Eager mode synthesizes `pairs` (every pair of the table when empty)
  /// up front; lazy mode synthesizes on first use.
  StaticProvider(ValidReactionTable table, std::optional<AdaptiveDescription> gamma, SynthesisMode mode,
                 const std::vector<std::pair<std::size_t, Choice>>& pairs = {});

  /// Provider backed by previously synthesized functions only.
  static StaticProvider from_functions(ValidReactionTable table, std::optional<AdaptiveDescription> gamma,
                                       std::vector<Entry> entries);

  StaticProvider(StaticProvider&& other) noexcept;
  StaticProvider(const StaticProvider&) = delete;
  StaticProvider& operator=(const StaticProvider&) = delete;

  const ValidReactionTable& table() const { return table_; }
  const std::optional<AdaptiveDescription>& gamma() const { return gamma_; }
  SynthesisMode mode() const { return mode_; }

  const SkolemFunction& function(std::size_t letter, Choice c) const;
  Valuation provide(const Valuation& v_x, const Valuation& v_z, std::size_t letter, Choice c) const;

  /// Synthesized functions ordered by (letter, choice index).
  std::vector<Entry> entries() const;

 private:
  StaticProvider(ValidReactionTable table, std::optional<AdaptiveDescription> gamma, SynthesisMode mode, bool);

  ValidReactionTable table_;
  std::optional<AdaptiveDescription> gamma_;
  SynthesisMode mode_;
  bool sealed_ = false;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::size_t, Choice>, std::shared_ptr<const SkolemFunction>> memo_;
};

struct DynamicOptions {
  /// Emulates solver nondeterminism when set.
  std::optional<std::uint64_t> seed;
  double perturb_probability = 0.1;
  int perturb_radius = 3;
};

class DynamicProvider {
 public:
  DynamicProvider(ValidReactionTable table, std::optional<AdaptiveDescription> gamma = std::nullopt,
                  DynamicOptions options = {});

  const ValidReactionTable& table() const { return table_; }
  const DynamicOptions& options() const { return options_; }

  /// Model of the cube at v_x (and the adaptive constraint at v_z).
  /// Throws InfeasibleChoice.
  Valuation provide(const Valuation& v_x, const Valuation& v_z, std::size_t letter, Choice c);

 private:
  const Formula& constraint_for(std::size_t letter, Choice c);

  ValidReactionTable table_;
  std::optional<AdaptiveDescription> gamma_;
  DynamicOptions options_;
  std::mt19937_64 rng_;
  std::map<std::pair<std::size_t, Choice>, Formula> cache_;
};

/// One C99 function per output. Throws RealNotEmittable.
std::string emit_source(const SkolemFunction& f, const std::string& name);

}  // namespace modsynth
