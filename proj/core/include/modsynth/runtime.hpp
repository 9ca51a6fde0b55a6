#pragma once

// The combined theory controller: partitioner, Boolean machine and provider
// composed into one step function, plus a trace checker.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "modsynth/game.hpp"
#include "modsynth/partitioner.hpp"
#include "modsynth/provider.hpp"

namespace modsynth {

struct StepRecord {
  std::size_t index = 0;
  Valuation v_x;
  std::size_t letter = 0;
  Choice choice = 0;
  Valuation v_y;
  Valuation v_z;
  double partition_us = 0;
  double machine_us = 0;
  double provide_us = 0;
};

struct ControllerMetrics {
  std::size_t steps = 0;
  double partition_us = 0;
  double machine_us = 0;
  double provide_us = 0;
};

using ProviderHandle = std::variant<std::shared_ptr<const StaticProvider>, std::shared_ptr<DynamicProvider>>;

class TheoryController {
 public:
  /// Throws SchemaMismatch when the components disagree.
  TheoryController(const BooleanSpec& bspec, MealyMachine machine, ProviderHandle provider,
                   std::optional<AdaptiveDescription> gamma = std::nullopt);

  /// external_z must bind every z variable declared External.
  StepRecord step(const Valuation& v_x, const Valuation& external_z = {});
  std::vector<StepRecord> run_trace(const std::vector<Valuation>& inputs,
                                    const std::vector<Valuation>& external_z = {});

  /// Back to the initial state with seeded z values; metrics are kept.
  void reset();

  std::size_t state() const { return state_; }
  const Valuation& z_state() const { return z_state_; }
  const ControllerMetrics& metrics() const { return metrics_; }
  const CompiledPartitioner& partitioner() const { return partitioner_; }
  const MealyMachine& machine() const { return machine_; }

 private:
  CompiledPartitioner partitioner_;
  MealyMachine machine_;
  ProviderHandle provider_;
  std::optional<AdaptiveDescription> gamma_;
  std::size_t state_ = 0;
  std::size_t steps_ = 0;
  Valuation z_state_;
  ControllerMetrics metrics_;
};

struct Violation {
  std::size_t index = 0;
  std::string kind;  // "literal" or "safety"
  std::string message;
};

struct TraceReport {
  std::size_t steps = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Literal agreement with the chosen cubes (when `check_choices`) and, for
/// the G/X fragment, bounded satisfaction of the property.
TraceReport check_trace(const LtlTSpec& spec, const std::vector<StepRecord>& records, bool check_choices = true);

}  // namespace modsynth
