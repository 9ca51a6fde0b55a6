#pragma once

// Repeated controller runs with per-component timing and divergence
// against a reference output trace.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modsynth/runtime.hpp"

namespace modsynth {

struct ComponentStats {
  double mean = 0;
  double p50 = 0;
  double p95 = 0;
};

struct BenchRow {
  std::size_t repeat = 0;
  std::size_t step = 0;
  std::string component;
  double micros = 0;
  std::uint64_t seed = 0;
  bool diverged = false;
};

struct BenchReport {
  ProviderKind kind = ProviderKind::Static;
  std::size_t steps = 0;
  std::size_t repeats = 0;
  std::vector<std::uint64_t> seeds;
  ComponentStats partitioner;
  ComponentStats machine;
  ComponentStats provider;
  ComponentStats total;
  double divergence_pct = 0;
  std::string reference = "static";
  std::vector<BenchRow> rows;

  std::string summary() const;
};

struct BenchOptions {
  std::size_t repeats = 1;
  std::optional<std::uint64_t> seed;  // repeat r runs the dynamic provider with seed + r
  DynamicOptions dynamic;
  std::optional<AdaptiveDescription> gamma;
  std::vector<Valuation> external_z;  // per step, for External z bindings
};

/// Output trace of one run, used as the divergence reference.
std::vector<Valuation> output_trace(const std::vector<StepRecord>& records);

BenchReport bench_static(const BooleanSpec& bspec, const MealyMachine& machine,
                         std::shared_ptr<const StaticProvider> provider, const std::vector<Valuation>& inputs,
                         const std::vector<Valuation>& reference, const BenchOptions& options);

BenchReport bench_dynamic(const BooleanSpec& bspec, const MealyMachine& machine, const std::vector<Valuation>& inputs,
                          const std::vector<Valuation>& reference, const BenchOptions& options);

struct BenchComparison {
  BenchReport static_report;
  BenchReport dynamic_report;

  /// Mean static provider time over mean dynamic provider time.
  double provider_ratio() const;
};

/// Both providers on identical inputs; the first static run is the reference.
BenchComparison bench_compare(const BooleanSpec& bspec, const MealyMachine& machine,
                              std::shared_ptr<const StaticProvider> provider, const std::vector<Valuation>& inputs,
                              const BenchOptions& options);

/// Columns step, component, micros, provider_kind, seed, diverged; one row
/// per step and repeat.
std::string bench_csv(const std::vector<const BenchReport*>& reports);

}  // namespace modsynth
