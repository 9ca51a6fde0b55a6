#pragma once

// Shared pipeline fixtures and brute-force feasibility oracles.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modsynth/booleanizer.hpp"
#include "modsynth/game.hpp"

namespace fixture {

std::string spec_text(const std::string& name);
modsynth::LtlTSpec load_spec(const std::string& name, std::optional<modsynth::Sort> theory = std::nullopt);

struct Built {
  modsynth::BooleanSpec bspec;
  modsynth::MealyMachine machine;
};

Built build(const std::string& name, std::optional<modsynth::Sort> theory = std::nullopt);

/// running plus the syn_2_k templates.
std::vector<std::string> benchmark_specs();

/// Int: every integer in [-30, 30]. Real: every multiple of 1/4 in that
/// window, which hits each open interval between the half-integer
/// boundaries the benchmark literals produce for integer inputs.
std::vector<modsynth::Rational> y_samples(modsynth::Sort sort);

/// Choices realizable at v_x by some sampled value of the (single) system
/// variable, computed by evaluating every literal.
std::set<modsynth::Choice> feasible_choices(const modsynth::LtlTSpec& spec, const modsynth::Valuation& v_x);

modsynth::Valuation val(std::initializer_list<std::pair<const char*, long>> kv);

}  // namespace fixture
