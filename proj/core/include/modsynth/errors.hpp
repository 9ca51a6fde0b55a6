#pragma once

#include <stdexcept>
#include <string>

namespace modsynth {

/// Base class of every error raised by the toolchain. The `component()`
/// string names the pipeline stage that failed and is surfaced by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string component, const std::string& what)
      : std::runtime_error(what), component_(std::move(component)) {}
  const std::string& component() const noexcept { return component_; }

 private:
  std::string component_;
};

#define MODSYNTH_ERROR(Name, Component)                           \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(Component, what) {} \
  }

// logic-core
MODSYNTH_ERROR(MissingVariable, "logic");
MODSYNTH_ERROR(SortMismatch, "logic");
MODSYNTH_ERROR(CellBudgetExceeded, "logic");
MODSYNTH_ERROR(SyntaxError, "parser");
MODSYNTH_ERROR(UndeclaredVariable, "parser");
MODSYNTH_ERROR(DuplicateDeclaration, "parser");

// arith-solver
MODSYNTH_ERROR(UnsupportedFragment, "solver");

// booleanizer / game
MODSYNTH_ERROR(ChoiceBudgetExceeded, "booleanizer");
MODSYNTH_ERROR(FragmentError, "game");
MODSYNTH_ERROR(SchemaError, "artifact");
MODSYNTH_ERROR(ExtraViolation, "game");

// partitioner
MODSYNTH_ERROR(NoRegion, "partitioner");
MODSYNTH_ERROR(MultiRegion, "partitioner");

// provider
MODSYNTH_ERROR(ChoiceNotInReaction, "provider");
MODSYNTH_ERROR(AdaptiveInvalid, "provider");
MODSYNTH_ERROR(InfeasibleChoice, "provider");
MODSYNTH_ERROR(RealNotEmittable, "provider");

// runtime
MODSYNTH_ERROR(SchemaMismatch, "runtime");

#undef MODSYNTH_ERROR

}  // namespace modsynth
