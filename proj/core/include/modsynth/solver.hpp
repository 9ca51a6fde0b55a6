#pragma once

// Quantifier elimination (Cooper for Int, virtual substitution for Real),
// validity checking, model search and Skolem-function synthesis.

#include <optional>
#include <string>
#include <vector>

#include "modsynth/logic.hpp"

namespace modsynth {

struct Variable {
  std::string name;
  Sort sort = Sort::Int;

  friend bool operator==(const Variable& a, const Variable& b) { return a.name == b.name && a.sort == b.sort; }
};

struct QeResult {
  Formula formula;
  std::vector<std::string> eliminated;
};

/// Eliminates every quantifier, innermost first.
QeResult eliminate_quantifiers(const Formula& f);

/// QE for a single existential over a quantifier-free body.
Formula eliminate_exists(const std::string& var, Sort sort, const Formula& body);

/// Validity under the universal closure of the free variables.
bool check_validity(const Formula& f);

/// Satisfiability under the existential closure of the free variables.
bool check_satisfiable(const Formula& f);

/// Deterministic model search. Unassigned variables of `vars` that do not
/// occur in f get 0. Returns nullopt when f is unsatisfiable.
std::optional<Valuation> find_model(const Formula& f, const std::vector<Variable>& vars);

/// Guarded decision tree with one linear-term leaf per output.
class SkolemFunction {
 public:
  struct Node {
    Formula guard;  // internal nodes only
    int then_child = -1;
    int else_child = -1;
    std::map<std::string, LinearTerm> outputs;  // leaves only

    bool is_leaf() const { return then_child < 0; }
  };

  SkolemFunction() = default;
  SkolemFunction(std::vector<Variable> inputs, std::vector<Variable> outputs, std::vector<Node> nodes)
      : inputs_(std::move(inputs)), outputs_(std::move(outputs)), nodes_(std::move(nodes)) {}

  const std::vector<Variable>& inputs() const { return inputs_; }
  const std::vector<Variable>& outputs() const { return outputs_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }

  /// Output values for a total input valuation (extra entries are ignored).
  Valuation evaluate(const Valuation& in) const;

  /// Leaf reached together with the guards that held on the way there.
  struct Path {
    std::vector<Formula> taken;
    std::vector<Formula> refused;
    const Node* leaf = nullptr;
    bool fallback = false;  // reached through an else edge
  };
  std::vector<Path> paths() const;

  std::size_t leaf_count() const;

  friend bool operator==(const SkolemFunction& a, const SkolemFunction& b);

 private:
  std::vector<Variable> inputs_;
  std::vector<Variable> outputs_;
  std::vector<Node> nodes_;
};

bool operator==(const SkolemFunction::Node& a, const SkolemFunction::Node& b);

/// Synthesizes a Skolem function for `forall inputs. exists outputs. body`.
/// The body may contain further quantifiers; they are eliminated first.
/// Returns nullopt when the formula is not valid.
std::optional<SkolemFunction> synthesize_skolem(const std::vector<Variable>& inputs,
                                                const std::vector<Variable>& outputs, const Formula& body);

/// Same, for a formula already in the shape forall* exists* body.
std::optional<SkolemFunction> synthesize_skolem(const Formula& prenex);

/// Checks the Skolem contract: forall inputs. body[outputs <- leaf] holds
/// on every path, assuming the guards taken (and refused, for leaves reached
/// through an else edge).
bool verify_skolem(const SkolemFunction& h, const Formula& body);

}  // namespace modsynth
