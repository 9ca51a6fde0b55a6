#pragma once

// Terms, atoms and formulas of linear arithmetic over Int and Real sorts.
//
// Atoms are kept in a normal form `term REL 0` with REL in {<=, <, =} or
// `k | term`. Over Int every coefficient is integral, the variable
// coefficients are coprime and strict inequalities are tightened
// (t < 0 becomes t + 1 <= 0). Over Real the leading coefficient (first
// variable by name) has magnitude one. Formulas are immutable and
// structurally shared; the smart constructors fold constants, flatten
// nested connectives, drop duplicates and prune implied bounds.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "modsynth/rational.hpp"

namespace modsynth {

enum class Sort { Int, Real };

std::string_view to_string(Sort s);
Sort parse_sort(std::string_view text);

/// Exact assignment of variables to values. Int variables hold integral values.
using Valuation = std::map<std::string, Rational>;

/// Variable name to sort.
using SortContext = std::map<std::string, Sort>;

class LinearTerm {
 public:
  using Coefficients = std::map<std::string, Rational>;

  LinearTerm() = default;
  explicit LinearTerm(Rational constant) : constant_(std::move(constant)) {}
  static LinearTerm variable(const std::string& name, const Rational& coeff = 1);

  const Coefficients& coefficients() const { return coeffs_; }
  const Rational& constant() const { return constant_; }
  Rational coefficient(const std::string& var) const;
  bool mentions(const std::string& var) const { return coeffs_.count(var) != 0; }
  bool is_constant() const { return coeffs_.empty(); }

  /// The term without its constant part.
  LinearTerm variable_part() const;

  LinearTerm operator+(const LinearTerm& o) const;
  LinearTerm operator-(const LinearTerm& o) const;
  LinearTerm operator-() const;
  LinearTerm operator*(const Rational& k) const;
  LinearTerm& operator+=(const LinearTerm& o);

  LinearTerm substitute(const std::string& var, const LinearTerm& by) const;
  LinearTerm substitute(const Valuation& bindings) const;

  /// Throws MissingVariable when a mentioned variable is unassigned.
  Rational evaluate(const Valuation& v) const;

  std::string to_string() const;
  std::size_t hash() const;

  friend bool operator==(const LinearTerm& a, const LinearTerm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const LinearTerm& a, const LinearTerm& b) { return !(a == b); }
  friend bool operator<(const LinearTerm& a, const LinearTerm& b);

 private:
  void add(const std::string& var, const Rational& c);

  Coefficients coeffs_;
  Rational constant_{0};
};

enum class Relation { Le, Lt, Eq, Divides };

/// Relations accepted before normalization.
enum class RawRelation { Le, Lt, Eq, Ne, Ge, Gt, Divides };

/// A normalized atom `term REL 0` (or `modulus | term`). Build atoms through
/// normalize_atom(); the constructor trusts its caller.
class Atom {
 public:
  Atom(LinearTerm term, Relation rel, Sort sort, Integer modulus = 0)
      : term_(std::move(term)), rel_(rel), sort_(sort), modulus_(std::move(modulus)) {}

  const LinearTerm& term() const { return term_; }
  Relation relation() const { return rel_; }
  Sort sort() const { return sort_; }
  const Integer& modulus() const { return modulus_; }

  bool holds(const Valuation& v) const;
  std::string to_string() const;
  std::size_t hash() const;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.rel_ == b.rel_ && a.sort_ == b.sort_ && a.modulus_ == b.modulus_ && a.term_ == b.term_;
  }
  friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }

 private:
  LinearTerm term_;
  Relation rel_;
  Sort sort_;
  Integer modulus_;
};

struct FormulaFactory;

class Formula {
 public:
  enum class Kind { True, False, Atom, Not, And, Or, Exists, Forall };

  /// Defaults to `true`.
  Formula();

  static Formula top();
  static Formula bottom();
  static Formula constant(bool value) { return value ? top() : bottom(); }
  static Formula atom(Atom a);
  static Formula negate(const Formula& f);
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);
  static Formula conj(const Formula& a, const Formula& b) { return conj(std::vector<Formula>{a, b}); }
  static Formula disj(const Formula& a, const Formula& b) { return disj(std::vector<Formula>{a, b}); }
  static Formula implies(const Formula& a, const Formula& b) { return disj(negate(a), b); }
  static Formula exists(const std::string& var, Sort sort, const Formula& body);
  static Formula forall(const std::string& var, Sort sort, const Formula& body);

  Kind kind() const;
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  bool is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::Forall; }

  const Atom& as_atom() const;
  /// Children of And/Or, or the single operand of Not.
  const std::vector<Formula>& children() const;
  const std::string& bound_var() const;
  Sort bound_sort() const;
  const Formula& body() const;

  bool is_quantifier_free() const;
  std::size_t hash() const;
  /// Number of nodes, used for budget checks and diagnostics.
  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  friend struct FormulaFactory;
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct RawAtom {
  LinearTerm term;  // lhs - rhs
  RawRelation rel;
  Sort sort;
  Integer modulus = 0;  // only for Divides
};

/// Normal-form rewrite of a raw atom. May fold to true/false or, for `!=`,
/// produce a disjunction of strict inequalities.
Formula normalize_atom(const RawAtom& raw);

/// The negation of a normalized atom with the negation pushed inside
/// (divisibility atoms stay under a Not).
Formula complement(const Atom& a);

/// Evaluates a quantifier-free formula with exact arithmetic.
bool eval_formula(const Formula& f, const Valuation& v);

/// Replaces free occurrences of the bound variables and constant-folds.
Formula substitute(const Formula& f, const Valuation& bindings);
Formula substitute(const Formula& f, const std::string& var, const LinearTerm& by);

/// Negation normal form: Not only directly above divisibility atoms.
Formula to_nnf(const Formula& f);

/// A conjunction of literals (atoms or negated divisibility atoms).
using Cell = std::vector<Formula>;
inline constexpr std::size_t kDefaultCellBudget = 4096;

/// Disjunctive normal form of a quantifier-free formula. Cells appear in
/// syntactic left-to-right expansion order. Throws CellBudgetExceeded.
std::vector<Cell> to_dnf(const Formula& f, std::size_t budget = kDefaultCellBudget);

std::set<std::string> free_variables(const Formula& f);
/// Free variables with the sort of the atoms mentioning them.
SortContext free_variable_sorts(const Formula& f);

/// Renames bound variables so that each binder is unique in the formula
/// and distinct from every free variable.
Formula alpha_rename(const Formula& f);

std::string to_string(const Formula& f);

}  // namespace modsynth
