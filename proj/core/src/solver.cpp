#include "modsynth/solver.hpp"

#include <algorithm>
#include <functional>

#include "modsynth/errors.hpp"

namespace modsynth {

namespace {

bool formula_mentions(const Formula& f, const std::string& x) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: return f.as_atom().term().mentions(x);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return f.bound_var() != x && formula_mentions(f.body(), x);
    default:
      for (const auto& c : f.children())
        if (formula_mentions(c, x)) return true;
      return false;
  }
}

// Rebuilds a quantifier-free NNF formula literal by literal. The callback
// receives atoms and negated divisibility atoms.
template <typename Fn>
Formula map_literals(const Formula& f, const Fn& fn) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Atom:
    case Formula::Kind::Not: return fn(f);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(map_literals(c, fn));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    default: throw UnsupportedFragment("quantifier inside a quantifier-free position: " + to_string(f));
  }
}

template <typename Fn>
void for_each_literal(const Formula& f, const Fn& fn) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
    case Formula::Kind::Not: fn(f); break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (const auto& c : f.children()) for_each_literal(c, fn);
      break;
    default: break;
  }
}

const Atom& literal_atom(const Formula& lit) {
  return lit.kind() == Formula::Kind::Atom ? lit.as_atom() : lit.children()[0].as_atom();
}

Formula rebuild(const Atom& a, const LinearTerm& t) {
  if (a.relation() == Relation::Divides)
    return normalize_atom(RawAtom{t, RawRelation::Divides, a.sort(), a.modulus()});
  RawRelation r = a.relation() == Relation::Le ? RawRelation::Le
                  : a.relation() == Relation::Lt ? RawRelation::Lt
                                                 : RawRelation::Eq;
  return normalize_atom(RawAtom{t, r, a.sort()});
}

void append_unique(std::vector<LinearTerm>& v, const LinearTerm& t) {
  if (std::find(v.begin(), v.end(), t) == v.end()) v.push_back(t);
}

// ---------------------------------------------------------------------------
// Integer elimination

// Rewrites f so that every atom mentioning x has an x coefficient of +-1,
// with x standing for L*x, and adds L | x. Returns the new formula and L.
std::pair<Formula, Integer> unit_coefficients(const Formula& f, const std::string& x) {
  Integer L = 1;
  for_each_literal(f, [&](const Formula& lit) {
    Rational a = literal_atom(lit).term().coefficient(x);
    if (a != 0) L = lcm(L, abs(a.get_num()));
  });
  if (L == 1) return {f, L};
  Formula g = map_literals(f, [&](const Formula& lit) {
    const Atom& a = literal_atom(lit);
    Rational c = a.term().coefficient(x);
    if (c == 0) return lit;
    Integer m = L / abs(c.get_num());
    LinearTerm t = (a.term() * Rational(m)).substitute(x, LinearTerm::variable(x, Rational(1, 1) / Rational(L)));
    Formula out = a.relation() == Relation::Divides
                      ? normalize_atom(RawAtom{t, RawRelation::Divides, Sort::Int, a.modulus() * m})
                      : rebuild(a, t);
    return lit.kind() == Formula::Kind::Not ? Formula::negate(out) : out;
  });
  Formula div = normalize_atom(RawAtom{LinearTerm::variable(x), RawRelation::Divides, Sort::Int, L});
  return {Formula::conj(g, div), L};
}

struct IntBounds {
  std::vector<LinearTerm> lower;  // x >= t
  std::vector<LinearTerm> upper;  // x <= t
  std::vector<LinearTerm> equal;  // x = t
  Integer period = 1;
};

// Expects unit coefficients on x.
IntBounds int_bounds(const Formula& f, const std::string& x) {
  IntBounds b;
  for_each_literal(f, [&](const Formula& lit) {
    const Atom& a = literal_atom(lit);
    Rational c = a.term().coefficient(x);
    if (c == 0) return;
    LinearTerm rest = a.term() - LinearTerm::variable(x, c);
    switch (a.relation()) {
      case Relation::Divides: b.period = lcm(b.period, a.modulus()); break;
      case Relation::Eq: append_unique(b.equal, rest * Rational(-c)); break;
      case Relation::Lt:
        rest += LinearTerm(1);
        [[fallthrough]];
      case Relation::Le:
        if (c > 0)
          append_unique(b.upper, -rest);
        else
          append_unique(b.lower, rest);
        break;
    }
  });
  return b;
}

// phi with x pushed to minus infinity (lower bounds and equalities fail).
Formula at_minus_infinity(const Formula& f, const std::string& x) {
  return map_literals(f, [&](const Formula& lit) {
    const Atom& a = literal_atom(lit);
    Rational c = a.term().coefficient(x);
    if (c == 0 || a.relation() == Relation::Divides) return lit;
    if (a.relation() == Relation::Eq) return Formula::bottom();
    return Formula::constant(c > 0);
  });
}

std::size_t count_lower(const Formula& f, const std::string& x, std::size_t& upper) {
  std::size_t lower = 0;
  upper = 0;
  for_each_literal(f, [&](const Formula& lit) {
    const Atom& a = literal_atom(lit);
    if (a.relation() == Relation::Divides || a.relation() == Relation::Eq) return;
    Rational c = a.term().coefficient(x);
    if (c > 0) ++upper;
    if (c < 0) ++lower;
  });
  return lower;
}

Formula cooper(const Formula& body, const std::string& x) {
  Formula f = body;
  std::size_t uppers = 0;
  std::size_t lowers = count_lower(f, x, uppers);
  if (uppers < lowers) f = substitute(f, x, LinearTerm::variable(x, -1));
  auto [g, L] = unit_coefficients(f, x);
  IntBounds b = int_bounds(g, x);
  std::vector<Formula> parts;
  Formula inf = at_minus_infinity(g, x);
  for (Integer j = 1; j <= b.period; ++j) {
    parts.push_back(substitute(inf, x, LinearTerm(Rational(j))));
    if (parts.back().is_true()) return Formula::top();
  }
  std::vector<LinearTerm> points;
  for (const auto& t : b.lower) append_unique(points, t - LinearTerm(1));
  for (const auto& t : b.equal) append_unique(points, t - LinearTerm(1));
  for (const auto& p : points) {
    for (Integer j = 1; j <= b.period; ++j) {
      parts.push_back(substitute(g, x, p + LinearTerm(Rational(j))));
      if (parts.back().is_true()) return Formula::top();
    }
  }
  return Formula::disj(std::move(parts));
}

// ---------------------------------------------------------------------------
// Real elimination

struct RealPoint {
  LinearTerm value;
  bool epsilon = false;
  friend bool operator==(const RealPoint& a, const RealPoint& b) {
    return a.epsilon == b.epsilon && a.value == b.value;
  }
};

Formula substitute_epsilon(const Formula& f, const std::string& x, const LinearTerm& e) {
  return map_literals(f, [&](const Formula& lit) {
    const Atom& a = literal_atom(lit);
    Rational c = a.term().coefficient(x);
    if (c == 0) return lit;
    if (a.relation() == Relation::Eq) return Formula::bottom();
    LinearTerm s = a.term().substitute(x, e);
    return normalize_atom(RawAtom{s, c > 0 ? RawRelation::Lt : RawRelation::Le, Sort::Real});
  });
}

Formula virtual_substitution(const Formula& body, const std::string& x) {
  Formula f = body;
  std::size_t uppers = 0;
  std::size_t lowers = count_lower(f, x, uppers);
  if (uppers < lowers) f = substitute(f, x, LinearTerm::variable(x, -1));
  std::vector<RealPoint> points;
  for_each_literal(f, [&](const Formula& lit) {
    const Atom& a = literal_atom(lit);
    Rational c = a.term().coefficient(x);
    if (c == 0) return;
    LinearTerm root = (a.term() - LinearTerm::variable(x, c)) * Rational(-1 / c);
    RealPoint p;
    if (a.relation() == Relation::Eq)
      p = RealPoint{root, false};
    else if (c < 0)
      p = RealPoint{root, a.relation() == Relation::Lt};
    else
      return;
    if (std::find(points.begin(), points.end(), p) == points.end()) points.push_back(p);
  });
  std::vector<Formula> parts{at_minus_infinity(f, x)};
  if (parts.back().is_true()) return Formula::top();
  for (const auto& p : points) {
    parts.push_back(p.epsilon ? substitute_epsilon(f, x, p.value) : substitute(f, x, p.value));
    if (parts.back().is_true()) return Formula::top();
  }
  return Formula::disj(std::move(parts));
}

constexpr std::size_t kSplitBudget = 64;

// A top-level conjunct x = t (coefficient +-1 for Int) lets x be replaced by t.
std::optional<LinearTerm> unit_equality(const Formula& f, const std::string& x, Sort sort) {
  for (const auto& c : f.children()) {
    if (c.kind() != Formula::Kind::Atom || c.as_atom().relation() != Relation::Eq) continue;
    Rational k = c.as_atom().term().coefficient(x);
    if (k == 0 || (sort == Sort::Int && abs(k) != 1)) continue;
    return (c.as_atom().term() - LinearTerm::variable(x, k)) * Rational(-1 / k);
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public QE API

Formula eliminate_exists(const std::string& var, Sort sort, const Formula& body) {
  Formula f = body.is_quantifier_free() ? to_nnf(body) : eliminate_quantifiers(body).formula;
  if (!formula_mentions(f, var)) return f;
  if (f.kind() == Formula::Kind::Or) {
    std::vector<Formula> parts;
    for (const auto& c : f.children()) {
      parts.push_back(eliminate_exists(var, sort, c));
      if (parts.back().is_true()) return Formula::top();
    }
    return Formula::disj(std::move(parts));
  }
  if (f.kind() == Formula::Kind::And) {
    std::vector<Formula> with, without;
    for (const auto& c : f.children()) (formula_mentions(c, var) ? with : without).push_back(c);
    if (!without.empty()) {
      without.push_back(eliminate_exists(var, sort, Formula::conj(std::move(with))));
      return Formula::conj(std::move(without));
    }
  }
  if (f.kind() == Formula::Kind::And) {
    if (auto eq = unit_equality(f, var, sort)) return substitute(f, var, *eq);
    bool cube = std::all_of(f.children().begin(), f.children().end(), [](const Formula& c) {
      return c.kind() == Formula::Kind::Atom || c.kind() == Formula::Kind::Not;
    });
    if (!cube) {
      std::vector<Cell> cells;
      try {
        cells = to_dnf(f, kSplitBudget);
      } catch (const CellBudgetExceeded&) {
      }
      if (cells.size() > 1) {
        std::vector<Formula> parts;
        for (auto& cell : cells) {
          parts.push_back(eliminate_exists(var, sort, Formula::conj(std::move(cell))));
          if (parts.back().is_true()) return Formula::top();
        }
        return Formula::disj(std::move(parts));
      }
    }
  }
  return sort == Sort::Int ? cooper(f, var) : virtual_substitution(f, var);
}

namespace {

Formula qe(const Formula& f, std::vector<std::string>& eliminated) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Atom: return f;
    case Formula::Kind::Not: return to_nnf(Formula::negate(qe(f.children()[0], eliminated)));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      if (f.is_quantifier_free()) return f;
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(qe(c, eliminated));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    case Formula::Kind::Exists: {
      Formula body = qe(f.body(), eliminated);
      eliminated.push_back(f.bound_var());
      return eliminate_exists(f.bound_var(), f.bound_sort(), body);
    }
    case Formula::Kind::Forall: {
      Formula body = qe(f.body(), eliminated);
      eliminated.push_back(f.bound_var());
      Formula neg = eliminate_exists(f.bound_var(), f.bound_sort(), to_nnf(Formula::negate(body)));
      return to_nnf(Formula::negate(neg));
    }
  }
  return f;
}

}  // namespace

QeResult eliminate_quantifiers(const Formula& f) {
  QeResult r;
  r.formula = to_nnf(qe(f, r.eliminated));
  return r;
}

bool check_validity(const Formula& f) {
  Formula closed = f;
  for (const auto& [v, s] : free_variable_sorts(f)) closed = Formula::forall(v, s, closed);
  Formula r = eliminate_quantifiers(closed).formula;
  if (r.is_true()) return true;
  if (r.is_false()) return false;
  throw UnsupportedFragment("closed formula did not reduce to a constant: " + to_string(r));
}

bool check_satisfiable(const Formula& f) { return !check_validity(Formula::negate(f)); }

// ---------------------------------------------------------------------------
// Model search

namespace {

// Least-witness value for a single variable in a conjunction of literals.
std::optional<Rational> cell_witness(const Cell& cell, const std::string& v, Sort sort) {
  Formula conj = Formula::conj(cell);
  auto holds = [&](const Rational& val) {
    Valuation point{{v, val}};
    return eval_formula(conj, point);
  };
  if (sort == Sort::Int) {
    std::optional<Integer> lo, hi, eq;
    bool eq_bad = false;
    Integer period = 1;
    for (const auto& lit : cell) {
      const Atom& a = literal_atom(lit);
      Rational c = a.term().coefficient(v);
      if (c == 0) continue;
      Rational k = a.term().constant();
      switch (a.relation()) {
        case Relation::Divides: period = lcm(period, a.modulus()); break;
        case Relation::Eq: {
          Rational e = -k / c;
          if (!is_integer(e) || (eq && *eq != e.get_num())) eq_bad = true;
          else eq = e.get_num();
          break;
        }
        case Relation::Lt: k += 1; [[fallthrough]];
        case Relation::Le:
          if (c > 0) {
            Integer u = floor(-k / c);
            if (!hi || u < *hi) hi = u;
          } else {
            Integer l = ceil(-k / c);
            if (!lo || l > *lo) lo = l;
          }
          break;
      }
    }
    if (eq_bad) return std::nullopt;
    if (eq) return holds(Rational(*eq)) ? std::optional<Rational>(Rational(*eq)) : std::nullopt;
    for (Integer j = 0; j < period; ++j) {
      Integer cand = lo ? *lo + j : hi ? *hi - j : j;
      if (lo && hi && cand > *hi) break;
      if (holds(Rational(cand))) return Rational(cand);
    }
    return std::nullopt;
  }
  struct B {
    Rational value;
    bool strict;
  };
  std::optional<B> lo, hi;
  std::optional<Rational> eq;
  for (const auto& lit : cell) {
    const Atom& a = literal_atom(lit);
    Rational c = a.term().coefficient(v);
    if (c == 0) continue;
    Rational root = -a.term().constant() / c;
    bool strict = a.relation() == Relation::Lt;
    if (a.relation() == Relation::Eq) {
      eq = root;
    } else if (c > 0) {
      if (!hi || root < hi->value || (root == hi->value && strict)) hi = B{root, strict};
    } else {
      if (!lo || root > lo->value || (root == lo->value && strict)) lo = B{root, strict};
    }
  }
  Rational cand;
  if (eq) {
    cand = *eq;
  } else if (lo && hi) {
    cand = lo->strict ? Rational((lo->value + hi->value) / 2) : lo->value;
  } else if (lo) {
    cand = lo->strict ? Rational(lo->value + 1) : lo->value;
  } else if (hi) {
    cand = hi->strict ? Rational(hi->value - 1) : hi->value;
  } else {
    cand = 0;
  }
  return holds(cand) ? std::optional<Rational>(cand) : std::nullopt;
}

std::optional<Rational> univariate_witness(const Formula& f, const std::string& v, Sort sort) {
  if (f.is_false()) return std::nullopt;
  for (const auto& cell : to_dnf(f)) {
    if (auto w = cell_witness(cell, v, sort)) return w;
  }
  return std::nullopt;
}

// Projects variables out innermost first, then picks values front to back.
std::optional<Valuation> solve_by_projection(const Formula& f, const std::vector<Variable>& vars) {
  std::vector<Variable> used;
  for (const auto& v : vars)
    if (formula_mentions(f, v.name)) used.push_back(v);
  std::vector<Formula> layer(used.size() + 1);
  layer[used.size()] = to_nnf(f);
  for (std::size_t i = used.size(); i > 1; --i) {
    layer[i - 1] = eliminate_exists(used[i - 1].name, used[i - 1].sort, layer[i]);
    if (layer[i - 1].is_false()) return std::nullopt;
  }
  Valuation model;
  for (const auto& v : vars) model[v.name] = 0;
  if (used.empty()) return eval_formula(f, model) ? std::optional<Valuation>(model) : std::nullopt;
  Valuation prefix;
  for (std::size_t i = 1; i <= used.size(); ++i) {
    Formula g = substitute(layer[i], prefix);
    auto w = univariate_witness(g, used[i - 1].name, used[i - 1].sort);
    if (!w) return std::nullopt;
    prefix[used[i - 1].name] = *w;
    model[used[i - 1].name] = *w;
  }
  return model;
}

enum class Tri { False, True, Unknown };

class ModelSearch {
 public:
  ModelSearch(const Formula& f, std::vector<Variable> vars) : f_(f), vars_(std::move(vars)) {
    collect(f_);
    assignment_.assign(atoms_.size(), Tri::Unknown);
  }

  std::optional<Valuation> run() { return search(); }

 private:
  void collect(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::Atom:
        if (index_of(f) < 0) atoms_.push_back(f);
        break;
      case Formula::Kind::Not:
      case Formula::Kind::And:
      case Formula::Kind::Or:
        for (const auto& c : f.children()) collect(c);
        break;
      default: break;
    }
  }

  int index_of(const Formula& atom) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i] == atom) return static_cast<int>(i);
    return -1;
  }

  Tri eval(const Formula& f) const {
    switch (f.kind()) {
      case Formula::Kind::True: return Tri::True;
      case Formula::Kind::False: return Tri::False;
      case Formula::Kind::Atom: return assignment_[index_of(f)];
      case Formula::Kind::Not: {
        Tri t = eval(f.children()[0]);
        return t == Tri::Unknown ? t : t == Tri::True ? Tri::False : Tri::True;
      }
      case Formula::Kind::And: {
        Tri r = Tri::True;
        for (const auto& c : f.children()) {
          Tri t = eval(c);
          if (t == Tri::False) return t;
          if (t == Tri::Unknown) r = t;
        }
        return r;
      }
      case Formula::Kind::Or: {
        Tri r = Tri::False;
        for (const auto& c : f.children()) {
          Tri t = eval(c);
          if (t == Tri::True) return t;
          if (t == Tri::Unknown) r = t;
        }
        return r;
      }
      default: return Tri::Unknown;
    }
  }

  std::optional<Valuation> search() {
    if (eval(f_) == Tri::False) return std::nullopt;
    std::vector<Formula> cube;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (assignment_[i] == Tri::True) cube.push_back(atoms_[i]);
      if (assignment_[i] == Tri::False) cube.push_back(complement(atoms_[i].as_atom()));
    }
    auto model = solve_by_projection(Formula::conj(cube), vars_);
    if (!model) return std::nullopt;
    if (eval_formula(f_, *model)) return model;
    std::size_t next = 0;
    while (next < atoms_.size() && assignment_[next] != Tri::Unknown) ++next;
    if (next == atoms_.size()) return std::nullopt;
    for (Tri value : {Tri::True, Tri::False}) {
      assignment_[next] = value;
      if (auto m = search()) return m;
    }
    assignment_[next] = Tri::Unknown;
    return std::nullopt;
  }

  Formula f_;
  std::vector<Variable> vars_;
  std::vector<Formula> atoms_;
  std::vector<Tri> assignment_;
};

}  // namespace

std::optional<Valuation> find_model(const Formula& f, const std::vector<Variable>& vars) {
  Formula g = f.is_quantifier_free() ? to_nnf(f) : eliminate_quantifiers(f).formula;
  if (g.is_false()) return std::nullopt;
  std::vector<Variable> all = vars;
  for (const auto& [name, sort] : free_variable_sorts(g)) {
    bool known = std::any_of(all.begin(), all.end(), [&](const Variable& v) { return v.name == name; });
    if (!known) all.push_back(Variable{name, sort});
  }
  auto model = ModelSearch(g, all).run();
  if (model && !eval_formula(g, *model)) throw std::logic_error("model search returned a non-model");
  return model;
}

// ---------------------------------------------------------------------------
// Skolem functions

Valuation SkolemFunction::evaluate(const Valuation& in) const {
  const Node* n = &nodes_.front();
  while (!n->is_leaf()) n = &nodes_[eval_formula(n->guard, in) ? n->then_child : n->else_child];
  Valuation out;
  for (const auto& v : outputs_) {
    auto it = n->outputs.find(v.name);
    out[v.name] = it == n->outputs.end() ? Rational(0) : it->second.evaluate(in);
  }
  return out;
}

std::vector<SkolemFunction::Path> SkolemFunction::paths() const {
  std::vector<Path> out;
  std::function<void(int, Path)> walk = [&](int idx, Path p) {
    const Node& n = nodes_[idx];
    if (n.is_leaf()) {
      p.leaf = &n;
      out.push_back(std::move(p));
      return;
    }
    Path t = p;
    t.taken.push_back(n.guard);
    t.fallback = false;
    walk(n.then_child, std::move(t));
    p.refused.push_back(n.guard);
    p.fallback = true;
    walk(n.else_child, std::move(p));
  };
  walk(0, Path{});
  return out;
}

std::size_t SkolemFunction::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

bool operator==(const SkolemFunction::Node& a, const SkolemFunction::Node& b) {
  if (a.then_child != b.then_child || a.else_child != b.else_child) return false;
  if (a.is_leaf()) return a.outputs == b.outputs;
  return a.guard == b.guard;
}

bool operator==(const SkolemFunction& a, const SkolemFunction& b) {
  return a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_ && a.nodes_ == b.nodes_;
}

namespace {

struct Branch {
  Formula guard;
  LinearTerm witness;
};

std::vector<LinearTerm> int_candidates(const IntBounds& b) {
  if (!b.equal.empty()) return {b.equal.front()};
  std::vector<LinearTerm> out;
  if (!b.lower.empty()) {
    for (const auto& l : b.lower)
      for (Integer j = 0; j < b.period; ++j) append_unique(out, l + LinearTerm(Rational(j)));
  } else if (!b.upper.empty()) {
    for (const auto& u : b.upper)
      for (Integer j = 0; j < b.period; ++j) append_unique(out, u - LinearTerm(Rational(j)));
  } else {
    for (Integer j = 0; j < b.period; ++j) out.emplace_back(Rational(j));
  }
  return out;
}

std::vector<LinearTerm> real_candidates(const Cell& cell, const std::string& y) {
  std::vector<LinearTerm> weak_lower, lower, upper, equal;
  for (const auto& lit : cell) {
    const Atom& a = literal_atom(lit);
    Rational c = a.term().coefficient(y);
    if (c == 0) continue;
    LinearTerm root = (a.term() - LinearTerm::variable(y, c)) * Rational(-1 / c);
    if (a.relation() == Relation::Eq) {
      append_unique(equal, root);
    } else if (c > 0) {
      append_unique(upper, root);
    } else {
      append_unique(lower, root);
      if (a.relation() == Relation::Le) append_unique(weak_lower, root);
    }
  }
  if (!equal.empty()) return {equal.front()};
  std::vector<LinearTerm> out;
  if (!lower.empty() && !upper.empty()) {
    out = weak_lower;
    for (const auto& l : lower)
      for (const auto& u : upper) append_unique(out, (l + u) * Rational(1, 2));
  } else if (!lower.empty()) {
    for (const auto& l : lower) append_unique(out, l + LinearTerm(1));
  } else if (!upper.empty()) {
    for (const auto& u : upper) append_unique(out, u - LinearTerm(1));
  } else {
    out.emplace_back(Rational(0));
  }
  return out;
}

// Guarded witnesses for y in f, cell by cell. The disjunction of the guards
// is equivalent to exists y. f.
std::vector<Branch> witness_branches(const Formula& f, const std::string& y, Sort sort) {
  std::vector<Branch> out;
  auto add = [&](const Formula& guard, const LinearTerm& w) {
    if (guard.is_false()) return;
    for (const auto& b : out)
      if (b.guard == guard && b.witness == w) return;
    out.push_back(Branch{guard, w});
  };
  for (const auto& cell : to_dnf(f)) {
    Formula conj = Formula::conj(cell);
    if (sort == Sort::Real) {
      for (const auto& w : real_candidates(cell, y)) add(substitute(conj, y, w), w);
      continue;
    }
    auto [scaled, L] = unit_coefficients(conj, y);
    IntBounds b = int_bounds(scaled, y);
    for (const auto& w : int_candidates(b)) {
      Formula guard = substitute(scaled, y, w);
      add(guard, L == 1 ? w : w * Rational(Rational(1) / Rational(L)));
    }
  }
  return out;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<Variable>& outputs, const std::vector<std::vector<Branch>>& levels)
      : outputs_(outputs), levels_(levels) {}

  std::vector<SkolemFunction::Node> build(int& root) {
    root = build_level(0, {}, Formula::top());
    return std::move(nodes_);
  }

 private:
  int leaf(std::map<std::string, LinearTerm> outputs) {
    SkolemFunction::Node n;
    for (const auto& v : outputs_)
      if (!outputs.count(v.name)) outputs[v.name] = LinearTerm();
    n.outputs = std::move(outputs);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size() - 1);
  }

  int build_level(std::size_t level, const std::map<std::string, LinearTerm>& chosen, Formula context) {
    if (level == outputs_.size()) return leaf(chosen);
    const Formula entry = context;
    std::vector<std::pair<Formula, LinearTerm>> chain;
    for (const auto& b : levels_[level]) {
      Formula g = b.guard;
      LinearTerm w = b.witness;
      for (const auto& [name, term] : chosen) {
        g = substitute(g, name, term);
        w = w.substitute(name, term);
      }
      if (g.is_false() || !check_satisfiable(Formula::conj(context, g))) continue;
      chain.emplace_back(g, w);
      if (g.is_true()) break;
      context = Formula::conj(context, to_nnf(Formula::negate(g)));
    }
    int first = -1;
    int prev = -1;
    Formula path = entry;
    for (const auto& [g, w] : chain) {
      auto next = chosen;
      next[outputs_[level].name] = w;
      if (g.is_true()) {
        int child = build_level(level + 1, next, path);
        if (prev < 0) return child;
        nodes_[prev].else_child = child;
        return first;
      }
      int idx = static_cast<int>(nodes_.size());
      nodes_.push_back(SkolemFunction::Node{g, -1, -1, {}});
      if (prev >= 0) nodes_[prev].else_child = idx;
      if (first < 0) first = idx;
      int child = build_level(level + 1, next, Formula::conj(path, g));
      nodes_[idx].then_child = child;
      prev = idx;
      path = Formula::conj(path, to_nnf(Formula::negate(g)));
    }
    int fallback = leaf({});
    if (prev < 0) return fallback;
    nodes_[prev].else_child = fallback;
    return first;
  }

  const std::vector<Variable>& outputs_;
  const std::vector<std::vector<Branch>>& levels_;
  std::vector<SkolemFunction::Node> nodes_;
};

// Renumbers nodes in preorder from the root.
std::vector<SkolemFunction::Node> reroot(std::vector<SkolemFunction::Node> nodes, int root) {
  if (root == 0) return nodes;
  std::vector<int> order;
  std::vector<int> remap(nodes.size(), -1);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    if (remap[i] >= 0) continue;
    remap[i] = static_cast<int>(order.size());
    order.push_back(i);
    if (!nodes[i].is_leaf()) {
      stack.push_back(nodes[i].else_child);
      stack.push_back(nodes[i].then_child);
    }
  }
  std::vector<SkolemFunction::Node> out;
  for (int i : order) {
    auto n = nodes[i];
    if (!n.is_leaf()) {
      n.then_child = remap[n.then_child];
      n.else_child = remap[n.else_child];
    }
    out.push_back(std::move(n));
  }
  return out;
}

}  // namespace

bool verify_skolem(const SkolemFunction& h, const Formula& body) {
  Formula qf = body.is_quantifier_free() ? body : eliminate_quantifiers(body).formula;
  for (const auto& p : h.paths()) {
    std::vector<Formula> pre = p.taken;
    if (p.fallback)
      for (const auto& g : p.refused) pre.push_back(Formula::negate(g));
    Formula instance = qf;
    for (const auto& [name, term] : p.leaf->outputs) instance = substitute(instance, name, term);
    if (!check_validity(Formula::implies(Formula::conj(pre), instance))) return false;
  }
  return true;
}

std::optional<SkolemFunction> synthesize_skolem(const std::vector<Variable>& inputs,
                                                const std::vector<Variable>& outputs, const Formula& body) {
  Formula psi = eliminate_quantifiers(body).formula;
  for (const auto& v : free_variables(psi)) {
    bool known = std::any_of(inputs.begin(), inputs.end(), [&](const Variable& x) { return x.name == v; }) ||
                 std::any_of(outputs.begin(), outputs.end(), [&](const Variable& y) { return y.name == v; });
    if (!known) throw UnsupportedFragment("free variable '" + v + "' is neither an input nor an output");
  }
  std::vector<std::vector<Branch>> levels(outputs.size());
  Formula current = psi;
  for (std::size_t i = outputs.size(); i-- > 0;) {
    levels[i] = witness_branches(current, outputs[i].name, outputs[i].sort);
    std::vector<Formula> guards;
    for (const auto& b : levels[i]) guards.push_back(b.guard);
    current = Formula::disj(std::move(guards));
  }
  if (!check_validity(current)) return std::nullopt;

  TreeBuilder builder(outputs, levels);
  int root = 0;
  auto nodes = builder.build(root);
  SkolemFunction h(inputs, outputs, reroot(std::move(nodes), root));
  if (!verify_skolem(h, psi)) throw std::logic_error("synthesized Skolem function failed its contract");
  return h;
}

std::optional<SkolemFunction> synthesize_skolem(const Formula& prenex) {
  std::vector<Variable> inputs, outputs;
  Formula f = prenex;
  while (f.kind() == Formula::Kind::Forall) {
    inputs.push_back(Variable{f.bound_var(), f.bound_sort()});
    f = f.body();
  }
  while (f.kind() == Formula::Kind::Exists) {
    outputs.push_back(Variable{f.bound_var(), f.bound_sort()});
    f = f.body();
  }
  for (const auto& [v, s] : free_variable_sorts(f)) {
    bool bound = std::any_of(inputs.begin(), inputs.end(), [&](const Variable& x) { return x.name == v; }) ||
                 std::any_of(outputs.begin(), outputs.end(), [&](const Variable& y) { return y.name == v; });
    if (!bound) inputs.push_back(Variable{v, s});
  }
  return synthesize_skolem(inputs, outputs, f);
}

}  // namespace modsynth
