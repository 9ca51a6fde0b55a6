#include "modsynth/logic.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "modsynth/errors.hpp"

namespace modsynth {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_integer(const Integer& z) {
  std::size_t h = static_cast<std::size_t>(mpz_size(z.get_mpz_t()) ? mpz_getlimbn(z.get_mpz_t(), 0) : 0);
  return mix(h, static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 1));
}

std::size_t hash_rational(const Rational& q) {
  return mix(hash_integer(q.get_num()), hash_integer(q.get_den()));
}

}  // namespace

std::string_view to_string(Sort s) { return s == Sort::Int ? "int" : "real"; }

Sort parse_sort(std::string_view text) {
  if (text == "int" || text == "Int") return Sort::Int;
  if (text == "real" || text == "Real") return Sort::Real;
  throw SyntaxError("unknown sort '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// LinearTerm

LinearTerm LinearTerm::variable(const std::string& name, const Rational& coeff) {
  LinearTerm t;
  t.add(name, coeff);
  return t;
}

Rational LinearTerm::coefficient(const std::string& var) const {
  auto it = coeffs_.find(var);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

LinearTerm LinearTerm::variable_part() const {
  LinearTerm t;
  t.coeffs_ = coeffs_;
  return t;
}

void LinearTerm::add(const std::string& var, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = coeffs_.emplace(var, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) coeffs_.erase(it);
  }
}

LinearTerm& LinearTerm::operator+=(const LinearTerm& o) {
  for (const auto& [v, c] : o.coeffs_) add(v, c);
  constant_ += o.constant_;
  return *this;
}

LinearTerm LinearTerm::operator+(const LinearTerm& o) const {
  LinearTerm r = *this;
  r += o;
  return r;
}

LinearTerm LinearTerm::operator-() const {
  LinearTerm r;
  for (const auto& [v, c] : coeffs_) r.coeffs_.emplace(v, -c);
  r.constant_ = -constant_;
  return r;
}

LinearTerm LinearTerm::operator-(const LinearTerm& o) const { return *this + (-o); }

LinearTerm LinearTerm::operator*(const Rational& k) const {
  LinearTerm r;
  if (k == 0) return r;
  for (const auto& [v, c] : coeffs_) r.coeffs_.emplace(v, c * k);
  r.constant_ = constant_ * k;
  return r;
}

LinearTerm LinearTerm::substitute(const std::string& var, const LinearTerm& by) const {
  auto it = coeffs_.find(var);
  if (it == coeffs_.end()) return *this;
  Rational c = it->second;
  LinearTerm r = *this;
  r.coeffs_.erase(var);
  r += by * c;
  return r;
}

LinearTerm LinearTerm::substitute(const Valuation& bindings) const {
  if (bindings.empty()) return *this;
  LinearTerm r;
  r.constant_ = constant_;
  for (const auto& [v, c] : coeffs_) {
    auto it = bindings.find(v);
    if (it == bindings.end())
      r.add(v, c);
    else
      r.constant_ += c * it->second;
  }
  return r;
}

Rational LinearTerm::evaluate(const Valuation& v) const {
  Rational sum = constant_;
  for (const auto& [name, c] : coeffs_) {
    auto it = v.find(name);
    if (it == v.end()) throw MissingVariable("no value for variable '" + name + "'");
    sum += c * it->second;
  }
  return sum;
}

std::string LinearTerm::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [v, c] : coeffs_) {
    Rational mag = abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    if (mag != 1) out << modsynth::to_string(mag) << "*";
    out << v;
    first = false;
  }
  if (first) return modsynth::to_string(constant_);
  if (constant_ != 0) out << (constant_ < 0 ? " - " : " + ") << modsynth::to_string(abs(constant_));
  return out.str();
}

std::size_t LinearTerm::hash() const {
  std::size_t h = hash_rational(constant_);
  for (const auto& [v, c] : coeffs_) h = mix(mix(h, std::hash<std::string>{}(v)), hash_rational(c));
  return h;
}

bool operator<(const LinearTerm& a, const LinearTerm& b) {
  if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
  return a.constant_ < b.constant_;
}

// ---------------------------------------------------------------------------
// Atom

bool Atom::holds(const Valuation& v) const {
  Rational val = term_.evaluate(v);
  switch (rel_) {
    case Relation::Le: return val <= 0;
    case Relation::Lt: return val < 0;
    case Relation::Eq: return val == 0;
    case Relation::Divides:
      return is_integer(val) && mod(val.get_num(), modulus_) == 0;
  }
  return false;
}

std::string Atom::to_string() const {
  if (rel_ == Relation::Divides)
    return "divides(" + modulus_.get_str() + ", " + term_.to_string() + ")";
  LinearTerm vars = term_.variable_part();
  Rational rhs = -term_.constant();
  const char* op = rel_ == Relation::Le ? "<=" : rel_ == Relation::Lt ? "<" : "=";
  if (!vars.is_constant() && vars.coefficients().begin()->second < 0 && rel_ != Relation::Eq) {
    vars = -vars;
    rhs = -rhs;
    op = rel_ == Relation::Le ? ">=" : ">";
  }
  return vars.to_string() + " " + op + " " + modsynth::to_string(rhs);
}

std::size_t Atom::hash() const {
  std::size_t h = mix(term_.hash(), static_cast<std::size_t>(rel_));
  h = mix(h, static_cast<std::size_t>(sort_));
  return mix(h, hash_integer(modulus_));
}

// ---------------------------------------------------------------------------
// Formula nodes

struct Formula::Node {
  Kind kind = Kind::True;
  std::optional<Atom> atom;
  std::vector<Formula> children;
  std::string var;
  Sort sort = Sort::Int;
  std::size_t hash = 0;
  std::size_t size = 1;
  bool quantifier_free = true;
};

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
  static const Formula t = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::True;
    n->hash = 0x51ed27;
    return Formula(std::shared_ptr<const Node>(std::move(n)));
  }();
  return t;
}

Formula Formula::bottom() {
  static const Formula f = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::False;
    n->hash = 0xfa15e;
    return Formula(std::shared_ptr<const Node>(std::move(n)));
  }();
  return f;
}

Formula Formula::atom(Atom a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->hash = mix(0xa70, a.hash());
  n->atom = std::move(a);
  return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::negate(const Formula& f) {
  switch (f.kind()) {
    case Kind::True: return bottom();
    case Kind::False: return top();
    case Kind::Not: return f.children()[0];
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->hash = mix(0x707, f.hash());
  n->size = f.size() + 1;
  n->quantifier_free = f.is_quantifier_free();
  n->children.push_back(f);
  return Formula(std::shared_ptr<const Node>(std::move(n)));
}

namespace {

struct Bound {
  Rational value;
  bool strict = false;
};

// Bound atoms grouped by their variable part V (leading coefficient > 0).
struct BoundGroup {
  std::size_t position = 0;
  LinearTerm vars;
  Sort sort = Sort::Int;
  std::optional<Bound> upper;  // V <= u  (or <)
  std::optional<Bound> lower;  // V >= l  (or >)
  std::vector<Rational> equalities;
};

bool is_bound_atom(const Formula& f) {
  if (f.kind() != Formula::Kind::Atom) return false;
  const Atom& a = f.as_atom();
  return a.relation() != Relation::Divides && !a.term().is_constant();
}

Formula make_upper(const BoundGroup& g, const Bound& b) {
  return Formula::atom(Atom(g.vars - LinearTerm(b.value), b.strict ? Relation::Lt : Relation::Le, g.sort));
}

Formula make_lower(const BoundGroup& g, const Bound& b) {
  return Formula::atom(Atom(-g.vars + LinearTerm(b.value), b.strict ? Relation::Lt : Relation::Le, g.sort));
}

Formula make_equality(const BoundGroup& g, const Rational& e) {
  return Formula::atom(Atom(g.vars - LinearTerm(e), Relation::Eq, g.sort));
}

// Tighter (conjunction) or looser (disjunction) of two upper bounds.
Bound pick_upper(const Bound& a, const Bound& b, bool conjunction) {
  if (a.value != b.value) return (a.value < b.value) == conjunction ? a : b;
  return Bound{a.value, conjunction ? (a.strict || b.strict) : (a.strict && b.strict)};
}

Bound pick_lower(const Bound& a, const Bound& b, bool conjunction) {
  if (a.value != b.value) return (a.value > b.value) == conjunction ? a : b;
  return Bound{a.value, conjunction ? (a.strict || b.strict) : (a.strict && b.strict)};
}

bool satisfies_upper(const Rational& e, const std::optional<Bound>& u) {
  return !u || (u->strict ? e < u->value : e <= u->value);
}

bool satisfies_lower(const Rational& e, const std::optional<Bound>& l) {
  return !l || (l->strict ? e > l->value : e >= l->value);
}

// Merges bound atoms over the same variable part. Returns false when the
// connective collapses (conjunction to false, disjunction to true).
bool prune_bounds(std::vector<Formula>& items, bool conjunction) {
  std::size_t bound_count = 0;
  for (const auto& f : items) bound_count += is_bound_atom(f);
  if (bound_count < 2) return true;

  std::map<std::pair<LinearTerm, Sort>, std::size_t> index;
  std::vector<BoundGroup> groups;
  std::vector<Formula> others;
  std::vector<std::pair<bool, std::size_t>> order;  // (is_group, idx)

  for (const auto& f : items) {
    if (!is_bound_atom(f)) {
      order.emplace_back(false, others.size());
      others.push_back(f);
      continue;
    }
    const Atom& a = f.as_atom();
    LinearTerm w = a.term().variable_part();
    Rational c = a.term().constant();
    bool positive = w.coefficients().begin()->second > 0;
    LinearTerm v = positive ? w : -w;
    auto key = std::make_pair(v, a.sort());
    auto it = index.find(key);
    std::size_t gi;
    if (it == index.end()) {
      gi = groups.size();
      index.emplace(key, gi);
      BoundGroup g;
      g.vars = v;
      g.sort = a.sort();
      groups.push_back(std::move(g));
      order.emplace_back(true, gi);
    } else {
      gi = it->second;
    }
    BoundGroup& g = groups[gi];
    if (a.relation() == Relation::Eq) {
      Rational e = positive ? Rational(-c) : c;
      if (std::find(g.equalities.begin(), g.equalities.end(), e) == g.equalities.end())
        g.equalities.push_back(e);
      continue;
    }
    bool strict = a.relation() == Relation::Lt;
    if (positive) {
      Bound b{Rational(-c), strict};
      g.upper = g.upper ? pick_upper(*g.upper, b, conjunction) : b;
    } else {
      Bound b{c, strict};
      g.lower = g.lower ? pick_lower(*g.lower, b, conjunction) : b;
    }
  }

  std::vector<Formula> out;
  out.reserve(items.size());
  for (auto [is_group, idx] : order) {
    if (!is_group) {
      out.push_back(others[idx]);
      continue;
    }
    BoundGroup& g = groups[idx];
    if (conjunction) {
      if (g.equalities.size() > 1) return false;
      if (g.equalities.size() == 1) {
        const Rational& e = g.equalities.front();
        if (!satisfies_upper(e, g.upper) || !satisfies_lower(e, g.lower)) return false;
        out.push_back(make_equality(g, e));
        continue;
      }
      if (g.upper && g.lower) {
        if (g.lower->value > g.upper->value) return false;
        if (g.lower->value == g.upper->value) {
          if (g.lower->strict || g.upper->strict) return false;
          out.push_back(make_equality(g, g.lower->value));
          continue;
        }
      }
      if (g.lower) out.push_back(make_lower(g, *g.lower));
      if (g.upper) out.push_back(make_upper(g, *g.upper));
    } else {
      if (g.upper && g.lower) {
        const Rational& l = g.lower->value;
        const Rational& u = g.upper->value;
        bool covers = g.sort == Sort::Int ? l <= u + 1
                                          : (l < u || (l == u && !(g.lower->strict && g.upper->strict)));
        if (covers) return false;
      }
      // A strict bound whose endpoint is one of the equalities becomes weak.
      for (auto it = g.equalities.begin(); it != g.equalities.end();) {
        if (g.upper && g.upper->strict && *it == g.upper->value) {
          g.upper->strict = false;
          it = g.equalities.erase(it);
        } else if (g.lower && g.lower->strict && *it == g.lower->value) {
          g.lower->strict = false;
          it = g.equalities.erase(it);
        } else if ((g.upper && satisfies_upper(*it, g.upper)) || (g.lower && satisfies_lower(*it, g.lower))) {
          it = g.equalities.erase(it);
        } else {
          ++it;
        }
      }
      if (g.upper && g.lower) {
        const Rational& l = g.lower->value;
        const Rational& u = g.upper->value;
        if (l < u || (l == u && !(g.lower->strict && g.upper->strict))) return false;
      }
      if (g.lower) out.push_back(make_lower(g, *g.lower));
      if (g.upper) out.push_back(make_upper(g, *g.upper));
      for (const auto& e : g.equalities) out.push_back(make_equality(g, e));
    }
  }
  items = std::move(out);
  return true;
}

}  // namespace

struct FormulaFactory {
  static Formula nary(Formula::Kind kind, std::vector<Formula> children) {
    auto n = std::make_shared<Formula::Node>();
    n->kind = kind;
    std::size_t h = kind == Formula::Kind::And ? 0xa4d : 0x0f;
    std::size_t size = 1;
    bool qf = true;
    for (const auto& c : children) {
      h = mix(h, c.hash());
      size += c.size();
      qf = qf && c.is_quantifier_free();
    }
    n->hash = h;
    n->size = size;
    n->quantifier_free = qf;
    n->children = std::move(children);
    return Formula(std::shared_ptr<const Formula::Node>(std::move(n)));
  }
  static Formula quant(Formula::Kind kind, const std::string& var, Sort sort, const Formula& body) {
    auto n = std::make_shared<Formula::Node>();
    n->kind = kind;
    n->var = var;
    n->sort = sort;
    n->hash = mix(mix(kind == Formula::Kind::Exists ? 0xe1 : 0xa11, std::hash<std::string>{}(var)), body.hash());
    n->size = body.size() + 1;
    n->quantifier_free = false;
    n->children.push_back(body);
    return Formula(std::shared_ptr<const Formula::Node>(std::move(n)));
  }
};

namespace {

Formula make_nary(Formula::Kind kind, std::vector<Formula> input) {
  const bool conjunction = kind == Formula::Kind::And;
  const Formula::Kind absorbing = conjunction ? Formula::Kind::False : Formula::Kind::True;
  const Formula::Kind neutral = conjunction ? Formula::Kind::True : Formula::Kind::False;

  std::vector<Formula> flat;
  flat.reserve(input.size());
  std::unordered_map<std::size_t, std::vector<std::size_t>> seen;
  auto push = [&](const Formula& f) -> bool {
    if (f.kind() == absorbing) return false;
    if (f.kind() == neutral) return true;
    auto& bucket = seen[f.hash()];
    for (auto idx : bucket)
      if (flat[idx] == f) return true;
    bucket.push_back(flat.size());
    flat.push_back(f);
    return true;
  };
  for (const auto& f : input) {
    if (f.kind() == kind) {
      for (const auto& c : f.children())
        if (!push(c)) return Formula::constant(!conjunction);
    } else if (!push(f)) {
      return Formula::constant(!conjunction);
    }
  }
  // f together with !f
  for (const auto& f : flat) {
    if (f.kind() != Formula::Kind::Not) continue;
    const Formula& inner = f.children()[0];
    auto it = seen.find(inner.hash());
    if (it == seen.end()) continue;
    for (auto idx : it->second)
      if (flat[idx] == inner) return Formula::constant(!conjunction);
  }
  if (!prune_bounds(flat, conjunction)) return Formula::constant(!conjunction);
  if (flat.empty()) return Formula::constant(conjunction);
  if (flat.size() == 1) return flat.front();
  return FormulaFactory::nary(kind, std::move(flat));
}

}  // namespace

Formula Formula::conj(std::vector<Formula> children) { return make_nary(Kind::And, std::move(children)); }
Formula Formula::disj(std::vector<Formula> children) { return make_nary(Kind::Or, std::move(children)); }

Formula Formula::exists(const std::string& var, Sort sort, const Formula& body) {
  if (body.is_true() || body.is_false()) return body;
  return FormulaFactory::quant(Kind::Exists, var, sort, body);
}

Formula Formula::forall(const std::string& var, Sort sort, const Formula& body) {
  if (body.is_true() || body.is_false()) return body;
  return FormulaFactory::quant(Kind::Forall, var, sort, body);
}

Formula::Kind Formula::kind() const { return node_->kind; }
const Atom& Formula::as_atom() const { return *node_->atom; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
const std::string& Formula::bound_var() const { return node_->var; }
Sort Formula::bound_sort() const { return node_->sort; }
const Formula& Formula::body() const { return node_->children.front(); }
bool Formula::is_quantifier_free() const { return node_->quantifier_free; }
std::size_t Formula::hash() const { return node_->hash; }
std::size_t Formula::size() const { return node_->size; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Atom: return a.as_atom() == b.as_atom();
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (a.bound_var() != b.bound_var() || a.bound_sort() != b.bound_sort()) return false;
      [[fallthrough]];
    default: return a.children() == b.children();
  }
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

Integer denominator_lcm(const LinearTerm& t) {
  Integer m = t.constant().get_den();
  for (const auto& [v, c] : t.coefficients()) m = lcm(m, c.get_den());
  return m;
}

Integer coefficient_gcd(const LinearTerm& t) {
  Integer g = 0;
  for (const auto& [v, c] : t.coefficients()) g = gcd(g, c.get_num());
  return g;
}

Formula fold(const Rational& value, Relation rel) {
  switch (rel) {
    case Relation::Le: return Formula::constant(value <= 0);
    case Relation::Lt: return Formula::constant(value < 0);
    case Relation::Eq: return Formula::constant(value == 0);
    case Relation::Divides: break;
  }
  return Formula::top();
}

LinearTerm divide_coefficients(const LinearTerm& t, const Integer& g, const Rational& new_constant) {
  LinearTerm r(new_constant);
  for (const auto& [v, c] : t.coefficients()) r += LinearTerm::variable(v, c / Rational(g));
  return r;
}

Formula normalize_int(LinearTerm t, Relation rel, const Integer& modulus) {
  Integer m = denominator_lcm(t);
  if (m != 1) t = t * Rational(m);
  if (rel == Relation::Lt) {
    t += LinearTerm(1);
    rel = Relation::Le;
  }
  if (rel == Relation::Divides) {
    Integer k = abs(modulus) * m;
    if (k == 0) throw SortMismatch("divisibility by zero");
    LinearTerm r(Rational(mod(t.constant().get_num(), k)));
    for (const auto& [v, c] : t.coefficients()) {
      Integer red = mod(c.get_num(), k);
      if (red != 0) r += LinearTerm::variable(v, Rational(red));
    }
    if (r.is_constant()) return Formula::constant(r.constant() == 0);
    Integer g = gcd(coefficient_gcd(r), k);
    if (mod(r.constant().get_num(), g) != 0) return Formula::bottom();
    k /= g;
    if (k == 1) return Formula::top();
    LinearTerm reduced = divide_coefficients(r, g, r.constant() / Rational(g));
    return Formula::atom(Atom(std::move(reduced), Relation::Divides, Sort::Int, k));
  }
  if (t.is_constant()) return fold(t.constant(), rel);
  Integer g = coefficient_gcd(t);
  if (rel == Relation::Le) {
    Rational c(ceil(t.constant() / Rational(g)));
    return Formula::atom(Atom(divide_coefficients(t, g, c), Relation::Le, Sort::Int));
  }
  // Eq
  if (mod(t.constant().get_num(), g) != 0) return Formula::bottom();
  LinearTerm r = divide_coefficients(t, g, t.constant() / Rational(g));
  if (r.coefficients().begin()->second < 0) r = -r;
  return Formula::atom(Atom(std::move(r), Relation::Eq, Sort::Int));
}

Formula normalize_real(LinearTerm t, Relation rel) {
  if (rel == Relation::Divides) throw SortMismatch("divisibility atom over a real-sorted term");
  if (t.is_constant()) return fold(t.constant(), rel);
  Rational lead = t.coefficients().begin()->second;
  Rational scale = rel == Relation::Eq ? Rational(1 / lead) : Rational(1 / abs(lead));
  if (scale != 1) t = t * scale;
  return Formula::atom(Atom(std::move(t), rel, Sort::Real));
}

Formula normalize(const LinearTerm& t, Relation rel, Sort sort, const Integer& modulus = 0) {
  return sort == Sort::Int ? normalize_int(t, rel, modulus) : normalize_real(t, rel);
}

}  // namespace

Formula normalize_atom(const RawAtom& raw) {
  switch (raw.rel) {
    case RawRelation::Le: return normalize(raw.term, Relation::Le, raw.sort);
    case RawRelation::Lt: return normalize(raw.term, Relation::Lt, raw.sort);
    case RawRelation::Eq: return normalize(raw.term, Relation::Eq, raw.sort);
    case RawRelation::Ge: return normalize(-raw.term, Relation::Le, raw.sort);
    case RawRelation::Gt: return normalize(-raw.term, Relation::Lt, raw.sort);
    case RawRelation::Ne:
      return Formula::disj(normalize(raw.term, Relation::Lt, raw.sort), normalize(-raw.term, Relation::Lt, raw.sort));
    case RawRelation::Divides:
      if (raw.sort != Sort::Int) throw SortMismatch("divisibility atom over a real-sorted term");
      return normalize(raw.term, Relation::Divides, raw.sort, raw.modulus);
  }
  return Formula::top();
}

Formula complement(const Atom& a) {
  const LinearTerm& t = a.term();
  switch (a.relation()) {
    case Relation::Le: return normalize(-t, Relation::Lt, a.sort());
    case Relation::Lt: return normalize(-t, Relation::Le, a.sort());
    case Relation::Eq:
      return Formula::disj(normalize(t, Relation::Lt, a.sort()), normalize(-t, Relation::Lt, a.sort()));
    case Relation::Divides: return Formula::negate(Formula::atom(a));
  }
  return Formula::top();
}

// ---------------------------------------------------------------------------
// Evaluation and substitution

bool eval_formula(const Formula& f, const Valuation& v) {
  switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: return f.as_atom().holds(v);
    case Formula::Kind::Not: return !eval_formula(f.children()[0], v);
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!eval_formula(c, v)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (eval_formula(c, v)) return true;
      return false;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      throw UnsupportedFragment("cannot evaluate a quantified formula directly: " + to_string(f));
  }
  return false;
}

namespace {

Formula rebuild_atom(const Atom& a, LinearTerm t) {
  if (t == a.term()) return Formula::atom(a);
  return normalize(t, a.relation(), a.sort(), a.modulus());
}

template <typename AtomFn>
Formula map_atoms(const Formula& f, const AtomFn& fn, const std::function<bool(const std::string&)>& binds) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Atom: return fn(f.as_atom());
    case Formula::Kind::Not: return Formula::negate(map_atoms(f.children()[0], fn, binds));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(map_atoms(c, fn, binds));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      if (binds(f.bound_var())) return f;
      Formula body = map_atoms(f.body(), fn, binds);
      return f.kind() == Formula::Kind::Exists ? Formula::exists(f.bound_var(), f.bound_sort(), body)
                                               : Formula::forall(f.bound_var(), f.bound_sort(), body);
    }
  }
  return f;
}

}  // namespace

Formula substitute(const Formula& f, const Valuation& bindings) {
  if (bindings.empty()) return f;
  return map_atoms(
      f,
      [&](const Atom& a) {
        bool touched = false;
        for (const auto& [v, c] : a.term().coefficients())
          if (bindings.count(v)) touched = true;
        if (!touched) return Formula::atom(a);
        return rebuild_atom(a, a.term().substitute(bindings));
      },
      [&](const std::string& v) { return bindings.count(v) != 0; });
}

Formula substitute(const Formula& f, const std::string& var, const LinearTerm& by) {
  return map_atoms(
      f,
      [&](const Atom& a) {
        if (!a.term().mentions(var)) return Formula::atom(a);
        return rebuild_atom(a, a.term().substitute(var, by));
      },
      [&](const std::string& v) { return v == var; });
}

// ---------------------------------------------------------------------------
// Normal forms

namespace {

Formula nnf(const Formula& f, bool positive) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return positive ? f : Formula::negate(f);
    case Formula::Kind::Atom: return positive ? f : complement(f.as_atom());
    case Formula::Kind::Not: return nnf(f.children()[0], !positive);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(nnf(c, positive));
      bool conj = (f.kind() == Formula::Kind::And) == positive;
      return conj ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      Formula body = nnf(f.body(), positive);
      bool ex = (f.kind() == Formula::Kind::Exists) == positive;
      return ex ? Formula::exists(f.bound_var(), f.bound_sort(), body)
                : Formula::forall(f.bound_var(), f.bound_sort(), body);
    }
  }
  return f;
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, true); }

namespace {

std::vector<Cell> dnf(const Formula& f, std::size_t budget) {
  switch (f.kind()) {
    case Formula::Kind::True: return {Cell{}};
    case Formula::Kind::False: return {};
    case Formula::Kind::Atom:
    case Formula::Kind::Not: return {Cell{f}};
    case Formula::Kind::Or: {
      std::vector<Cell> out;
      for (const auto& c : f.children()) {
        auto part = dnf(c, budget);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        if (out.size() > budget)
          throw CellBudgetExceeded("DNF expansion exceeds " + std::to_string(budget) + " cells");
      }
      return out;
    }
    case Formula::Kind::And: {
      std::vector<Cell> acc{Cell{}};
      for (const auto& c : f.children()) {
        auto part = dnf(c, budget);
        std::vector<Cell> next;
        for (const auto& left : acc) {
          for (const auto& right : part) {
            Cell merged = left;
            merged.insert(merged.end(), right.begin(), right.end());
            Formula folded = Formula::conj(merged);
            if (folded.is_false()) continue;
            if (folded.kind() == Formula::Kind::And)
              merged = folded.children();
            else if (folded.is_true())
              merged.clear();
            else
              merged = Cell{folded};
            next.push_back(std::move(merged));
            if (next.size() > budget)
              throw CellBudgetExceeded("DNF expansion exceeds " + std::to_string(budget) + " cells");
          }
        }
        acc = std::move(next);
        if (acc.empty()) break;
      }
      return acc;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      throw UnsupportedFragment("DNF of a quantified formula");
  }
  return {};
}

}  // namespace

std::vector<Cell> to_dnf(const Formula& f, std::size_t budget) { return dnf(to_nnf(f), budget); }

// ---------------------------------------------------------------------------
// Variables

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound, SortContext& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      for (const auto& [v, c] : f.as_atom().term().coefficients())
        if (!bound.count(v)) out.emplace(v, f.as_atom().sort());
      break;
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (const auto& c : f.children()) collect_free(c, bound, out);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      bool fresh = bound.insert(f.bound_var()).second;
      collect_free(f.body(), bound, out);
      if (fresh) bound.erase(f.bound_var());
      break;
    }
    default: break;
  }
}

}  // namespace

SortContext free_variable_sorts(const Formula& f) {
  std::set<std::string> bound;
  SortContext out;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> names;
  for (const auto& [v, s] : free_variable_sorts(f)) names.insert(v);
  return names;
}

namespace {

Formula rename_binders(const Formula& f, std::set<std::string>& used) {
  switch (f.kind()) {
    case Formula::Kind::Not: return Formula::negate(rename_binders(f.children()[0], used));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(rename_binders(c, used));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::string name = f.bound_var();
      Formula body = f.body();
      if (used.count(name)) {
        int k = 1;
        std::string fresh;
        do fresh = name + "_" + std::to_string(k++);
        while (used.count(fresh));
        body = substitute(body, name, LinearTerm::variable(fresh));
        name = fresh;
      }
      used.insert(name);
      body = rename_binders(body, used);
      return f.kind() == Formula::Kind::Exists ? Formula::exists(name, f.bound_sort(), body)
                                               : Formula::forall(name, f.bound_sort(), body);
    }
    default: return f;
  }
}

}  // namespace

Formula alpha_rename(const Formula& f) {
  std::set<std::string> used = free_variables(f);
  return rename_binders(f, used);
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

int precedence(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return 0;
    case Formula::Kind::Or: return 1;
    case Formula::Kind::And: return 2;
    default: return 3;
  }
}

void render(const Formula& f, std::ostringstream& out) {
  auto child = [&](const Formula& c, int parent_prec) {
    bool paren = precedence(c) <= parent_prec && precedence(c) < 3;
    if (paren) out << "(";
    render(c, out);
    if (paren) out << ")";
  };
  switch (f.kind()) {
    case Formula::Kind::True: out << "true"; break;
    case Formula::Kind::False: out << "false"; break;
    case Formula::Kind::Atom: out << f.as_atom().to_string(); break;
    case Formula::Kind::Not:
      out << "!(";
      render(f.children()[0], out);
      out << ")";
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const char* sep = f.kind() == Formula::Kind::And ? " && " : " || ";
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out << sep;
        child(c, precedence(f));
        first = false;
      }
      break;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      out << (f.kind() == Formula::Kind::Exists ? "exists " : "forall ") << f.bound_var() << ":"
          << to_string(f.bound_sort()) << ". ";
      render(f.body(), out);
      break;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream out;
  render(f, out);
  return out.str();
}

}  // namespace modsynth
