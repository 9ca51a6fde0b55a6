#include "modsynth/provider.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "modsynth/errors.hpp"

namespace modsynth {

std::string_view to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::Static: return "static";
    case ProviderKind::Dynamic: return "dynamic";
    case ProviderKind::Adaptive: return "adaptive";
  }
  return "static";
}

ProviderKind parse_provider_kind(std::string_view text) {
  if (text == "static") return ProviderKind::Static;
  if (text == "dynamic") return ProviderKind::Dynamic;
  if (text == "adaptive") return ProviderKind::Adaptive;
  throw SchemaError("unknown provider kind '" + std::string(text) + "'");
}

const AdaptiveConstraint* AdaptiveDescription::find(std::size_t letter, Choice c) const {
  for (const auto& k : constraints)
    if (k.letter == letter && k.choice == c) return &k;
  return nullptr;
}

std::vector<Variable> AdaptiveDescription::z_variables() const {
  std::vector<Variable> out;
  for (const auto& v : z) out.push_back(v.var);
  return out;
}

namespace {

std::string pair_label(const ValidReactionTable& table, std::size_t letter, Choice c) {
  return "(" + table.entries.at(letter).letter + ", " + choice_bits(c, table.literal_count()) + ")";
}

std::string fresh_name(const Formula& f, const std::string& base) {
  auto used = free_variables(f);
  std::string name = base;
  for (int k = 1; used.count(name); ++k) name = base + "_" + std::to_string(k);
  return name;
}

Formula le(const LinearTerm& lhs, const LinearTerm& rhs, Sort sort) {
  return normalize_atom(RawAtom{lhs - rhs, RawRelation::Le, sort});
}

}  // namespace

Formula provider_body(const ValidReactionTable& table, std::size_t letter, Choice c) {
  const auto& entry = table.entries.at(letter);
  if (!entry.contains(c))
    throw ChoiceNotInReaction("choice " + choice_bits(c, table.literal_count()) + " is not in the reaction of " +
                              entry.letter);
  return Formula::disj(characteristic_choice(c, table.literals), to_nnf(Formula::negate(entry.region)));
}

Formula build_basic_formula(const ValidReactionTable& table, std::size_t letter, Choice c) {
  Formula f = provider_body(table, letter, c);
  for (auto it = table.sys.rbegin(); it != table.sys.rend(); ++it) f = Formula::exists(it->name, it->sort, f);
  for (auto it = table.env.rbegin(); it != table.env.rend(); ++it) f = Formula::forall(it->name, it->sort, f);
  return f;
}

Formula build_closest_constraint(const Formula& psi, const std::string& y, const std::string& z, Sort sort,
                                 const std::optional<Rational>& eps) {
  if (sort == Sort::Real && (!eps || *eps <= 0))
    throw std::invalid_argument("closest constraint over real outputs needs a positive tolerance");
  std::string w = fresh_name(Formula::conj(psi, Formula::atom(Atom(LinearTerm::variable(z), Relation::Le, sort))),
                             "w");
  LinearTerm a = LinearTerm::variable(y) - LinearTerm::variable(z);
  LinearTerm b = LinearTerm::variable(w) - LinearTerm::variable(z);
  LinearTerm slack(eps ? *eps : Rational(0));
  // |a| <= |b| + eps  <=>  |a| <= b + eps  ||  |a| <= -b + eps
  Formula near_pos = Formula::conj(le(a, b + slack, sort), le(-a, b + slack, sort));
  Formula near_neg = Formula::conj(le(a, -b + slack, sort), le(-a, -b + slack, sort));
  Formula body = Formula::implies(substitute(psi, y, LinearTerm::variable(w)), Formula::disj(near_pos, near_neg));
  return alpha_rename(Formula::forall(w, sort, body));
}

Formula build_extremal_constraint(const Formula& psi, const std::string& y, Sort sort, bool greatest) {
  std::string w = fresh_name(psi, "w");
  LinearTerm wt = LinearTerm::variable(w), yt = LinearTerm::variable(y);
  Formula bound = greatest ? le(wt, yt, sort) : le(yt, wt, sort);
  return alpha_rename(Formula::forall(w, sort, Formula::implies(substitute(psi, y, wt), bound)));
}

Formula shaped_constraint(const ValidReactionTable& table, std::size_t letter, Choice c, AdaptiveShape shape,
                          const std::string& output, const std::string& target, const std::optional<Rational>& eps) {
  provider_body(table, letter, c);
  auto it = std::find_if(table.sys.begin(), table.sys.end(), [&](const Variable& v) { return v.name == output; });
  if (it == table.sys.end()) throw SchemaError("adaptive shape names unknown output '" + output + "'");
  Formula cube = characteristic_choice(c, table.literals);
  Formula shaped;
  switch (shape) {
    case AdaptiveShape::Greatest: shaped = build_extremal_constraint(cube, output, it->sort, true); break;
    case AdaptiveShape::Least: shaped = build_extremal_constraint(cube, output, it->sort, false); break;
    case AdaptiveShape::Closest: shaped = build_closest_constraint(cube, output, target, it->sort, eps); break;
  }
  return Formula::disj(shaped, to_nnf(Formula::negate(table.entries.at(letter).region)));
}

SkolemFunction synthesize_adaptive(const std::vector<Variable>& inputs, const std::vector<Variable>& outputs,
                                   const Formula& psi, const Formula& psi_plus, const std::string& label) {
  auto h = synthesize_skolem(inputs, outputs, Formula::conj(psi, psi_plus));
  if (!h) throw AdaptiveInvalid("adaptive provider formula for " + label + " is not valid");
  return std::move(*h);
}

SkolemFunction synthesize_pair(const ValidReactionTable& table, std::size_t letter, Choice c,
                               const AdaptiveDescription* gamma) {
  Formula psi = provider_body(table, letter, c);
  const AdaptiveConstraint* k = gamma ? gamma->find(letter, c) : nullptr;
  if (k) {
    std::vector<Variable> inputs = table.env;
    for (const auto& z : gamma->z) inputs.push_back(z.var);
    return synthesize_adaptive(inputs, table.sys, psi, k->constraint, pair_label(table, letter, c));
  }
  auto h = synthesize_skolem(table.env, table.sys, psi);
  if (!h) throw std::logic_error("basic provider formula for " + pair_label(table, letter, c) + " is not valid");
  return std::move(*h);
}

StaticProvider::StaticProvider(ValidReactionTable table, std::optional<AdaptiveDescription> gamma,
                               SynthesisMode mode, bool)
    : table_(std::move(table)), gamma_(std::move(gamma)), mode_(mode) {}

StaticProvider::StaticProvider(ValidReactionTable table, std::optional<AdaptiveDescription> gamma,
                               SynthesisMode mode, const std::vector<std::pair<std::size_t, Choice>>& pairs)
    : StaticProvider(std::move(table), std::move(gamma), mode, true) {
  if (mode_ != SynthesisMode::Eager) return;
  std::vector<std::pair<std::size_t, Choice>> todo = pairs;
  if (todo.empty())
    for (std::size_t k = 0; k < table_.entries.size(); ++k)
      for (Choice c : table_.entries[k].reaction) todo.emplace_back(k, c);
  for (const auto& [k, c] : todo) function(k, c);
}

StaticProvider::StaticProvider(StaticProvider&& other) noexcept
    : table_(std::move(other.table_)),
      gamma_(std::move(other.gamma_)),
      mode_(other.mode_),
      sealed_(other.sealed_),
      memo_(std::move(other.memo_)) {}

StaticProvider StaticProvider::from_functions(ValidReactionTable table, std::optional<AdaptiveDescription> gamma,
                                              std::vector<Entry> entries) {
  StaticProvider p(std::move(table), std::move(gamma), SynthesisMode::Eager, true);
  for (auto& e : entries) p.memo_[{e.letter, e.choice}] = std::move(e.function);
  p.sealed_ = true;
  return p;
}

const SkolemFunction& StaticProvider::function(std::size_t letter, Choice c) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = memo_.find({letter, c});
  if (it != memo_.end()) return *it->second;
  if (sealed_)
    throw ChoiceNotInReaction("no function for " + pair_label(table_, letter, c) + " in the provider artifact");
  auto h = std::make_shared<const SkolemFunction>(synthesize_pair(table_, letter, c, gamma_ ? &*gamma_ : nullptr));
  return *memo_.emplace(std::make_pair(letter, c), std::move(h)).first->second;
}

Valuation StaticProvider::provide(const Valuation& v_x, const Valuation& v_z, std::size_t letter, Choice c) const {
  const SkolemFunction& h = function(letter, c);
  if (v_z.empty()) return h.evaluate(v_x);
  Valuation in = v_x;
  in.insert(v_z.begin(), v_z.end());
  return h.evaluate(in);
}

std::vector<StaticProvider::Entry> StaticProvider::entries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<Entry> out;
  for (const auto& [key, fn] : memo_) out.push_back({key.first, key.second, fn});
  std::size_t n = table_.literal_count();
  std::sort(out.begin(), out.end(), [n](const Entry& a, const Entry& b) {
    return std::make_pair(a.letter, choice_index(a.choice, n)) < std::make_pair(b.letter, choice_index(b.choice, n));
  });
  return out;
}

DynamicProvider::DynamicProvider(ValidReactionTable table, std::optional<AdaptiveDescription> gamma,
                                 DynamicOptions options)
    : table_(std::move(table)), gamma_(std::move(gamma)), options_(options), rng_(options.seed.value_or(0)) {}

const Formula& DynamicProvider::constraint_for(std::size_t letter, Choice c) {
  auto it = cache_.find({letter, c});
  if (it != cache_.end()) return it->second;
  Formula f = characteristic_choice(c, table_.literals);
  if (const AdaptiveConstraint* k = gamma_ ? gamma_->find(letter, c) : nullptr)
    f = Formula::conj(f, eliminate_quantifiers(k->constraint).formula);
  return cache_.emplace(std::make_pair(letter, c), f).first->second;
}

Valuation DynamicProvider::provide(const Valuation& v_x, const Valuation& v_z, std::size_t letter, Choice c) {
  Valuation in = v_x;
  in.insert(v_z.begin(), v_z.end());
  Formula f = substitute(constraint_for(letter, c), in);
  auto model = find_model(f, table_.sys);
  if (!model)
    throw InfeasibleChoice("choice " + choice_bits(c, table_.literal_count()) + " has no model at this input");
  if (!options_.seed) return *model;
  std::bernoulli_distribution perturb(options_.perturb_probability);
  std::uniform_int_distribution<int> offset(1, 2 * options_.perturb_radius);
  for (const auto& y : table_.sys) {
    if (!perturb(rng_)) continue;
    int d = offset(rng_);
    d = d <= options_.perturb_radius ? -d : d - options_.perturb_radius;
    Valuation candidate = *model;
    candidate[y.name] += Rational(d);
    if (eval_formula(f, candidate)) model = std::move(candidate);
  }
  return *model;
}

namespace {

Integer denominator_lcm(const LinearTerm& t) {
  Integer d = t.constant().get_den();
  for (const auto& [v, c] : t.coefficients()) d = lcm(d, Integer(c.get_den()));
  return d;
}

std::string c_sum(const LinearTerm& t) {
  std::string out;
  for (const auto& [v, c] : t.coefficients()) {
    Integer k = c.get_num();
    bool neg = k < 0;
    if (neg) k = -k;
    std::string mag = k == 1 ? v : k.get_str() + " * " + v;
    out += out.empty() ? (neg ? "-" + mag : mag) : (neg ? " - " : " + ") + mag;
  }
  Integer k = t.constant().get_num();
  if (out.empty()) return k.get_str();
  if (k > 0) out += " + " + k.get_str();
  if (k < 0) out += " - " + Integer(-k).get_str();
  return out;
}

std::string c_term(const LinearTerm& t) {
  Integer d = denominator_lcm(t);
  if (d == 1) return c_sum(t);
  return "(" + c_sum(t * Rational(d)) + ") / " + d.get_str();
}

std::string c_atom(const Atom& a) {
  LinearTerm vars = a.term().variable_part();
  Rational k = -a.term().constant();
  if (a.relation() == Relation::Divides)
    return "(" + c_sum(a.term()) + ") % " + a.modulus().get_str() + " == 0";
  bool all_negative = std::all_of(vars.coefficients().begin(), vars.coefficients().end(),
                                  [](const auto& kv) { return kv.second < 0; });
  const char* op = a.relation() == Relation::Eq ? "==" : a.relation() == Relation::Le ? "<=" : "<";
  if (all_negative && a.relation() != Relation::Eq) {
    vars = -vars;
    k = -k;
    op = a.relation() == Relation::Le ? ">=" : ">";
  }
  return c_sum(vars) + " " + op + " " + Integer(k.get_num()).get_str();
}

std::string c_guard(const Formula& f, bool nested) {
  auto join = [&](const char* op) {
    std::string out;
    for (const auto& c : f.children()) out += (out.empty() ? "" : op) + c_guard(c, true);
    return nested ? "(" + out + ")" : out;
  };
  switch (f.kind()) {
    case Formula::Kind::True: return "1";
    case Formula::Kind::False: return "0";
    case Formula::Kind::Atom: {
      std::string s = c_atom(f.as_atom());
      return nested ? "(" + s + ")" : s;
    }
    case Formula::Kind::Not: return "!(" + c_guard(f.children()[0], false) + ")";
    case Formula::Kind::And: return join(" && ");
    case Formula::Kind::Or: return join(" || ");
    default: throw RealNotEmittable("quantified guard cannot be emitted");
  }
}

void emit_node(const SkolemFunction& f, int idx, const std::string& var, const std::string& indent,
               std::ostringstream& out) {
  const auto& n = f.nodes()[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) {
    out << indent << "return " << c_term(n.outputs.at(var)) << ";\n";
    return;
  }
  const auto& then_node = f.nodes()[static_cast<std::size_t>(n.then_child)];
  if (then_node.is_leaf()) {
    out << indent << "if (" << c_guard(n.guard, false) << ") return " << c_term(then_node.outputs.at(var)) << ";\n";
  } else {
    out << indent << "if (" << c_guard(n.guard, false) << ") {\n";
    emit_node(f, n.then_child, var, indent + "  ", out);
    out << indent << "}\n";
  }
  emit_node(f, n.else_child, var, indent, out);
}

}  // namespace

std::string emit_source(const SkolemFunction& f, const std::string& name) {
  auto is_real = [](const Variable& v) { return v.sort == Sort::Real; };
  if (std::any_of(f.inputs().begin(), f.inputs().end(), is_real) ||
      std::any_of(f.outputs().begin(), f.outputs().end(), is_real))
    throw RealNotEmittable("function '" + name + "' has real-sorted variables");
  std::ostringstream out;
  std::string params;
  for (const auto& v : f.inputs()) params += (params.empty() ? "" : ", ") + std::string("int64_t ") + v.name;
  if (params.empty()) params = "void";
  for (const auto& y : f.outputs()) {
    out << "int64_t " << name << "_" << y.name << "(" << params << ") {\n";
    emit_node(f, 0, y.name, "  ", out);
    out << "}\n";
  }
  return out.str();
}

}  // namespace modsynth
