#include "modsynth/booleanizer.hpp"

#include <algorithm>

#include "modsynth/errors.hpp"
#include "modsynth/solver.hpp"

namespace modsynth {

std::size_t choice_index(Choice c, std::size_t n) {
  std::size_t value = 0;
  for (std::size_t i = 0; i < n; ++i) value = (value << 1) | choice_has(c, i);
  return ((std::size_t{1} << n) - 1) - value;
}

Choice choice_at(std::size_t index, std::size_t n) {
  std::size_t value = ((std::size_t{1} << n) - 1) - index;
  Choice c = 0;
  for (std::size_t i = 0; i < n; ++i)
    if ((value >> (n - 1 - i)) & 1U) c |= Choice{1} << i;
  return c;
}

std::string choice_bits(Choice c, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i)
    if (choice_has(c, i)) s[i] = '1';
  return s;
}

Choice parse_choice_bits(const std::string& bits, std::size_t n) {
  if (bits.size() != n) throw SchemaError("choice '" + bits + "' has " + std::to_string(bits.size()) +
                                          " bits, expected " + std::to_string(n));
  Choice c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bits[i] == '1') c |= Choice{1} << i;
    else if (bits[i] != '0') throw SchemaError("choice '" + bits + "' is not a bit string");
  }
  return c;
}

Formula characteristic_choice(Choice c, const std::vector<Formula>& literals) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < literals.size(); ++i)
    parts.push_back(choice_has(c, i) ? literals[i] : Formula::negate(literals[i]));
  return to_nnf(Formula::conj(std::move(parts)));
}

Formula characteristic_choice(Choice c, const LtlTSpec& spec) { return characteristic_choice(c, spec.literals); }

namespace {

std::vector<Formula> literals_of(const Formula& cube) {
  if (cube.kind() == Formula::Kind::And) return cube.children();
  return {cube};
}

// Widens each cube as far as the whole disjunction allows, then drops
// cubes covered by the others.
Formula simplify_cubes(std::vector<Formula> cubes) {
  if (cubes.size() <= 1 && (cubes.empty() || cubes[0].kind() != Formula::Kind::And)) return Formula::disj(cubes);
  Formula whole = Formula::disj(cubes);
  for (auto& cube : cubes) {
    std::vector<Formula> lits = literals_of(cube);
    for (std::size_t i = 0; i < lits.size();) {
      std::vector<Formula> rest = lits;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      Formula wider = Formula::conj(rest);
      if (check_validity(to_nnf(Formula::implies(wider, whole)))) {
        lits = std::move(rest);
      } else {
        ++i;
      }
    }
    cube = Formula::conj(lits);
    if (cube.is_true()) return cube;
  }
  std::vector<Formula> kept;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (std::find(kept.begin(), kept.end(), cubes[i]) != kept.end()) continue;
    std::vector<Formula> others = kept;
    for (std::size_t j = i + 1; j < cubes.size(); ++j) others.push_back(cubes[j]);
    if (!others.empty() && check_validity(to_nnf(Formula::implies(cubes[i], Formula::disj(others))))) continue;
    kept.push_back(cubes[i]);
  }
  return Formula::disj(std::move(kept));
}

}  // namespace

Formula simplify_region(const Formula& f) {
  std::vector<Formula> kept;
  for (auto& cube : to_dnf(to_nnf(f))) {
    Formula c = Formula::conj(cube);
    if (!c.is_false() && check_satisfiable(c)) kept.push_back(c);
  }
  return simplify_cubes(std::move(kept));
}

Formula choice_region(Choice c, const LtlTSpec& spec) {
  Formula body = characteristic_choice(c, spec);
  for (auto it = spec.sys.rbegin(); it != spec.sys.rend(); ++it) body = Formula::exists(it->name, it->sort, body);
  return simplify_region(eliminate_quantifiers(body).formula);
}

bool ReactionEntry::contains(Choice c) const {
  return std::find(reaction.begin(), reaction.end(), c) != reaction.end();
}

std::size_t ValidReactionTable::index_of(const std::string& letter) const {
  for (std::size_t k = 0; k < entries.size(); ++k)
    if (entries[k].letter == letter) return k;
  throw SchemaError("unknown letter '" + letter + "'");
}

namespace {

// Conjunction of regions in DNF, dropping unsatisfiable cubes as it goes.
Formula product_region(const std::vector<Formula>& factors) {
  std::vector<Formula> cubes{Formula::top()};
  for (const auto& factor : factors) {
    std::vector<Formula> alternatives;
    for (auto& cube : to_dnf(to_nnf(factor))) alternatives.push_back(Formula::conj(cube));
    std::vector<Formula> next;
    for (const auto& c : cubes)
      for (const auto& a : alternatives) {
        Formula joined = Formula::conj(c, a);
        if (joined.is_false() || !check_satisfiable(joined)) continue;
        if (std::find(next.begin(), next.end(), joined) == next.end()) next.push_back(joined);
      }
    if (next.size() > kDefaultCellBudget) throw CellBudgetExceeded("region product exceeds the cell budget");
    cubes = std::move(next);
  }
  return simplify_cubes(std::move(cubes));
}

}  // namespace

ValidReactionTable enumerate_valid_reactions(const LtlTSpec& spec, const AbstractionOptions& options) {
  std::size_t n = spec.literals.size();
  if (n > options.max_literals)
    throw ChoiceBudgetExceeded(std::to_string(n) + " literals exceed the bound of " +
                               std::to_string(options.max_literals));
  ValidReactionTable table{spec.env, spec.sys, spec.literals, {}};

  std::size_t count = std::size_t{1} << n;
  std::vector<Choice> choices;
  std::vector<Formula> regions;
  for (std::size_t k = 0; k < count; ++k) {
    Choice c = choice_at(k, n);
    Formula r = choice_region(c, spec);
    if (r.is_false()) continue;
    choices.push_back(c);
    regions.push_back(r);
  }

  std::vector<Formula> blocked;
  while (true) {
    Formula uncovered = Formula::negate(Formula::disj(blocked));
    auto model = find_model(to_nnf(uncovered), spec.env);
    if (!model) break;
    ReactionEntry entry;
    entry.letter = "e_" + std::to_string(table.entries.size());
    std::vector<Formula> factors;
    for (std::size_t j = 0; j < choices.size(); ++j) {
      bool inside = eval_formula(regions[j], *model);
      if (inside) entry.reaction.push_back(choices[j]);
      factors.push_back(inside ? regions[j] : to_nnf(Formula::negate(regions[j])));
    }
    entry.region = product_region(factors);
    if (entry.region.is_false() || !eval_formula(entry.region, *model))
      throw std::logic_error("reaction cell does not contain its own witness");
    blocked.push_back(entry.region);
    table.entries.push_back(std::move(entry));
  }
  return table;
}

std::vector<std::string> BooleanSpec::propositions() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < table.literal_count(); ++i) out.push_back(LtlTSpec::proposition(i));
  return out;
}

std::vector<std::string> BooleanSpec::letters() const {
  std::vector<std::string> out;
  for (const auto& e : table.entries) out.push_back(e.letter);
  return out;
}

std::string BooleanSpec::render_direct() const {
  return render_ltl(direct, [](std::size_t i) { return LtlTSpec::proposition(i); });
}

std::string BooleanSpec::render_legal() const {
  auto names = letters();
  if (names.size() == 1) return names[0];
  std::string some;
  for (std::size_t k = 0; k < names.size(); ++k) some += (k ? " || " : "") + names[k];
  std::string out = "(" + some + ")";
  if (names.size() == 2) return out + " && (" + names[0] + " <-> !" + names[1] + ")";
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b) out += " && !(" + names[a] + " && " + names[b] + ")";
  return out;
}

std::string BooleanSpec::render_extra(std::size_t k) const {
  const auto& e = table.entries.at(k);
  std::size_t n = table.literal_count();
  std::string out;
  for (std::size_t j = 0; j < e.reaction.size(); ++j) {
    std::string cube;
    for (std::size_t i = 0; i < n; ++i)
      cube += (i ? " && " : "") + std::string(choice_has(e.reaction[j], i) ? "" : "!") + LtlTSpec::proposition(i);
    out += (j ? " || " : "") + std::string("(") + (n ? cube : "true") + ")";
  }
  return out.empty() ? "false" : out;
}

std::string BooleanSpec::render() const {
  std::string extra;
  for (std::size_t k = 0; k < table.entries.size(); ++k)
    extra += (k ? " && " : "") + std::string("(") + table.entries[k].letter + " -> (" + render_extra(k) + "))";
  return "(" + render_direct() + ") && G ((" + render_legal() + ") -> (" + extra + "))";
}

BooleanSpec booleanize(const LtlTSpec& spec, ValidReactionTable table) {
  return BooleanSpec{spec, spec.property, std::move(table)};
}

BooleanSpec booleanize(const LtlTSpec& spec, const AbstractionOptions& options) {
  return booleanize(spec, enumerate_valid_reactions(spec, options));
}

}  // namespace modsynth
