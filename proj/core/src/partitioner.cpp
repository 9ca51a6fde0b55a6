#include "modsynth/partitioner.hpp"

#include "modsynth/errors.hpp"
#include "modsynth/solver.hpp"

namespace modsynth {

namespace {

std::string describe(const Valuation& v) {
  std::string out = "{";
  for (const auto& [name, value] : v) out += (out.size() > 1 ? ", " : "") + name + ": " + value.get_str();
  return out + "}";
}

}  // namespace

std::size_t CompiledPartitioner::partition(const Valuation& v_x) const {
  std::size_t found = regions_.size();
  for (std::size_t k = 0; k < regions_.size(); ++k) {
    if (!eval_formula(regions_[k], v_x)) continue;
    if (found != regions_.size())
      throw MultiRegion(describe(v_x) + " lies in " + letters_[found] + " and " + letters_[k]);
    found = k;
  }
  if (found == regions_.size()) throw NoRegion(describe(v_x) + " lies in no region");
  return found;
}

CompiledPartitioner compile_partitioner(const ValidReactionTable& table) {
  std::vector<std::string> letters;
  std::vector<Formula> regions;
  for (const auto& e : table.entries) {
    letters.push_back(e.letter);
    regions.push_back(e.region);
  }
  return CompiledPartitioner(std::move(letters), std::move(regions));
}

std::size_t partition_by_validity(const ValidReactionTable& table, const Valuation& v_x) {
  std::size_t n = table.literal_count();
  auto feasible = [&](Choice c) {
    Formula body = substitute(characteristic_choice(c, table.literals), v_x);
    for (auto it = table.sys.rbegin(); it != table.sys.rend(); ++it) body = Formula::exists(it->name, it->sort, body);
    return body;
  };
  std::vector<Formula> quantified;
  for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) quantified.push_back(feasible(choice_at(k, n)));

  std::size_t found = table.entries.size();
  for (std::size_t e = 0; e < table.entries.size(); ++e) {
    std::vector<Formula> parts;
    for (std::size_t k = 0; k < quantified.size(); ++k) {
      bool inside = table.entries[e].contains(choice_at(k, n));
      parts.push_back(inside ? quantified[k] : Formula::negate(quantified[k]));
    }
    if (!check_validity(Formula::conj(std::move(parts)))) continue;
    if (found != table.entries.size())
      throw MultiRegion(describe(v_x) + " validates " + table.entries[found].letter + " and " +
                        table.entries[e].letter);
    found = e;
  }
  if (found == table.entries.size()) throw NoRegion(describe(v_x) + " validates no reaction");
  return found;
}

}  // namespace modsynth
