#include "support/fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fixture {

using namespace modsynth;

std::string spec_text(const std::string& name) {
  std::ifstream in(std::string(MODSYNTH_SPECS_DIR) + "/" + name + ".spec");
  if (!in) throw std::runtime_error("missing spec " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LtlTSpec load_spec(const std::string& name, std::optional<Sort> theory) { return parse_spec(spec_text(name), theory); }

Built build(const std::string& name, std::optional<Sort> theory) {
  auto bspec = booleanize(load_spec(name, theory));
  auto result = solve_and_extract(build_game(bspec));
  if (!result.realizable()) throw std::runtime_error(name + " is unrealizable");
  return {std::move(bspec), *result.machine};
}

std::vector<std::string> benchmark_specs() { return {"running", "syn_2_3", "syn_2_4", "syn_2_5", "syn_2_6"}; }

std::vector<Rational> y_samples(Sort sort) {
  std::vector<Rational> out;
  if (sort == Sort::Int) {
    for (long y = -30; y <= 30; ++y) out.emplace_back(y);
  } else {
    for (long k = -120; k <= 120; ++k) {
      Rational q(k, 4);
      q.canonicalize();
      out.push_back(q);
    }
  }
  return out;
}

std::set<Choice> feasible_choices(const LtlTSpec& spec, const Valuation& v_x) {
  std::set<Choice> out;
  const auto& y = spec.sys.at(0);
  Valuation v = v_x;
  for (const auto& value : y_samples(y.sort)) {
    v[y.name] = value;
    Choice c = 0;
    for (std::size_t i = 0; i < spec.literals.size(); ++i)
      if (eval_formula(spec.literals[i], v)) c |= Choice{1} << i;
    out.insert(c);
  }
  return out;
}

Valuation val(std::initializer_list<std::pair<const char*, long>> kv) {
  Valuation v;
  for (const auto& [k, x] : kv) v[k] = Rational(x);
  return v;
}

}  // namespace fixture
