#include "modsynth/artifacts.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "modsynth/errors.hpp"
#include "modsynth/parse.hpp"

namespace modsynth {

using Json = nlohmann::ordered_json;

namespace {

Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed ") + what + ": " + e.what());
  }
}

template <typename Fn>
auto guarded(const char* what, Fn fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed ") + what + ": " + e.what());
  } catch (const SyntaxError& e) {
    throw SchemaError(std::string("malformed ") + what + ": " + e.what());
  }
}

Json variables_json(const std::vector<Variable>& vars) {
  Json out = Json::array();
  for (const auto& v : vars) out.push_back({{"name", v.name}, {"sort", std::string(to_string(v.sort))}});
  return out;
}

std::vector<Variable> variables_from(const Json& j) {
  std::vector<Variable> out;
  for (const auto& v : j) out.push_back({v.at("name").get<std::string>(), parse_sort(v.at("sort").get<std::string>())});
  return out;
}

SortContext context_of(const std::vector<Variable>& a, const std::vector<Variable>& b = {},
                       const std::vector<Variable>& c = {}) {
  SortContext ctx;
  for (const auto* vs : {&a, &b, &c})
    for (const auto& v : *vs) ctx[v.name] = v.sort;
  return ctx;
}

Json value_json(const Rational& q) {
  if (is_integer(q) && q.get_num().fits_slong_p()) return q.get_num().get_si();
  return to_string(q);
}

Rational value_from(const Json& j) {
  if (j.is_number_integer()) return Rational(Integer(std::to_string(j.get<long long>())));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw SchemaError("value " + j.dump() + " is neither an integer nor a \"p/q\" string");
}

Json valuation_json(const Valuation& v) {
  Json out = Json::object();
  for (const auto& [name, value] : v) out[name] = value_json(value);
  return out;
}

Json skolem_node(const SkolemFunction& f, int idx) {
  const auto& n = f.nodes()[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) {
    Json outs = Json::object();
    for (const auto& [name, term] : n.outputs) outs[name] = term.to_string();
    return {{"outputs", outs}};
  }
  return {{"guard", to_string(n.guard)}, {"then", skolem_node(f, n.then_child)}, {"else", skolem_node(f, n.else_child)}};
}

int read_node(const Json& j, const SortContext& ctx, std::vector<SkolemFunction::Node>& nodes) {
  int idx = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("outputs")) {
    for (const auto& [name, text] : j.at("outputs").items())
      nodes[static_cast<std::size_t>(idx)].outputs[name] = parse_term(text.get<std::string>(), ctx);
    return idx;
  }
  nodes[static_cast<std::size_t>(idx)].guard = parse_formula(j.at("guard").get<std::string>(), ctx);
  int then_child = read_node(j.at("then"), ctx, nodes);
  int else_child = read_node(j.at("else"), ctx, nodes);
  nodes[static_cast<std::size_t>(idx)].then_child = then_child;
  nodes[static_cast<std::size_t>(idx)].else_child = else_child;
  return idx;
}

Json skolem_json(const SkolemFunction& f) {
  return {{"inputs", variables_json(f.inputs())}, {"outputs", variables_json(f.outputs())}, {"tree", skolem_node(f, 0)}};
}

SkolemFunction skolem_from(const Json& j) {
  auto inputs = variables_from(j.at("inputs"));
  auto outputs = variables_from(j.at("outputs"));
  std::vector<SkolemFunction::Node> nodes;
  read_node(j.at("tree"), context_of(inputs, outputs), nodes);
  return SkolemFunction(std::move(inputs), std::move(outputs), std::move(nodes));
}

const char* binding_name(ZBinding b) {
  switch (b) {
    case ZBinding::External: return "external";
    case ZBinding::PrevInput: return "prev_input";
    case ZBinding::PrevOutput: return "prev_output";
  }
  return "external";
}

ZBinding binding_from(const std::string& s) {
  if (s == "external") return ZBinding::External;
  if (s == "prev_input") return ZBinding::PrevInput;
  if (s == "prev_output") return ZBinding::PrevOutput;
  throw SchemaError("unknown z binding '" + s + "'");
}

std::vector<ZVariable> z_from(const Json& j, const BooleanSpec& bspec) {
  std::vector<ZVariable> out;
  if (!j.contains("z")) return out;
  auto taken = bspec.spec.sorts();
  for (const auto& zj : j.at("z")) {
    ZVariable z;
    z.var = {zj.at("name").get<std::string>(), parse_sort(zj.value("sort", std::string("int")))};
    if (taken.count(z.var.name)) throw SchemaError("z variable '" + z.var.name + "' clashes with a declared name");
    taken[z.var.name] = z.var.sort;
    z.binding = binding_from(zj.value("binding", std::string("external")));
    z.source = zj.value("source", std::string());
    const auto& pool = z.binding == ZBinding::PrevInput ? bspec.spec.env : bspec.spec.sys;
    if (z.binding != ZBinding::External &&
        std::none_of(pool.begin(), pool.end(), [&](const Variable& v) { return v.name == z.source; }))
      throw SchemaError("z variable '" + z.var.name + "' is bound to unknown source '" + z.source + "'");
    if (zj.contains("initial")) z.initial = value_from(zj.at("initial"));
    out.push_back(std::move(z));
  }
  return out;
}

Json z_json(const std::vector<ZVariable>& zs) {
  Json out = Json::array();
  for (const auto& z : zs) {
    Json j = {{"name", z.var.name}, {"sort", std::string(to_string(z.var.sort))}, {"binding", binding_name(z.binding)}};
    if (z.binding != ZBinding::External) j["source"] = z.source;
    j["initial"] = value_json(z.initial);
    out.push_back(j);
  }
  return out;
}

}  // namespace

std::string write_abstraction(const BooleanSpec& b) {
  std::size_t n = b.table.literal_count();
  Json j;
  j["spec"] = render_spec(b.spec);
  j["env"] = variables_json(b.table.env);
  j["sys"] = variables_json(b.table.sys);
  j["literals"] = Json::array();
  for (const auto& l : b.table.literals) j["literals"].push_back(to_string(l));
  j["propositions"] = b.propositions();
  j["direct"] = b.render_direct();
  j["legal"] = b.render_legal();
  j["entries"] = Json::array();
  for (std::size_t k = 0; k < b.table.entries.size(); ++k) {
    const auto& e = b.table.entries[k];
    Json choices = Json::array();
    for (Choice c : e.reaction) choices.push_back(choice_bits(c, n));
    j["entries"].push_back(
        {{"letter", e.letter}, {"region", to_string(e.region)}, {"choices", choices}, {"extra", b.render_extra(k)}});
  }
  return j.dump(2) + "\n";
}

BooleanSpec read_abstraction(const std::string& text) {
  Json j = parse_json(text, "abstraction");
  return guarded("abstraction", [&] {
    LtlTSpec spec = parse_spec(j.at("spec").get<std::string>());
    ValidReactionTable table{spec.env, spec.sys, spec.literals, {}};
    auto literals = j.at("literals").get<std::vector<std::string>>();
    if (literals.size() != spec.literals.size()) throw SchemaError("literal table does not match the spec");
    for (std::size_t i = 0; i < literals.size(); ++i)
      if (to_string(spec.literals[i]) != literals[i])
        throw SchemaError("literal " + std::to_string(i) + " does not match the spec");
    SortContext env = context_of(spec.env);
    for (const auto& e : j.at("entries")) {
      ReactionEntry entry;
      entry.letter = e.at("letter").get<std::string>();
      entry.region = parse_formula(e.at("region").get<std::string>(), env);
      for (const auto& bits : e.at("choices")) entry.reaction.push_back(parse_choice_bits(bits.get<std::string>(), literals.size()));
      table.entries.push_back(std::move(entry));
    }
    return booleanize(spec, std::move(table));
  });
}

std::string write_skolem(const SkolemFunction& f) { return skolem_json(f).dump(2) + "\n"; }

SkolemFunction read_skolem(const std::string& text) {
  Json j = parse_json(text, "Skolem function");
  return guarded("Skolem function", [&] { return skolem_from(j); });
}

AdaptiveDescription read_gamma(const std::string& text, const BooleanSpec& bspec) {
  Json j = parse_json(text, "adaptive description");
  return guarded("adaptive description", [&] {
    AdaptiveDescription g;
    g.z = z_from(j, bspec);
    SortContext ctx = context_of(bspec.spec.env, bspec.spec.sys, g.z_variables());
    const auto& table = bspec.table;
    std::size_t n = table.literal_count();
    for (const auto& cj : j.value("constraints", Json::array())) {
      std::string letter = cj.value("letter", std::string("*"));
      std::string bits = cj.value("choice", std::string("*"));
      for (std::size_t k = 0; k < table.entries.size(); ++k) {
        if (letter != "*" && letter != table.entries[k].letter) continue;
        std::vector<Choice> choices;
        if (bits == "*") {
          choices = table.entries[k].reaction;
        } else {
          Choice c = parse_choice_bits(bits, n);
          if (!table.entries[k].contains(c))
            throw ChoiceNotInReaction("choice " + bits + " is not in the reaction of " + table.entries[k].letter);
          choices.push_back(c);
        }
        for (Choice c : choices) {
          if (g.find(k, c)) continue;
          Formula constraint;
          if (cj.contains("formula")) {
            constraint = parse_formula(cj.at("formula").get<std::string>(), ctx);
          } else {
            std::string shape = cj.at("shape").get<std::string>();
            std::string output = cj.value("output", bspec.spec.sys.empty() ? std::string() : bspec.spec.sys[0].name);
            std::optional<Rational> eps;
            if (cj.contains("epsilon")) eps = value_from(cj.at("epsilon"));
            AdaptiveShape s = shape == "greatest" ? AdaptiveShape::Greatest
                              : shape == "least"  ? AdaptiveShape::Least
                              : shape == "closest"
                                  ? AdaptiveShape::Closest
                                  : throw SchemaError("unknown adaptive shape '" + shape + "'");
            std::string target = cj.value("target", std::string());
            if (s == AdaptiveShape::Closest && !ctx.count(target))
              throw SchemaError("closest shape needs a declared target, got '" + target + "'");
            constraint = shaped_constraint(table, k, c, s, output, target, eps);
          }
          g.constraints.push_back({k, c, constraint});
        }
      }
    }
    return g;
  });
}

std::string write_gamma(const AdaptiveDescription& g, const BooleanSpec& bspec) {
  Json j;
  j["z"] = z_json(g.z);
  j["constraints"] = Json::array();
  for (const auto& k : g.constraints)
    j["constraints"].push_back({{"letter", bspec.table.entries.at(k.letter).letter},
                                {"choice", choice_bits(k.choice, bspec.table.literal_count())},
                                {"formula", to_string(k.constraint)}});
  return j.dump(2) + "\n";
}

std::string write_provider(const StaticProvider& p, const BooleanSpec& bspec) {
  Json j;
  j["kind"] = p.gamma() ? "adaptive" : "static";
  if (p.gamma()) j["gamma"] = Json::parse(write_gamma(*p.gamma(), bspec));
  j["functions"] = Json::array();
  for (const auto& e : p.entries())
    j["functions"].push_back({{"letter", bspec.table.entries.at(e.letter).letter},
                              {"choice", choice_bits(e.choice, bspec.table.literal_count())},
                              {"function", skolem_json(*e.function)}});
  return j.dump(2) + "\n";
}

StaticProvider read_provider(const std::string& text, const BooleanSpec& bspec) {
  Json j = parse_json(text, "provider");
  return guarded("provider", [&] {
    std::optional<AdaptiveDescription> gamma;
    if (j.contains("gamma")) gamma = read_gamma(j.at("gamma").dump(), bspec);
    std::vector<StaticProvider::Entry> entries;
    for (const auto& fj : j.at("functions")) {
      std::size_t k = bspec.table.index_of(fj.at("letter").get<std::string>());
      Choice c = parse_choice_bits(fj.at("choice").get<std::string>(), bspec.table.literal_count());
      if (!bspec.table.entries[k].contains(c))
        throw ChoiceNotInReaction("provider entry outside the reaction of " + bspec.table.entries[k].letter);
      entries.push_back({k, c, std::make_shared<const SkolemFunction>(skolem_from(fj.at("function")))});
    }
    return StaticProvider::from_functions(bspec.table, std::move(gamma), std::move(entries));
  });
}

namespace {

template <typename Fn>
void for_each_line(const std::string& text, Fn fn) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("line " + std::to_string(number) + ": " + e.what());
    }
    if (!j.is_object()) throw SchemaError("line " + std::to_string(number) + ": expected a JSON object");
    fn(j, number);
  }
}

bool declared(const std::vector<Variable>& vs, const std::string& name) {
  return std::any_of(vs.begin(), vs.end(), [&](const Variable& v) { return v.name == name; });
}

}  // namespace

std::vector<TraceInput> read_inputs(const std::string& text, const LtlTSpec& spec, const AdaptiveDescription* gamma) {
  std::vector<TraceInput> out;
  std::vector<Variable> external;
  if (gamma)
    for (const auto& z : gamma->z)
      if (z.binding == ZBinding::External) external.push_back(z.var);
  for_each_line(text, [&](const Json& j, std::size_t line) {
    TraceInput in;
    for (const auto& [key, value] : j.items()) {
      if (declared(spec.env, key)) in.x[key] = value_from(value);
      else if (declared(external, key)) in.z[key] = value_from(value);
      else if (!declared(spec.sys, key) && key != "step" && key != "letter" && key != "choice")
        throw SchemaError("line " + std::to_string(line) + ": unknown field '" + key + "'");
    }
    for (const auto& v : spec.env)
      if (!in.x.count(v.name)) throw MissingVariable("line " + std::to_string(line) + ": no value for '" + v.name + "'");
    for (const auto& [name, value] : in.x)
      if (!is_integer(value) && declared(spec.env, name) &&
          std::find_if(spec.env.begin(), spec.env.end(), [&](const Variable& v) { return v.name == name; })->sort == Sort::Int)
        throw SchemaError("line " + std::to_string(line) + ": integer input '" + name + "' has a fractional value");
    out.push_back(std::move(in));
  });
  return out;
}

std::string write_records(const std::vector<StepRecord>& records, const BooleanSpec& bspec) {
  std::string out;
  for (const auto& r : records) {
    Json j;
    j["step"] = r.index;
    for (const auto& [k, v] : r.v_x) j[k] = value_json(v);
    for (const auto& [k, v] : r.v_z) j[k] = value_json(v);
    for (const auto& [k, v] : r.v_y) j[k] = value_json(v);
    j["letter"] = bspec.table.entries.at(r.letter).letter;
    j["choice"] = choice_bits(r.choice, bspec.table.literal_count());
    out += j.dump() + "\n";
  }
  return out;
}

RecordFile read_records(const std::string& text, const LtlTSpec& spec) {
  RecordFile file;
  std::size_t with_choice = 0;
  for_each_line(text, [&](const Json& j, std::size_t line) {
    StepRecord r;
    r.index = j.contains("step") ? j.at("step").get<std::size_t>() : file.records.size();
    for (const auto& v : spec.env) {
      if (!j.contains(v.name)) throw MissingVariable("line " + std::to_string(line) + ": no value for '" + v.name + "'");
      r.v_x[v.name] = value_from(j.at(v.name));
    }
    for (const auto& v : spec.sys) {
      if (!j.contains(v.name)) throw MissingVariable("line " + std::to_string(line) + ": no value for '" + v.name + "'");
      r.v_y[v.name] = value_from(j.at(v.name));
    }
    if (j.contains("choice")) {
      r.choice = parse_choice_bits(j.at("choice").get<std::string>(), spec.literals.size());
      ++with_choice;
    }
    file.records.push_back(std::move(r));
  });
  if (with_choice != 0 && with_choice != file.records.size())
    throw SchemaError("either every record or none carries a choice");
  file.has_choices = with_choice != 0;
  return file;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path + "'");
  out << content;
}

}  // namespace modsynth
