#include "modsynth/game.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

#include "json.hpp"
#include "modsynth/errors.hpp"

namespace modsynth {

const MealyMachine::Transition* MealyMachine::find(std::size_t state, std::size_t letter) const {
  auto it = std::lower_bound(transitions.begin(), transitions.end(), std::make_pair(state, letter),
                             [](const Transition& t, const std::pair<std::size_t, std::size_t>& key) {
                               return std::make_pair(t.from, t.letter) < key;
                             });
  if (it == transitions.end() || it->from != state || it->letter != letter) return nullptr;
  return &*it;
}

namespace {

constexpr std::size_t kMaxNextTerms = 6;

void split_conjuncts(const LtlNode& n, std::vector<LtlNode>& invariants, std::vector<LtlNode>& initial) {
  if (n.kind == LtlNode::Kind::And) {
    split_conjuncts(n.children[0], invariants, initial);
    split_conjuncts(n.children[1], invariants, initial);
  } else if (n.kind == LtlNode::Kind::Globally) {
    const LtlNode& body = n.children[0];
    if (body.kind == LtlNode::Kind::Globally || body.kind == LtlNode::Kind::And) {
      for (const auto& c : body.children) split_conjuncts(LtlNode::unary(LtlNode::Kind::Globally, c), invariants, initial);
    } else {
      invariants.push_back(body);
    }
  } else {
    initial.push_back(n);
  }
}

void collect_next(const LtlNode& n, std::vector<LtlNode>& out) {
  if (n.kind == LtlNode::Kind::Next) {
    if (std::find(out.begin(), out.end(), n.children[0]) == out.end()) out.push_back(n.children[0]);
    return;
  }
  for (const auto& c : n.children) collect_next(c, out);
}

std::uint64_t full_mask(std::size_t m) {
  std::size_t count = std::size_t{1} << m;
  return count == 64 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << count) - 1;
}

}  // namespace

SafetyStructure safety_structure(const LtlNode& property) {
  SafetyStructure s;
  split_conjuncts(property, s.invariants, s.initial_only);
  for (const auto& f : s.invariants) collect_next(f, s.next_terms);
  for (const auto& f : s.initial_only) collect_next(f, s.next_terms);
  return s;
}

bool eval_step(const LtlNode& n, const std::function<bool(std::size_t)>& now, std::uint64_t next_values,
               const std::vector<LtlNode>& next_terms) {
  auto sub = [&](std::size_t i) { return eval_step(n.children[i], now, next_values, next_terms); };
  switch (n.kind) {
    case LtlNode::Kind::Next: {
      auto idx = static_cast<std::size_t>(std::find(next_terms.begin(), next_terms.end(), n.children[0]) -
                                          next_terms.begin());
      return (next_values >> idx) & 1U;
    }
    case LtlNode::Kind::Not: return !sub(0);
    case LtlNode::Kind::And: return sub(0) && sub(1);
    case LtlNode::Kind::Or: return sub(0) || sub(1);
    case LtlNode::Kind::Implies: return !sub(0) || sub(1);
    case LtlNode::Kind::Iff: return sub(0) == sub(1);
    default: return eval_boolean(n, now);
  }
}

SafetyGame build_game(const BooleanSpec& bspec) {
  if (classify_fragment(bspec.direct) != Fragment::GXSafety)
    throw FragmentError("property is outside the G/X safety fragment");
  SafetyGame g;
  g.letters = bspec.letters();
  g.propositions = bspec.propositions();
  SafetyStructure structure = safety_structure(bspec.direct);
  g.invariants = std::move(structure.invariants);
  g.initial_only = std::move(structure.initial_only);
  g.next_terms = std::move(structure.next_terms);
  std::size_t m = g.next_terms.size();
  if (m > kMaxNextTerms)
    throw FragmentError(std::to_string(m) + " distinct Next subformulas exceed the bound of " +
                        std::to_string(kMaxNextTerms));
  std::size_t vectors = std::size_t{1} << m;

  g.positions.push_back({!g.initial_only.empty(), full_mask(m)});
  for (std::size_t p = 0; p < g.positions.size(); ++p) {
    SafetyGame::Position pos = g.positions[p];
    std::vector<SafetyGame::Move> moves;
    for (std::size_t k = 0; k < bspec.table.entries.size(); ++k) {
      for (Choice c : bspec.table.entries[k].reaction) {
        std::uint64_t now = 0;
        for (std::size_t j = 0; j < m; ++j)
          if (eval_boolean(g.next_terms[j], [c](std::size_t i) { return choice_has(c, i); })) now |= 1ULL << j;
        if (!((pos.allowed >> now) & 1U)) continue;
        auto now_bit = [c](std::size_t i) { return choice_has(c, i); };
        std::uint64_t allowed = 0;
        for (std::size_t w = 0; w < vectors; ++w) {
          bool ok = std::all_of(g.invariants.begin(), g.invariants.end(),
                                [&](const LtlNode& f) { return eval_step(f, now_bit, w, g.next_terms); });
          if (ok && pos.initial)
            ok = std::all_of(g.initial_only.begin(), g.initial_only.end(),
                             [&](const LtlNode& f) { return eval_step(f, now_bit, w, g.next_terms); });
          if (ok) allowed |= 1ULL << w;
        }
        if (!allowed) continue;
        SafetyGame::Position next{false, allowed};
        auto it = std::find(g.positions.begin(), g.positions.end(), next);
        std::size_t to = static_cast<std::size_t>(it - g.positions.begin());
        if (it == g.positions.end()) g.positions.push_back(next);
        moves.push_back({k, c, to});
      }
    }
    g.moves.push_back(std::move(moves));
  }
  return g;
}

namespace {

// Positions from which some letter admits no move into `alive`.
std::vector<bool> greatest_fixpoint(const SafetyGame& g) {
  std::size_t letters = g.letters.size();
  std::vector<bool> alive(g.positions.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < alive.size(); ++p) {
      if (!alive[p]) continue;
      for (std::size_t k = 0; k < letters; ++k) {
        bool answer = std::any_of(g.moves[p].begin(), g.moves[p].end(),
                                  [&](const SafetyGame::Move& mv) { return mv.letter == k && alive[mv.to]; });
        if (!answer) {
          alive[p] = false;
          changed = true;
          break;
        }
      }
    }
  }
  return alive;
}

std::vector<std::size_t> losing_rank(const SafetyGame& g) {
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> rank(g.positions.size(), kInf);
  for (std::size_t round = 0;; ++round) {
    std::vector<std::size_t> next = rank;
    bool changed = false;
    for (std::size_t p = 0; p < rank.size(); ++p) {
      if (rank[p] != kInf) continue;
      for (std::size_t k = 0; k < g.letters.size(); ++k) {
        bool forced = std::all_of(g.moves[p].begin(), g.moves[p].end(), [&](const SafetyGame::Move& mv) {
          return mv.letter != k || rank[mv.to] < round;
        });
        if (forced) {
          next[p] = round;
          changed = true;
          break;
        }
      }
    }
    rank = std::move(next);
    if (!changed) break;
  }
  return rank;
}

}  // namespace

GameResult solve_and_extract(const SafetyGame& g) {
  GameResult result;
  std::vector<bool> alive = greatest_fixpoint(g);
  if (!alive[0]) {
    std::vector<std::size_t> rank = losing_rank(g);
    std::size_t p = 0;
    while (true) {
      std::size_t letter = 0;
      for (; letter < g.letters.size(); ++letter) {
        bool forced = std::all_of(g.moves[p].begin(), g.moves[p].end(), [&](const SafetyGame::Move& mv) {
          return mv.letter != letter || rank[mv.to] < rank[p];
        });
        if (forced) break;
      }
      result.witness.push_back(g.letters[letter]);
      auto mv = std::find_if(g.moves[p].begin(), g.moves[p].end(),
                             [&](const SafetyGame::Move& m) { return m.letter == letter; });
      if (mv == g.moves[p].end()) break;
      p = mv->to;
    }
    return result;
  }

  MealyMachine m;
  m.letters = g.letters;
  m.propositions = g.propositions;
  std::map<std::size_t, std::size_t> state_of{{0, 0}};
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t p = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < g.letters.size(); ++k) {
      const SafetyGame::Move* best = nullptr;
      std::size_t n = g.propositions.size();
      for (const auto& mv : g.moves[p])
        if (mv.letter == k && alive[mv.to] && (!best || choice_index(mv.output, n) < choice_index(best->output, n)))
          best = &mv;
      auto [it, fresh] = state_of.emplace(best->to, state_of.size());
      if (fresh) queue.push_back(best->to);
      m.transitions.push_back({state_of.at(p), k, it->second, best->output});
    }
  }
  m.states = state_of.size();
  std::sort(m.transitions.begin(), m.transitions.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.from, a.letter) < std::make_pair(b.from, b.letter);
  });
  result.machine = std::move(m);
  return result;
}

std::optional<std::size_t> replay_witness(const SafetyGame& g, const std::vector<std::string>& letters) {
  std::size_t p = 0;
  for (std::size_t t = 0; t < letters.size(); ++t) {
    auto k = static_cast<std::size_t>(std::find(g.letters.begin(), g.letters.end(), letters[t]) - g.letters.begin());
    if (k == g.letters.size()) throw SchemaError("unknown letter '" + letters[t] + "'");
    auto mv = std::find_if(g.moves[p].begin(), g.moves[p].end(),
                           [&](const SafetyGame::Move& m) { return m.letter == k; });
    if (mv == g.moves[p].end()) return t;
    p = mv->to;
  }
  return std::nullopt;
}

std::string export_mealy(const MealyMachine& m) {
  nlohmann::ordered_json j;
  j["letters"] = m.letters;
  j["propositions"] = m.propositions;
  j["states"] = m.states;
  j["initial"] = m.initial;
  j["transitions"] = nlohmann::ordered_json::array();
  for (const auto& t : m.transitions) {
    j["transitions"].push_back({{"from", t.from},
                                {"letter", m.letters.at(t.letter)},
                                {"to", t.to},
                                {"output", choice_bits(t.output, m.propositions.size())}});
  }
  return j.dump(2) + "\n";
}

void validate_mealy(const MealyMachine& m, const BooleanSpec& bspec) {
  if (m.letters != bspec.letters()) throw SchemaError("machine letters do not match the abstraction");
  if (m.propositions != bspec.propositions()) throw SchemaError("machine propositions do not match the abstraction");
  if (m.states == 0 || m.initial >= m.states) throw SchemaError("machine has no valid initial state");
  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    const auto& t = m.transitions[i];
    if (t.from >= m.states || t.to >= m.states) throw SchemaError("transition refers to an unknown state");
    if (t.letter >= m.letters.size()) throw SchemaError("transition refers to an unknown letter");
    if (i && std::make_pair(m.transitions[i - 1].from, m.transitions[i - 1].letter) >= std::make_pair(t.from, t.letter))
      throw SchemaError("transitions are duplicated or out of order");
    if (!bspec.table.entries[t.letter].contains(t.output))
      throw ExtraViolation("state " + std::to_string(t.from) + ", letter " + m.letters[t.letter] + ": output " +
                           choice_bits(t.output, m.propositions.size()) + " is not in the reaction");
  }
  std::vector<bool> seen(m.states, false);
  std::deque<std::size_t> queue{m.initial};
  seen[m.initial] = true;
  while (!queue.empty()) {
    std::size_t q = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < m.letters.size(); ++k) {
      const auto* t = m.find(q, k);
      if (!t) throw SchemaError("no transition from state " + std::to_string(q) + " on " + m.letters[k]);
      if (!seen[t->to]) {
        seen[t->to] = true;
        queue.push_back(t->to);
      }
    }
  }
}

MealyMachine import_mealy(const std::string& text, const BooleanSpec& bspec) {
  MealyMachine m;
  try {
    auto j = nlohmann::json::parse(text);
    m.letters = j.at("letters").get<std::vector<std::string>>();
    m.propositions = j.at("propositions").get<std::vector<std::string>>();
    m.states = j.at("states").get<std::size_t>();
    m.initial = j.at("initial").get<std::size_t>();
    for (const auto& t : j.at("transitions")) {
      std::string letter = t.at("letter").get<std::string>();
      auto k = static_cast<std::size_t>(std::find(m.letters.begin(), m.letters.end(), letter) - m.letters.begin());
      if (k == m.letters.size()) throw SchemaError("transition uses unknown letter '" + letter + "'");
      m.transitions.push_back({t.at("from").get<std::size_t>(), k, t.at("to").get<std::size_t>(),
                               parse_choice_bits(t.at("output").get<std::string>(), m.propositions.size())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed machine: ") + e.what());
  }
  std::sort(m.transitions.begin(), m.transitions.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.from, a.letter) < std::make_pair(b.from, b.letter);
  });
  validate_mealy(m, bspec);
  return m;
}

}  // namespace modsynth
