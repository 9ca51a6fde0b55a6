#include "modsynth/runtime.hpp"

#include <chrono>
#include <sstream>

#include "modsynth/errors.hpp"

namespace modsynth {

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

}  // namespace

TheoryController::TheoryController(const BooleanSpec& bspec, MealyMachine machine, ProviderHandle provider,
                                   std::optional<AdaptiveDescription> gamma)
    : partitioner_(compile_partitioner(bspec.table)),
      machine_(std::move(machine)),
      provider_(std::move(provider)),
      gamma_(std::move(gamma)) {
  try {
    validate_mealy(machine_, bspec);
  } catch (const Error& e) {
    throw SchemaMismatch(std::string("machine does not fit the abstraction: ") + e.what());
  }
  const ValidReactionTable& table = std::visit([](const auto& p) -> const ValidReactionTable& { return p->table(); },
                                               provider_);
  if (table.literals != bspec.table.literals || table.entries.size() != bspec.table.entries.size())
    throw SchemaMismatch("provider was built for a different abstraction");
  reset();
}

void TheoryController::reset() {
  state_ = machine_.initial;
  steps_ = 0;
  z_state_.clear();
  if (gamma_)
    for (const auto& z : gamma_->z)
      if (z.binding != ZBinding::External) z_state_[z.var.name] = z.initial;
}

StepRecord TheoryController::step(const Valuation& v_x, const Valuation& external_z) {
  StepRecord rec;
  rec.index = steps_++;
  rec.v_x = v_x;

  auto t0 = Clock::now();
  rec.letter = partitioner_.partition(v_x);
  rec.partition_us = micros_since(t0);

  auto t1 = Clock::now();
  const auto* t = machine_.find(state_, rec.letter);
  if (!t) throw SchemaMismatch("machine has no transition from state " + std::to_string(state_));
  rec.choice = t->output;
  state_ = t->to;
  rec.machine_us = micros_since(t1);

  if (gamma_) {
    for (const auto& z : gamma_->z) {
      if (z.binding == ZBinding::External) {
        auto it = external_z.find(z.var.name);
        if (it == external_z.end()) throw MissingVariable("external input '" + z.var.name + "' is not supplied");
        rec.v_z[z.var.name] = it->second;
      } else {
        rec.v_z[z.var.name] = z_state_.at(z.var.name);
      }
    }
  }

  auto t2 = Clock::now();
  rec.v_y = std::visit(
      [&](const auto& p) { return p->provide(rec.v_x, rec.v_z, rec.letter, rec.choice); }, provider_);
  rec.provide_us = micros_since(t2);

  if (gamma_) {
    for (const auto& z : gamma_->z) {
      if (z.binding == ZBinding::PrevInput) z_state_[z.var.name] = v_x.at(z.source);
      if (z.binding == ZBinding::PrevOutput) z_state_[z.var.name] = rec.v_y.at(z.source);
    }
  }
  ++metrics_.steps;
  metrics_.partition_us += rec.partition_us;
  metrics_.machine_us += rec.machine_us;
  metrics_.provide_us += rec.provide_us;
  return rec;
}

std::vector<StepRecord> TheoryController::run_trace(const std::vector<Valuation>& inputs,
                                                    const std::vector<Valuation>& external_z) {
  std::vector<StepRecord> out;
  out.reserve(inputs.size());
  static const Valuation kNone;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    out.push_back(step(inputs[i], i < external_z.size() ? external_z[i] : kNone));
  return out;
}

std::string TraceReport::summary() const {
  std::ostringstream out;
  out << steps << " steps, " << violations.size() << " violation" << (violations.size() == 1 ? "" : "s");
  for (const auto& v : violations) out << "\n  step " << v.index << " [" << v.kind << "] " << v.message;
  return out.str();
}

TraceReport check_trace(const LtlTSpec& spec, const std::vector<StepRecord>& records, bool check_choices) {
  TraceReport report;
  report.steps = records.size();
  std::size_t n = spec.literals.size();
  std::vector<Choice> actual;
  for (const auto& r : records) {
    Valuation v = r.v_x;
    v.insert(r.v_y.begin(), r.v_y.end());
    Choice c = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (eval_formula(spec.literals[i], v)) c |= Choice{1} << i;
    actual.push_back(c);
    if (check_choices && c != r.choice)
      report.violations.push_back({r.index, "literal",
                                   "literals evaluate to " + choice_bits(c, n) + " but the cube is " +
                                       choice_bits(r.choice, n)});
  }
  if (classify_fragment(spec.property) != Fragment::GXSafety) return report;

  SafetyStructure s = safety_structure(spec.property);
  std::size_t m = s.next_terms.size();
  for (std::size_t t = 0; t < actual.size(); ++t) {
    auto now = [&](std::size_t i) { return choice_has(actual[t], i); };
    auto holds_with = [&](std::uint64_t w) {
      for (const auto& f : s.invariants)
        if (!eval_step(f, now, w, s.next_terms)) return false;
      if (t == 0)
        for (const auto& f : s.initial_only)
          if (!eval_step(f, now, w, s.next_terms)) return false;
      return true;
    };
    bool ok = false;
    if (t + 1 < actual.size()) {
      std::uint64_t w = 0;
      for (std::size_t j = 0; j < m; ++j)
        if (eval_boolean(s.next_terms[j], [&](std::size_t i) { return choice_has(actual[t + 1], i); }))
          w |= std::uint64_t{1} << j;
      ok = holds_with(w);
    } else {
      for (std::uint64_t w = 0; w < (std::uint64_t{1} << m) && !ok; ++w) ok = holds_with(w);
    }
    if (!ok)
      report.violations.push_back({records[t].index, "safety",
                                   "property fails with literal values " + choice_bits(actual[t], n)});
  }
  return report;
}

}  // namespace modsynth
