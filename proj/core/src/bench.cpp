#include "modsynth/bench.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace modsynth {

namespace {

ComponentStats stats_of(std::vector<double> xs) {
  ComponentStats s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  std::sort(xs.begin(), xs.end());
  auto at = [&](double q) {
    auto idx = static_cast<std::size_t>(q * static_cast<double>(xs.size() - 1) + 0.5);
    return xs[std::min(idx, xs.size() - 1)];
  };
  s.p50 = at(0.5);
  s.p95 = at(0.95);
  return s;
}

struct Collector {
  std::vector<double> partition, machine, provide, total;
  std::size_t diverged = 0;
  std::size_t compared = 0;

  void add(BenchReport& report, const std::vector<StepRecord>& records, const std::vector<Valuation>& reference,
           std::size_t repeat, std::uint64_t seed) {
    for (const auto& r : records) {
      partition.push_back(r.partition_us);
      machine.push_back(r.machine_us);
      provide.push_back(r.provide_us);
      total.push_back(r.partition_us + r.machine_us + r.provide_us);
      bool d = false;
      if (r.index < reference.size()) {
        d = reference[r.index] != r.v_y;
        ++compared;
        diverged += d ? 1 : 0;
      }
      report.rows.push_back({repeat, r.index, "provider", r.provide_us, seed, d});
    }
  }

  void finish(BenchReport& report) const {
    report.partitioner = stats_of(partition);
    report.machine = stats_of(machine);
    report.provider = stats_of(provide);
    report.total = stats_of(total);
    report.divergence_pct = compared ? 100.0 * static_cast<double>(diverged) / static_cast<double>(compared) : 0.0;
  }
};

}  // namespace

std::vector<Valuation> output_trace(const std::vector<StepRecord>& records) {
  std::vector<Valuation> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.v_y);
  return out;
}

BenchReport bench_static(const BooleanSpec& bspec, const MealyMachine& machine,
                         std::shared_ptr<const StaticProvider> provider, const std::vector<Valuation>& inputs,
                         const std::vector<Valuation>& reference, const BenchOptions& options) {
  BenchReport report;
  report.kind = options.gamma ? ProviderKind::Adaptive : ProviderKind::Static;
  report.steps = inputs.size();
  report.repeats = options.repeats;
  report.seeds.assign(options.repeats, 0);
  TheoryController ctl(bspec, machine, provider, options.gamma);
  Collector c;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    ctl.reset();
    c.add(report, ctl.run_trace(inputs, options.external_z), reference, r, 0);
  }
  c.finish(report);
  return report;
}

BenchReport bench_dynamic(const BooleanSpec& bspec, const MealyMachine& machine, const std::vector<Valuation>& inputs,
                          const std::vector<Valuation>& reference, const BenchOptions& options) {
  BenchReport report;
  report.kind = ProviderKind::Dynamic;
  report.steps = inputs.size();
  report.repeats = options.repeats;
  Collector c;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    DynamicOptions dyn = options.dynamic;
    std::uint64_t seed = 0;
    if (options.seed) {
      seed = *options.seed + r;
      dyn.seed = seed;
    }
    report.seeds.push_back(seed);
    auto provider = std::make_shared<DynamicProvider>(bspec.table, options.gamma, dyn);
    TheoryController ctl(bspec, machine, provider, options.gamma);
    c.add(report, ctl.run_trace(inputs, options.external_z), reference, r, seed);
  }
  c.finish(report);
  return report;
}

double BenchComparison::provider_ratio() const {
  return dynamic_report.provider.mean > 0 ? static_report.provider.mean / dynamic_report.provider.mean : 0.0;
}

BenchComparison bench_compare(const BooleanSpec& bspec, const MealyMachine& machine,
                              std::shared_ptr<const StaticProvider> provider, const std::vector<Valuation>& inputs,
                              const BenchOptions& options) {
  TheoryController ref(bspec, machine, provider, options.gamma);
  auto reference = output_trace(ref.run_trace(inputs, options.external_z));
  BenchComparison out;
  out.static_report = bench_static(bspec, machine, provider, inputs, reference, options);
  out.dynamic_report = bench_dynamic(bspec, machine, inputs, reference, options);
  return out;
}

std::string BenchReport::summary() const {
  std::ostringstream os;
  os << "provider=" << to_string(kind) << " steps=" << steps << " repeats=" << repeats;
  auto line = [&](const char* name, const ComponentStats& s) {
    os << "\n  " << name << ": mean=" << s.mean << "us p50=" << s.p50 << "us p95=" << s.p95 << "us";
  };
  line("partitioner", partitioner);
  line("machine", machine);
  line("provider", provider);
  line("total", total);
  os << "\n  divergence=" << divergence_pct << "% vs " << reference;
  if (!seeds.empty() && kind == ProviderKind::Dynamic) {
    os << "\n  seeds=";
    for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
  }
  return os.str();
}

std::string bench_csv(const std::vector<const BenchReport*>& reports) {
  std::ostringstream os;
  os << "step,component,micros,provider_kind,seed,diverged\n";
  for (const auto* rep : reports)
    for (const auto& row : rep->rows)
      os << row.step << ',' << row.component << ',' << row.micros << ',' << to_string(rep->kind) << ','
         << row.seed << ',' << (row.diverged ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace modsynth
