#include <benchmark/benchmark.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "modsynth/game.hpp"
#include "modsynth/parse.hpp"
#include "modsynth/partitioner.hpp"
#include "modsynth/provider.hpp"
#include "modsynth/runtime.hpp"

using namespace modsynth;

namespace {

BooleanSpec load(const std::string& name) {
  std::ifstream in(std::string(MODSYNTH_SPECS_DIR) + "/" + name + ".spec");
  std::ostringstream ss;
  ss << in.rdbuf();
  return booleanize(parse_spec(ss.str()));
}

const BooleanSpec& running() {
  static const BooleanSpec b = load("running");
  return b;
}

Valuation input(long x) { return {{"x", Rational(x)}}; }

void BM_StaticProvide(benchmark::State& state) {
  const auto& b = running();
  StaticProvider p(b.table, std::nullopt, SynthesisMode::Eager);
  CompiledPartitioner part = compile_partitioner(b.table);
  long x = -50;
  for (auto _ : state) {
    Valuation v = input(x);
    std::size_t letter = part.partition(v);
    Choice c = b.table.entries[letter].reaction.front();
    benchmark::DoNotOptimize(p.provide(v, {}, letter, c));
    x = x == 50 ? -50 : x + 1;
  }
}
BENCHMARK(BM_StaticProvide);

void BM_DynamicProvide(benchmark::State& state) {
  const auto& b = running();
  DynamicProvider p(b.table);
  CompiledPartitioner part = compile_partitioner(b.table);
  long x = -50;
  for (auto _ : state) {
    Valuation v = input(x);
    std::size_t letter = part.partition(v);
    Choice c = b.table.entries[letter].reaction.front();
    benchmark::DoNotOptimize(p.provide(v, {}, letter, c));
    x = x == 50 ? -50 : x + 1;
  }
}
BENCHMARK(BM_DynamicProvide);

void BM_CompiledPartition(benchmark::State& state) {
  CompiledPartitioner part = compile_partitioner(running().table);
  long x = -50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(part.partition(input(x)));
    x = x == 50 ? -50 : x + 1;
  }
}
BENCHMARK(BM_CompiledPartition);

void BM_PartitionByValidity(benchmark::State& state) {
  const auto& table = running().table;
  long x = -50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition_by_validity(table, input(x)));
    x = x == 50 ? -50 : x + 1;
  }
}
BENCHMARK(BM_PartitionByValidity);

void BM_ControllerStep(benchmark::State& state) {
  const auto& b = running();
  auto machine = *solve_and_extract(build_game(b)).machine;
  auto p = std::make_shared<const StaticProvider>(b.table, std::nullopt, SynthesisMode::Eager);
  TheoryController ctl(b, machine, p);
  long x = -50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ctl.step(input(x)));
    x = x == 50 ? -50 : x + 1;
  }
}
BENCHMARK(BM_ControllerStep);

void BM_QeNested(benchmark::State& state) {
  SortContext sorts{{"x", Sort::Int}, {"y", Sort::Int}, {"z", Sort::Int}};
  Formula f = parse_formula("forall y:int. (y >= 0 && y <= 40 -> exists z:int. (3*z + x >= 2*y && 3*z + x <= 2*y + 2))", sorts);
  for (auto _ : state) benchmark::DoNotOptimize(eliminate_quantifiers(f));
}
BENCHMARK(BM_QeNested);

void BM_Booleanize(benchmark::State& state) {
  const std::string names[] = {"running", "syn_2_3", "syn_2_4", "syn_2_5", "syn_2_6"};
  const std::string name = names[state.range(0)];
  std::ifstream in(std::string(MODSYNTH_SPECS_DIR) + "/" + name + ".spec");
  std::ostringstream ss;
  ss << in.rdbuf();
  LtlTSpec spec = parse_spec(ss.str());
  for (auto _ : state) benchmark::DoNotOptimize(booleanize(spec));
  state.SetLabel(name);
}
BENCHMARK(BM_Booleanize)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
