#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modsynth/artifacts.hpp"
#include "modsynth/bench.hpp"
#include "modsynth/errors.hpp"
#include "modsynth/game.hpp"
#include "modsynth/runtime.hpp"

using namespace modsynth;

namespace {

struct DomainFailure {
  std::string component;
  std::string message;
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content;
  else write_file(path, content);
}

std::optional<Sort> theory_of(const std::string& t) {
  if (t.empty()) return std::nullopt;
  return parse_sort(t);
}

std::vector<std::pair<std::size_t, Choice>> machine_pairs(const MealyMachine& m) {
  std::vector<std::pair<std::size_t, Choice>> out;
  for (const auto& t : m.transitions) out.emplace_back(t.letter, t.output);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Inputs {
  std::vector<Valuation> x;
  std::vector<Valuation> z;
};

Inputs load_inputs(const std::string& path, const LtlTSpec& spec, const AdaptiveDescription* gamma) {
  Inputs in;
  for (auto& t : read_inputs(read_file(path), spec, gamma)) {
    in.x.push_back(std::move(t.x));
    in.z.push_back(std::move(t.z));
  }
  return in;
}

struct Pipeline {
  BooleanSpec bspec;
  MealyMachine machine;
  std::optional<AdaptiveDescription> gamma;
  std::shared_ptr<const StaticProvider> static_provider;
};

Pipeline load_pipeline(const std::string& abstraction, const std::string& mealy, const std::string& gamma_path,
                       const std::string& provider_path) {
  Pipeline p{read_abstraction(read_file(abstraction)), {}, std::nullopt, nullptr};
  p.machine = import_mealy(read_file(mealy), p.bspec);
  if (!provider_path.empty()) {
    p.static_provider = std::make_shared<const StaticProvider>(read_provider(read_file(provider_path), p.bspec));
    p.gamma = p.static_provider->gamma();
  } else if (!gamma_path.empty()) {
    p.gamma = read_gamma(read_file(gamma_path), p.bspec);
  }
  if (!p.static_provider)
    p.static_provider = std::make_shared<const StaticProvider>(p.bspec.table, p.gamma, SynthesisMode::Lazy);
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesis of reactive controllers for LTL modulo theories"};
  app.require_subcommand(1);

  std::string theory;
  std::string out_path;

  auto* abstract = app.add_subcommand("abstract", "Booleanize a specification");
  std::string spec_path;
  abstract->add_option("spec", spec_path, "specification file")->required()->check(CLI::ExistingFile);
  abstract->add_option("--theory", theory, "override variable sorts")->check(CLI::IsMember({"int", "real"}));
  abstract->add_option("-o,--output", out_path, "abstraction artifact");

  auto* synth = app.add_subcommand("synth", "Solve the Boolean game");
  std::string abstraction_path, import_path;
  synth->add_option("abstraction", abstraction_path)->required()->check(CLI::ExistingFile);
  synth->add_option("--import", import_path, "use an external Mealy machine")->check(CLI::ExistingFile);
  synth->add_option("-o,--output", out_path, "Mealy machine artifact");

  auto* skolem = app.add_subcommand("skolem", "Synthesize the static provider");
  std::string mealy_path, gamma_path;
  skolem->add_option("abstraction", abstraction_path)->required()->check(CLI::ExistingFile);
  skolem->add_option("mealy", mealy_path)->required()->check(CLI::ExistingFile);
  skolem->add_option("--gamma", gamma_path, "adaptive description")->check(CLI::ExistingFile);
  skolem->add_option("-o,--output", out_path, "provider artifact");

  auto* emit_c = app.add_subcommand("emit-c", "Emit C source for a provider");
  std::string provider_path;
  emit_c->add_option("abstraction", abstraction_path)->required()->check(CLI::ExistingFile);
  emit_c->add_option("provider", provider_path)->required()->check(CLI::ExistingFile);
  emit_c->add_option("-o,--output", out_path, "C source file");

  std::string inputs_path, provider_kind = "static", csv_path;
  std::optional<std::uint64_t> seed;
  std::size_t repeats = 1;
  auto* run = app.add_subcommand("run", "Execute the controller on an input trace");
  auto* bench = app.add_subcommand("bench", "Compare static and dynamic providers");
  for (auto* sub : {run, bench}) {
    sub->add_option("abstraction", abstraction_path)->required()->check(CLI::ExistingFile);
    sub->add_option("mealy", mealy_path)->required()->check(CLI::ExistingFile);
    sub->add_option("inputs", inputs_path, "input trace, one JSON object per line")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--provider-file", provider_path, "provider artifact")->check(CLI::ExistingFile);
    sub->add_option("--gamma", gamma_path, "adaptive description")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed for the randomized dynamic provider");
  }
  run->add_option("--provider", provider_kind)->check(CLI::IsMember({"static", "dynamic", "adaptive"}));
  run->add_option("-o,--output", out_path, "output records");
  bench->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  bench->add_option("--csv", csv_path, "per-step timing series");

  auto* check = app.add_subcommand("check", "Check a trace against a specification");
  std::string records_path;
  check->add_option("spec", spec_path)->required()->check(CLI::ExistingFile);
  check->add_option("records", records_path)->required()->check(CLI::ExistingFile);
  check->add_option("--theory", theory)->check(CLI::IsMember({"int", "real"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*abstract) {
      auto spec = parse_spec(read_file(spec_path), theory_of(theory));
      auto bspec = booleanize(spec);
      emit(out_path, write_abstraction(bspec));
      std::cerr << bspec.table.entries.size() << " valid reactions over " << bspec.table.literal_count()
                << " literals\n";
    } else if (*synth) {
      auto bspec = read_abstraction(read_file(abstraction_path));
      MealyMachine m;
      if (!import_path.empty()) {
        m = import_mealy(read_file(import_path), bspec);
      } else {
        auto result = solve_and_extract(build_game(bspec));
        if (!result.realizable()) {
          std::string w;
          for (const auto& l : result.witness) w += (w.empty() ? "" : " ") + l;
          throw DomainFailure{"game", "unrealizable; environment wins along: " + w};
        }
        m = *result.machine;
      }
      emit(out_path, export_mealy(m));
      std::cerr << "realizable: " << m.states << " states\n";
    } else if (*skolem) {
      auto bspec = read_abstraction(read_file(abstraction_path));
      auto m = import_mealy(read_file(mealy_path), bspec);
      std::optional<AdaptiveDescription> gamma;
      if (!gamma_path.empty()) gamma = read_gamma(read_file(gamma_path), bspec);
      StaticProvider provider(bspec.table, gamma, SynthesisMode::Eager, machine_pairs(m));
      emit(out_path, write_provider(provider, bspec));
    } else if (*emit_c) {
      auto bspec = read_abstraction(read_file(abstraction_path));
      auto provider = read_provider(read_file(provider_path), bspec);
      std::string src = "#include <stdint.h>\n";
      for (const auto& e : provider.entries())
        src += "\n" + emit_source(*e.function, "provide_" + bspec.table.entries[e.letter].letter + "_c" +
                                                   std::to_string(choice_index(e.choice, bspec.table.literal_count())));
      emit(out_path, src);
    } else if (*run) {
      auto p = load_pipeline(abstraction_path, mealy_path, gamma_path, provider_path);
      if (provider_kind == "adaptive" && !p.gamma) throw CLI::ValidationError("--provider adaptive needs --gamma");
      auto in = load_inputs(inputs_path, p.bspec.spec, p.gamma ? &*p.gamma : nullptr);
      ProviderHandle handle = p.static_provider;
      if (provider_kind == "dynamic") {
        DynamicOptions opts;
        opts.seed = seed;
        handle = std::make_shared<DynamicProvider>(p.bspec.table, p.gamma, opts);
      }
      TheoryController ctl(p.bspec, p.machine, handle, p.gamma);
      auto records = ctl.run_trace(in.x, in.z);
      emit(out_path, write_records(records, p.bspec));
      auto report = check_trace(p.bspec.spec, records);
      std::cerr << report.summary() << "\n";
      if (!report.ok()) return 1;
    } else if (*bench) {
      auto p = load_pipeline(abstraction_path, mealy_path, gamma_path, provider_path);
      auto in = load_inputs(inputs_path, p.bspec.spec, p.gamma ? &*p.gamma : nullptr);
      BenchOptions opts;
      opts.repeats = repeats;
      opts.seed = seed;
      opts.gamma = p.gamma;
      opts.external_z = in.z;
      auto cmp = bench_compare(p.bspec, p.machine, p.static_provider, in.x, opts);
      std::cout << cmp.static_report.summary() << "\n" << cmp.dynamic_report.summary() << "\n"
                << "provider ratio static/dynamic=" << cmp.provider_ratio() << "\n";
      if (!csv_path.empty()) write_file(csv_path, bench_csv({&cmp.static_report, &cmp.dynamic_report}));
    } else if (*check) {
      auto spec = parse_spec(read_file(spec_path), theory_of(theory));
      auto file = read_records(read_file(records_path), spec);
      auto report = check_trace(spec, file.records, file.has_choices);
      std::cout << report.summary() << "\n";
      if (!report.ok()) return 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const DomainFailure& e) {
    std::cerr << "error [" << e.component << "]: " << e.message << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error [" << e.component() << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
