#pragma once

// JSON artifacts exchanged between the pipeline stages, and trace files
// (one JSON object per line).

#include <string>
#include <vector>

#include "modsynth/booleanizer.hpp"
#include "modsynth/provider.hpp"
#include "modsynth/runtime.hpp"

namespace modsynth {

std::string write_abstraction(const BooleanSpec& bspec);
/// Throws SchemaError.
BooleanSpec read_abstraction(const std::string& text);

std::string write_skolem(const SkolemFunction& f);
SkolemFunction read_skolem(const std::string& text);

/// Adaptive descriptions: z declarations plus constraints given either as
/// formulas or as shapes ("greatest", "least", "closest"). Letter and
/// choice may be "*" to cover every pair of the table.
AdaptiveDescription read_gamma(const std::string& text, const BooleanSpec& bspec);
std::string write_gamma(const AdaptiveDescription& gamma, const BooleanSpec& bspec);

std::string write_provider(const StaticProvider& provider, const BooleanSpec& bspec);
StaticProvider read_provider(const std::string& text, const BooleanSpec& bspec);

struct TraceInput {
  Valuation x;
  Valuation z;
};

/// Values are JSON integers or "p/q" strings.
std::vector<TraceInput> read_inputs(const std::string& text, const LtlTSpec& spec,
                                    const AdaptiveDescription* gamma = nullptr);

std::string write_records(const std::vector<StepRecord>& records, const BooleanSpec& bspec);

struct RecordFile {
  std::vector<StepRecord> records;
  bool has_choices = false;
};

RecordFile read_records(const std::string& text, const LtlTSpec& spec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace modsynth
