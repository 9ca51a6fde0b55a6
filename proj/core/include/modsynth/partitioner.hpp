#pragma once

// Maps concrete environment inputs to the letter of their valid reaction.

#include <string>
#include <vector>

#include "modsynth/booleanizer.hpp"

namespace modsynth {

class CompiledPartitioner {
 public:
  CompiledPartitioner() = default;
  CompiledPartitioner(std::vector<std::string> letters, std::vector<Formula> regions)
      : letters_(std::move(letters)), regions_(std::move(regions)) {}

  const std::vector<std::string>& letters() const { return letters_; }
  const std::vector<Formula>& regions() const { return regions_; }

  /// Index of the unique region holding v_x. Throws NoRegion / MultiRegion.
  std::size_t partition(const Valuation& v_x) const;

 private:
  std::vector<std::string> letters_;
  std::vector<Formula> regions_;
};

CompiledPartitioner compile_partitioner(const ValidReactionTable& table);

/// The uncompiled path: for each entry, decides validity of the quantified
/// reaction formula at v_x.
std::size_t partition_by_validity(const ValidReactionTable& table, const Valuation& v_x);

}  // namespace modsynth
