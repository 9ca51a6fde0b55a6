#pragma once

// Infix text syntax for formulas and linear terms.
//
//   formula := formula "<->" formula | formula "->" formula
//            | formula "||" formula | formula "&&" formula
//            | "!" formula | "(" formula ")" | "true" | "false"
//            | ("forall" | "exists") ident ":" sort "." formula
//            | expr rel expr | "divides" "(" k "," expr ")"
//   rel     := "<" | "<=" | "=" | "!=" | ">=" | ">"
//
// Literals are integers, decimals or p/q (parsed as a constant division).

#include <string_view>

#include "modsynth/logic.hpp"

namespace modsynth {

/// Parses and normalizes a formula. Every free variable must appear in
/// `sorts`; bound variables are alpha-renamed apart.
Formula parse_formula(std::string_view text, const SortContext& sorts);

LinearTerm parse_term(std::string_view text, const SortContext& sorts);

}  // namespace modsynth
