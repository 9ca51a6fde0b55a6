#pragma once

// Independent reference semantics for tests: a small int64 formula AST with
// bounded quantifiers, a random generator, and rendering to parser syntax.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Env = std::map<std::string, std::int64_t>;

struct Expr {
  std::map<std::string, std::int64_t> coeffs;
  std::int64_t constant = 0;

  std::int64_t eval(const Env& env) const;
  std::string render() const;
};

enum class Op { Le, Lt, Eq, Ne, Ge, Gt };

struct Node {
  enum class Kind { True, False, Atom, Not, And, Or, Exists, Forall };
  Kind kind = Kind::True;
  Expr lhs, rhs;
  Op op = Op::Le;
  std::vector<Node> kids;
  std::string var;
  std::int64_t lo = 0, hi = 0;  // quantifier range, relativized in the rendering
};

bool eval(const Node& n, Env& env);
std::string render(const Node& n);

struct GenOptions {
  std::vector<std::string> free_vars;
  int max_quantifiers = 2;
  int prefix_quantifiers = 0;  // forced at the root, counted in max_quantifiers
  int max_depth = 3;
  std::int64_t coeff_range = 5;
  std::int64_t quant_lo = -60, quant_hi = 60;
};

Node random_formula(std::mt19937_64& rng, const GenOptions& opt);

// All assignments of vars over [lo, hi]^n.
template <typename Fn>
void for_each_point(const std::vector<std::string>& vars, std::int64_t lo, std::int64_t hi, Fn&& fn) {
  Env env;
  for (const auto& v : vars) env[v] = lo;
  if (vars.empty()) {
    fn(env);
    return;
  }
  while (true) {
    fn(env);
    std::size_t i = 0;
    while (i < vars.size()) {
      if (env[vars[i]] < hi) {
        ++env[vars[i]];
        break;
      }
      env[vars[i]] = lo;
      ++i;
    }
    if (i == vars.size()) return;
  }
}

}  // namespace oracle
