#pragma once

// Search for a certificate (precedence, symbol kinds, normal/safe split)
// under which a constructor system is compatible, with minimal degree.

#include <chrono>
#include <cstddef>
#include <optional>
#include <vector>

#include "spop/orders.hpp"
#include "spop/rewriting.hpp"

namespace spop {

struct SearchBudget {
  /// Search nodes (partial assignments) visited over all degrees.
  std::size_t max_candidates = 10'000'000;
  std::chrono::milliseconds time_limit{60'000};
  std::size_t max_degree = 8;
};

struct SynthesisOptions {
  OrderOptions order;
  /// Ignore splits written inline in the system and search them as well.
  bool free_splits = false;
  Execution exec = Execution::parallel;
};

/// One iterative-deepening round.
struct SearchLevel {
  std::size_t degree = 0;
  std::size_t candidates = 0;
  /// The round visited its whole space without finding a certificate.
  bool exhausted = false;
};

struct SynthesisResult {
  std::optional<Certificate> certificate;
  std::optional<DegreeReport> report;
  /// Without a certificate: true when the budget ran out, false when the
  /// whole space up to the degree limit was refuted.
  bool budget_exhausted = false;
  std::size_t candidates = 0;
  std::vector<SearchLevel> levels;

  explicit operator bool() const noexcept { return certificate.has_value(); }
};

/// Iterative deepening on the degree; within a degree the first assignment
/// in a fixed order wins, so results are reproducible. Throws Error for
/// systems that are not constructor systems or for a non-positive budget.
SynthesisResult synthesize(const Trs& trs, Variant variant, const SearchBudget& budget = {},
                           const SynthesisOptions& options = {});

/// R_d: f_0(x;) -> a, and for each level i+1 the rules
/// f_{i+1}(x;) -> g_{i+1}(x,x;) and g_{i+1}(s(;x),y;) -> b(;f_i(y;), g_{i+1}(x,y;)).
/// Innermost derivations from f_d(s^n(a);) take at least n^d steps.
Trs gen_family(std::size_t d);

}  // namespace spop
