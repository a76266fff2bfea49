#pragma once

// Text formats: rewrite systems, terms, certificates and B_wsc programs.
//
// Rewrite systems:
//
//   (VAR x y)
//   (RULES
//     plus(Z, y) -> y
//     plus(S(;x); y) -> S(;plus(x; y))
//   )
//
// A `;` inside an argument list declares the split of that symbol: the
// arguments left of it are normal. `#` starts a line comment and
// `(COMMENT ...)` blocks are skipped.
//
// Certificates, one section per line, in this order:
//
//   precedence: square > times > plus > S ~ Z
//   recursive: plus times
//   safe: plus 2
//   variant: spop
//
// `precedence` lists classes from highest to lowest, members joined by `~`.
// `safe` lists, per defined symbol, its safe positions (1-based), entries
// separated by `;`; positions not listed are normal. Constructors left out
// of `precedence` join its lowest constructor class.
//
// B_wsc programs:
//
//   def append0 = WSC(1,2; S0; []; [I(1,2,3)])
//   def main = SRN(I(0,1,1), append0, append0)
//
// with O(k,l), I(k,l,j), P, C, S0, S1, WSC(k,l; h; [i..]; [g..]),
// SRN(g, h0, h1) and SRNPS(g, h0, h1; [p..]). The last definition is the
// program's entry point.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spop/bwsc.hpp"
#include "spop/orders.hpp"
#include "spop/rewriting.hpp"

namespace spop {

/// Throws ParseError (with line and column) on malformed input.
Trs parse_trs(std::string_view text);
std::string print_trs(const Trs& trs);

/// Ground or open term over the symbols of `sig`; `f^n(t)` stands for n
/// applications of f when `n` is given, and `f^3(t)` is always accepted.
/// Semicolons are accepted and ignored. Throws ParseError.
Term parse_term(std::string_view text, const Signature& sig, std::optional<std::size_t> n = std::nullopt);

/// Throws ParseError, also when the safe positions disagree with splits
/// written inline in the system.
Certificate parse_certificate(std::string_view text, const Trs& trs);
std::string print_certificate(const Signature& sig, const Certificate& cert);

struct BwscProgram {
  std::vector<std::pair<std::string, BwscExpr>> definitions;

  const BwscExpr& main() const { return definitions.back().second; }
  const BwscExpr* find(std::string_view name) const;
};

/// Throws ParseError, including for ill-formed arities.
BwscProgram parse_bwsc_program(std::string_view text);

}  // namespace spop
