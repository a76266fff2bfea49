#pragma once

// Fixtures and random generators shared by the test suites.

#include <fstream>
#include <map>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "spop/formats.hpp"
#include "spop/orders.hpp"
#include "spop/rewriting.hpp"
#include "spop/term.hpp"

namespace fixtures {

inline const char* square_text = R"(
(VAR x y)
(RULES
  plus(Z; y) -> y
  plus(S(;x); y) -> S(;plus(x; y))
  times(Z, y;) -> Z
  times(S(;x), y;) -> plus(y; times(x, y;))
  square(x;) -> times(x, x;)
)
)";

inline const char* square_cert_text = R"(precedence: square > times > plus > S ~ Z
recursive: plus times
safe: plus 2
variant: spop
)";

inline const char* rev_text = R"(
(VAR x xs ys)
(RULES
  rev(xs) -> rev'(xs, nil)
  rev'(nil, ys) -> ys
  rev'(cons(x, xs), ys) -> rev'(xs, cons(x, ys))
)
)";

inline const char* rev_ps_cert_text = R"(precedence: rev > rev' > cons ~ nil
recursive: rev'
safe: rev' 2
variant: spop_ps
)";

#ifdef SPOP_CORPUS_DIR
inline std::string corpus(const std::string& name) {
  std::ifstream in(std::string(SPOP_CORPUS_DIR) + "/" + name);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}
#endif

inline spop::Trs square() { return spop::parse_trs(square_text); }
inline spop::Trs rev() { return spop::parse_trs(rev_text); }

inline spop::Certificate square_cert(const spop::Trs& trs) { return spop::parse_certificate(square_cert_text, trs); }
inline spop::Certificate rev_ps_cert(const spop::Trs& trs) { return spop::parse_certificate(rev_ps_cert_text, trs); }

inline spop::Term term(const spop::Trs& trs, const std::string& text) { return spop::parse_term(text, trs.signature()); }

inline spop::SymbolId sym(const spop::Trs& trs, const std::string& name) { return *trs.signature().find_symbol(name); }

/// S^n(Z) in R_square.
inline spop::Term numeral(const spop::Trs& trs, std::size_t n) {
  return spop::parse_term("S^n(Z)", trs.signature(), n);
}

/// Every value over Z, S of depth at most d.
inline std::vector<spop::Term> numerals_up_to(const spop::Trs& trs, std::size_t d) {
  std::vector<spop::Term> out;
  for (std::size_t n = 0; n <= d; ++n) out.push_back(numeral(trs, n));
  return out;
}

}  // namespace fixtures

namespace gen {

using Rng = std::mt19937_64;

struct Sym {
  spop::SymbolId id;
  std::size_t arity;
};

/// Random term of depth at most `depth`; leaves are constants or variables.
inline spop::Term term(Rng& rng, const std::vector<Sym>& syms, const std::vector<spop::VarId>& vars,
                       std::size_t depth) {
  std::vector<Sym> leaves, inner;
  for (const Sym& s : syms) (s.arity == 0 ? leaves : inner).push_back(s);
  const std::size_t leaf_choices = leaves.size() + vars.size();
  const bool leaf = depth == 0 || inner.empty() || (leaf_choices > 0 && rng() % 3 == 0);
  if (leaf) {
    const std::size_t i = rng() % leaf_choices;
    if (i < leaves.size()) return spop::Term::apply(leaves[i].id);
    return spop::Term::variable(vars[i - leaves.size()]);
  }
  const Sym& s = inner[rng() % inner.size()];
  std::vector<spop::Term> args;
  for (std::size_t i = 0; i < s.arity; ++i) args.push_back(term(rng, syms, vars, depth - 1));
  return spop::Term::apply(s.id, std::move(args));
}

/// Random admissible total preorder: constructors in the lowest class,
/// defined symbols on levels above, equal levels only for equal kinds.
inline spop::Precedence precedence(Rng& rng, const spop::Tiering& tiers) {
  const std::size_t n = tiers.symbol_count();
  std::vector<int> levels(n, 0);
  std::map<int, spop::SymbolKind> level_kind;
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = static_cast<spop::SymbolId>(i);
    if (!tiers.is_defined(f)) continue;
    int l = 1 + static_cast<int>(rng() % n);
    // Equal levels must carry equal kinds; move up until that holds.
    while (level_kind.count(l) && level_kind[l] != tiers.kind(f)) ++l;
    level_kind[l] = tiers.kind(f);
    levels[i] = l;
  }
  return spop::Precedence::from_levels(levels);
}

}  // namespace gen
