#pragma once

// Functions over binary words built from initial functions by weak safe
// composition and safe recursion on notation (optionally with parameter
// substitution), an evaluator, and a compiler to rewrite systems.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "spop/orders.hpp"
#include "spop/rewriting.hpp"

namespace spop {

/// A binary word; S_i(;x) is x followed by the digit i, so the last
/// character is the outermost successor.
using Word = std::string;

bool is_word(std::string_view text);

class BwscExpr {
 public:
  enum class Kind { zero, proj, pred, cond, succ0, succ1, wsc, srn, srn_ps };

  /// O^{k,l}: always ε.
  static BwscExpr zero(std::size_t k, std::size_t l);
  /// I^{k,l}_j with 1 ≤ j ≤ k + l.
  static BwscExpr proj(std::size_t k, std::size_t l, std::size_t j);
  static BwscExpr pred();
  static BwscExpr cond();
  static BwscExpr succ(int bit);
  /// f(x;y) = h(x_{i1}..x_{ik}; g1(x;y)..gm(x;y)) with f of arity (k, l);
  /// `selection` is 1-based.
  static BwscExpr wsc(std::size_t k, std::size_t l, BwscExpr h, std::vector<std::size_t> selection,
                      std::vector<BwscExpr> gs);
  static BwscExpr srn(BwscExpr g, BwscExpr h0, BwscExpr h1);
  /// Recursive calls take the safe arguments p1(z,x;y)..pl(z,x;y).
  static BwscExpr srn_ps(BwscExpr g, BwscExpr h0, BwscExpr h1, std::vector<BwscExpr> ps);

  Kind kind() const noexcept { return node_->kind; }
  std::size_t normal_arity() const noexcept { return node_->k; }
  std::size_t safe_arity() const noexcept { return node_->l; }
  /// Projection index (1-based).
  std::size_t index() const noexcept { return node_->j; }
  const std::vector<std::size_t>& selection() const noexcept { return node_->selection; }
  /// wsc: h, g1..gm. srn: g, h0, h1. srn_ps: g, h0, h1, p1..pl.
  const std::vector<BwscExpr>& children() const noexcept { return node_->children; }

  bool is_successor() const noexcept { return kind() == Kind::succ0 || kind() == Kind::succ1; }

 private:
  struct Node {
    Kind kind;
    std::size_t k = 0;
    std::size_t l = 0;
    std::size_t j = 0;
    std::vector<std::size_t> selection;
    std::vector<BwscExpr> children;
  };
  explicit BwscExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Evaluates e. Throws ArityMismatch on wrong argument counts, Error for a
/// bare successor or a non-binary word.
Word eval(const BwscExpr& e, const std::vector<Word>& normals, const std::vector<Word>& safes);

/// Largest number of recursion schemes on a path from the root.
std::size_t nesting_depth(const BwscExpr& e);

/// The syntax read by parse_bwsc_expr.
std::string to_string(const BwscExpr& e);

struct CompiledBwsc {
  Trs trs;
  Certificate certificate;
  SymbolId root{};
};

/// Emits one symbol and its defining rules per distinct sub-expression
/// over the constructors eps, S0, S1, with a certificate that puts every
/// scheme above its ingredients and makes the recursion schemes recursive.
/// Throws Error for a bare successor.
CompiledBwsc compile_to_trs(const BwscExpr& e);

Term encode_word(const Signature& sig, const Word& w);
/// Throws Error for terms that are not words.
Word decode_word(const Signature& sig, const Term& t);

}  // namespace spop
