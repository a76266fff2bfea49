#pragma once

// Rewrite systems, matching, innermost rewriting, derivation heights and the
// completion of a system by garbage rules s -> bot.

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spop/term.hpp"

namespace spop {

struct Rule {
  Term lhs;
  Term rhs;
};

/// Partial map from variables to terms.
class Substitution {
 public:
  const Term* find(VarId x) const;
  /// Binds x to t unless x is bound to something else; returns false then.
  bool bind(VarId x, const Term& t);
  std::size_t size() const noexcept { return bindings_.size(); }
  const std::vector<std::pair<VarId, Term>>& bindings() const noexcept { return bindings_; }

 private:
  std::vector<std::pair<VarId, Term>> bindings_;
};

/// Syntactic matching: extends `sigma` so that pattern·sigma = t.
bool match(const Term& pattern, const Term& t, Substitution& sigma);
/// Unbound variables are left in place.
Term substitute(const Term& t, const Substitution& sigma);

class Trs {
 public:
  Trs() = default;
  /// Validates arities, non-variable left-hand sides and vars(rhs) ⊆ vars(lhs).
  Trs(Signature signature, std::vector<Rule> rules);

  const Signature& signature() const noexcept { return signature_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }
  /// Indices of the rules whose left-hand side has root f.
  const std::vector<std::size_t>& rules_for(SymbolId f) const;

  bool is_defined(SymbolId f) const { return index_of(f) < defined_.size() && defined_[index_of(f)]; }
  bool is_constructor(SymbolId f) const { return !is_defined(f); }
  /// Defined symbols in order of first appearance in the rules.
  const std::vector<SymbolId>& defined_symbols() const noexcept { return defined_order_; }
  std::vector<SymbolId> constructors() const;

  /// Normal/safe splits written inline in the source, if any.
  std::optional<PositionMask> declared_split(SymbolId f) const;
  void declare_split(SymbolId f, PositionMask normal);
  bool has_declared_splits() const noexcept { return !splits_.empty(); }

  std::size_t max_rhs_size() const;

  /// Adds a symbol that no rule defines.
  SymbolId add_constructor(std::string_view name, std::size_t arity);

 private:
  Signature signature_;
  std::vector<Rule> rules_;
  std::vector<bool> defined_;
  std::vector<SymbolId> defined_order_;
  std::vector<std::vector<std::size_t>> by_root_;
  std::unordered_map<std::uint32_t, PositionMask> splits_;
};

bool is_constructor_trs(const Trs& trs);
bool is_left_linear(const Trs& trs);
/// No defined symbol occurs (variables are allowed).
bool is_value(const Trs& trs, const Term& t);
/// f(v1..vn) with f defined and all vi values.
bool is_basic(const Trs& trs, const Term& t);

/// True when no rule applies at the root of t.
bool root_normal(const Trs& trs, const Term& t);
bool is_normal_form(const Trs& trs, const Term& t);

/// All t' with t ->i t', deduplicated, in position-then-rule order.
std::vector<Term> innermost_successors(const Trs& trs, const Term& t);

inline constexpr std::size_t default_fuel = 1'000'000;

/// Maximal length of an innermost derivation from t. Throws FuelExceeded
/// when a rewrite cycle is found or the budget of work/steps runs out.
std::size_t derivation_height(const Trs& trs, const Term& t, std::size_t fuel = default_fuel);

/// Leftmost-innermost normal form; throws FuelExceeded after `fuel` steps.
Term normal_form(const Trs& trs, const Term& t, std::size_t fuel = default_fuel);

enum class Definedness { complete, incomplete, unknown };

struct DefinednessReport {
  Definedness status = Definedness::unknown;
  /// For `incomplete`: a basic pattern that no rule covers.
  std::optional<Term> uncovered;
};

/// Whether every ground basic term is reducible. Decided by pattern coverage
/// for left-linear constructor systems, `unknown` otherwise.
DefinednessReport is_completely_defined(const Trs& trs);

inline constexpr std::string_view bottom_name = "bot";

/// Adds the constant `bot` to the signature (or returns it). Throws SignatureClash
/// when `bot` exists with another arity or is defined by a rule.
SymbolId ensure_bottom(Trs& trs);

/// Replaces, bottom-up, every subterm that is a normal form with a defined
/// root by `bot`. Redexes are left in place.
Term normalize_with_garbage(const Trs& trs, const Term& t, SymbolId bot);

/// Innermost successors in the system extended by all garbage rules s -> bot.
std::vector<Term> garbage_innermost_successors(const Trs& trs, const Term& t, SymbolId bot);

}  // namespace spop
