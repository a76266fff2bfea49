#pragma once

// Terms over a finite signature, argument tiering (normal/safe), precedences,
// and the structural relations every order in this library builds on.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spop {

enum class SymbolId : std::uint32_t {};
enum class VarId : std::uint32_t {};

constexpr std::uint32_t index_of(SymbolId f) noexcept { return static_cast<std::uint32_t>(f); }
constexpr std::uint32_t index_of(VarId x) noexcept { return static_cast<std::uint32_t>(x); }

enum class SymbolKind : std::uint8_t { constructor, recursive, compositional };

std::string_view to_string(SymbolKind kind);

/// Bit i set means argument position i (0-based) is normal.
using PositionMask = std::uint64_t;
inline constexpr std::size_t max_arity = 64;

struct SymbolInfo {
  std::string name;
  std::size_t arity = 0;
};

/// Function symbols and variable names. Ids are dense and stable.
class Signature {
 public:
  /// Returns the existing id when `name` is already present with the same
  /// arity; throws SignatureClash when the arity differs.
  SymbolId add_symbol(std::string_view name, std::size_t arity);
  std::optional<SymbolId> find_symbol(std::string_view name) const;

  VarId add_variable(std::string_view name);
  std::optional<VarId> find_variable(std::string_view name) const;

  const SymbolInfo& symbol(SymbolId f) const { return symbols_.at(index_of(f)); }
  const std::string& name(SymbolId f) const { return symbol(f).name; }
  std::size_t arity(SymbolId f) const { return symbol(f).arity; }
  const std::string& variable_name(VarId x) const { return variables_.at(index_of(x)); }

  std::size_t symbol_count() const noexcept { return symbols_.size(); }
  std::size_t variable_count() const noexcept { return variables_.size(); }

 private:
  std::vector<SymbolInfo> symbols_;
  std::vector<std::string> variables_;
  std::unordered_map<std::string, SymbolId> symbol_index_;
  std::unordered_map<std::string, VarId> variable_index_;
};

/// Immutable first-order term with shared structure. Copies are cheap;
/// size, depth and hash are cached at construction.
class Term {
 public:
  static Term variable(VarId x);
  static Term apply(SymbolId f, std::vector<Term> args = {});

  bool is_variable() const noexcept;
  VarId var() const;
  SymbolId symbol() const;
  std::span<const Term> args() const noexcept;
  const Term& arg(std::size_t i) const { return args()[i]; }
  std::size_t arity() const noexcept { return args().size(); }

  std::size_t size() const noexcept;
  /// 0 for variables and constants, otherwise 1 + max argument depth.
  std::size_t depth() const noexcept;
  std::size_t hash() const noexcept;

  bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b) noexcept;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) noexcept;

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

/// Every subterm of t (including t), pre-order, duplicates kept.
std::vector<Term> subterms(const Term& t);
bool occurs_symbol(const Term& t, const std::function<bool(SymbolId)>& pred);
void collect_variables(const Term& t, std::vector<VarId>& out);

/// Kinds and normal-argument positions of every symbol.
class Tiering {
 public:
  Tiering() = default;
  explicit Tiering(std::size_t symbol_count)
      : kinds_(symbol_count, SymbolKind::constructor), normal_(symbol_count, 0) {}

  std::size_t symbol_count() const noexcept { return kinds_.size(); }

  SymbolKind kind(SymbolId f) const { return kinds_.at(index_of(f)); }
  void set_kind(SymbolId f, SymbolKind k) { kinds_.at(index_of(f)) = k; }
  bool is_defined(SymbolId f) const { return kind(f) != SymbolKind::constructor; }
  bool is_recursive(SymbolId f) const { return kind(f) == SymbolKind::recursive; }

  PositionMask normal_mask(SymbolId f) const { return normal_.at(index_of(f)); }
  void set_normal_mask(SymbolId f, PositionMask m) { normal_.at(index_of(f)) = m; }
  bool is_normal(SymbolId f, std::size_t pos) const { return (normal_mask(f) >> pos) & 1u; }
  std::size_t normal_count(SymbolId f) const;

  friend bool operator==(const Tiering&, const Tiering&) = default;

 private:
  std::vector<SymbolKind> kinds_;
  std::vector<PositionMask> normal_;
};

/// A total preorder on symbols given as an ordered partition. Level 0 is
/// the lowest class; a negative level marks a symbol outside the order.
class Precedence {
 public:
  Precedence() = default;

  /// Classes listed highest first; every symbol must occur exactly once.
  static Precedence from_classes(std::size_t symbol_count,
                                 const std::vector<std::vector<SymbolId>>& highest_first);
  /// Levels need not be contiguous; they are compressed.
  static Precedence from_levels(std::vector<int> levels);

  std::size_t symbol_count() const noexcept { return level_.size(); }
  int level(SymbolId f) const { return level_.at(index_of(f)); }
  bool contains(SymbolId f) const { return level(f) >= 0; }

  /// f ≻ g
  bool greater(SymbolId f, SymbolId g) const {
    return contains(f) && contains(g) && level(f) > level(g);
  }
  /// f ~ g
  bool equivalent(SymbolId f, SymbolId g) const {
    return f == g || (contains(f) && level(f) == level(g));
  }

  std::size_t class_count() const noexcept { return class_count_; }
  /// Classes, highest first, members in id order.
  std::vector<std::vector<SymbolId>> classes() const;

  friend bool operator==(const Precedence&, const Precedence&) = default;

 private:
  std::vector<int> level_;
  std::size_t class_count_ = 0;
};

/// rk(f) = 1 + max{ rk(g) | f ≻ g }, with max ∅ = 0.
std::size_t rank(const Precedence& prec, SymbolId f);

/// rd(f) = [f recursive] + max{ rd(g) | f ≻ g }.
std::size_t recursion_depth(const Precedence& prec, const Tiering& tiers, SymbolId f);

/// s ≈ t: equal up to ~ on root symbols and argument permutation.
bool equivalent(const Precedence& prec, const Term& s, const Term& t);

/// s ≈_s t: like `equivalent`, but permutations keep normal and safe
/// positions apart.
bool safe_equivalent(const Precedence& prec, const Tiering& tiers, const Term& s, const Term& t);

/// s ⊳_n t: t is ≈_s-equivalent to a proper subterm of s reached through
/// normal positions of defined symbols only.
bool normal_subterm_gt(const Precedence& prec, const Tiering& tiers, const Term& s, const Term& t);

/// Canonical string of the ≈-class of t (string equality iff equivalent).
std::string canonical_form(const Precedence& prec, const Term& t);
/// Canonical string of the ≈_s-class of t.
std::string safe_canonical_form(const Precedence& prec, const Tiering& tiers, const Term& t);

/// Prints `f(a, b)`; with tiers, prefix-shaped splits print as `f(a; b)`.
std::string to_string(const Signature& sig, const Term& t, const Tiering* tiers = nullptr);

}  // namespace spop
