#pragma once

// Predicative interpretation of terms as sequences of normalised terms, the
// approximated sequence order ⊳_k, the Slow_k measure, and checkers that run
// these against concrete rewrite systems.

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spop/orders.hpp"
#include "spop/rewriting.hpp"
#include "spop/term.hpp"

namespace spop {

/// A normalised term or a flat list of them. Normalised terms reuse Term:
/// a defined root keeps only its normal arguments.
class SeqTerm {
 public:
  static SeqTerm term(Term t);
  static SeqTerm list(std::vector<Term> elements = {});

  bool is_list() const noexcept { return is_list_; }
  /// Requires !is_list().
  const Term& as_term() const;
  /// A term is its own singleton.
  const std::vector<Term>& elements() const noexcept { return elements_; }
  bool empty() const noexcept { return elements_.empty(); }

  friend bool operator==(const SeqTerm&, const SeqTerm&) = default;

 private:
  bool is_list_ = true;
  std::vector<Term> elements_;
};

/// Concatenation; terms act as singleton lists. Always yields a list.
SeqTerm append(const SeqTerm& a, const SeqTerm& b);

/// Least set of terms containing the values and closed under f(s; t) with
/// values s at normal positions and members t at safe positions.
bool in_Tn(const Tiering& tiers, const Term& t);
bool in_Tn(const Trs& trs, const Certificate& cert, const Term& t);

/// The predicative interpretation. Throws NotInTn outside T_n.
SeqTerm interpret(const Tiering& tiers, const Term& t);
SeqTerm interpret(const Trs& trs, const Certificate& cert, const Term& t);

/// Symbols usable in normalised terms, with the arity they take there:
/// defined symbols with their normal arity, constructors with their full
/// arity (inside values) and with arity 0 (as interpreted roots).
using NormalizedSignature = std::vector<std::pair<SymbolId, std::size_t>>;
NormalizedSignature normalized_signature(const Signature& sig, const Tiering& tiers);

std::string to_string(const Signature& sig, const Tiering& tiers, const SeqTerm& a);

enum class SeqClause { equivalent, ia, ts, ialst, ms };
std::string_view to_string(SeqClause c);

struct SeqProof {
  SeqClause clause = SeqClause::equivalent;
  SeqTerm lhs;
  SeqTerm rhs;
  /// ts: lhs argument i is compared with rhs argument perm[i].
  std::vector<std::size_t> perm;
  /// ms: indices of rhs elements assigned to each lhs element.
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<SeqProof> premises;
};

struct SeqOrientation {
  std::optional<SeqProof> proof;
  std::string failure;
  explicit operator bool() const noexcept { return proof.has_value(); }
};

/// Decides a ⊳_k b. Caches per instance; not thread-safe.
class SequenceOrder {
 public:
  SequenceOrder(const Precedence& prec, const Tiering& tiers, std::size_t k);

  std::size_t width() const noexcept { return k_; }

  bool greater(const SeqTerm& a, const SeqTerm& b);
  bool greater(const Term& a, const Term& b);
  bool greater_equal(const Term& a, const Term& b);
  /// Equivalence of sequences ignores element order.
  bool equivalent(const SeqTerm& a, const SeqTerm& b) const;
  SeqOrientation orient(const SeqTerm& a, const SeqTerm& b);

  /// Contains a defined symbol not below the root of `a`.
  bool heavy(const Term& a, const Term& u) const;
  /// u is equivalent to a subterm (proper subterm) of s.
  bool equivalent_subterm(const Term& s, const Term& u, bool proper) const;

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<Term, Term>& p) const noexcept {
      return p.first.hash() * 31u + p.second.hash();
    }
  };

  bool ia(const Term& a, const Term& b) const;
  std::optional<std::vector<std::size_t>> ts(const Term& a, const Term& b) const;
  bool ialst(const Term& a, const std::vector<Term>& b);
  std::optional<std::vector<std::vector<std::size_t>>> ms(const std::vector<Term>& a, const std::vector<Term>& b);
  SeqProof prove(const SeqTerm& a, const SeqTerm& b);
  SeqProof prove_term(const Term& a, const Term& b);
  SeqProof prove_ialst(const Term& a, const std::vector<Term>& b);
  bool defined(SymbolId f) const;

  const Precedence& prec_;
  const Tiering& tiers_;
  std::size_t k_;
  std::unordered_map<std::pair<Term, Term>, bool, PairHash> cache_;
};

/// mc(1) = 1, mc(r) = mc(r-1)·k^(d+1) + 1. Throws Overflow.
std::uint64_t mc(std::size_t r, std::size_t d, std::size_t k);

enum class SlowMode {
  /// Lists are measured by summing their elements.
  additive,
  /// Lists are measured by enumerating their successors; slow, for testing.
  exhaustive,
};

/// Length of the longest ⊳_k descent, computed over canonical successors.
class SlowCalculator {
 public:
  SlowCalculator(const Precedence& prec, const Tiering& tiers, std::size_t k, NormalizedSignature sig,
                 SlowMode mode = SlowMode::additive, std::size_t fuel = default_fuel);

  std::size_t slow(const SeqTerm& a);
  std::size_t slow(const Term& a);

  /// Representatives, up to equivalence, of all terms b with a ⊳_k b.
  std::vector<Term> term_successors(const Term& a);
  /// Representatives of all lists b with a ⊳_k b (lhs term) or of all b
  /// with a ⊳_k b (lhs list). Exponential; intended for small inputs.
  std::vector<SeqTerm> list_successors(const SeqTerm& a);

  std::size_t evaluations() const noexcept { return work_; }

 private:
  std::string key(const Term& t) const;
  std::string key(const std::vector<Term>& elements) const;
  void tick();

  SequenceOrder order_;
  const Precedence& prec_;
  const Tiering& tiers_;
  std::size_t k_;
  NormalizedSignature sig_;
  SlowMode mode_;
  std::size_t fuel_;
  std::size_t work_ = 0;
  std::unordered_map<std::string, std::size_t> term_memo_;
  std::unordered_map<std::string, std::size_t> list_memo_;
  std::unordered_map<std::string, std::vector<Term>> succ_memo_;
};

struct SlowBound {
  std::size_t rank = 0;
  std::size_t depth = 0;
  std::uint64_t constant = 0;
  /// Σ depth of the arguments.
  std::size_t argument_depth = 0;
  /// mc · (2 + argument_depth)^depth
  std::uint64_t bound = 0;
  /// max slow(b) over successors b.
  std::size_t largest = 0;
};

/// Checks slow(b) < mc(rk f, rd f, k)·(2 + Σ depth vi)^(rd f) for every b
/// with f(v) ⊳_k b, where f(v) is normalised. Throws BoundViolation.
SlowBound check_slow_bound(const Precedence& prec, const Tiering& tiers, std::size_t k,
                           const NormalizedSignature& sig, SymbolId f, const std::vector<Term>& values,
                           std::size_t fuel = default_fuel);

struct EmbeddingStep {
  Term from;
  Term to;
  SeqTerm from_seq;
  SeqTerm to_seq;
  /// Filled when proofs are requested.
  std::optional<SeqProof> proof;
};

struct EmbeddingOptions {
  std::size_t fuel = default_fuel;
  /// Width of ⊳; defaults to the largest right-hand side of the completed system.
  std::optional<std::size_t> width;
  bool keep_proofs = false;
  Execution exec = Execution::parallel;
};

struct EmbeddingReport {
  std::size_t width = 0;
  std::size_t terms = 0;
  std::vector<EmbeddingStep> steps;
};

/// Explores every innermost step reachable from `start` in the system
/// completed by garbage rules and checks that each step stays in T_n and
/// descends in ⊳_ℓ under the interpretation. Throws EmbeddingViolation on
/// the first failing step, NotInTn when `start` is not in T_n, and
/// FuelExceeded when more than `fuel` terms are reachable.
EmbeddingReport verify_embedding(const Trs& trs, const Certificate& cert, const Term& start,
                                 const EmbeddingOptions& options = {});

/// The certificate extended to a symbol added after it was built (such as
/// `bot`): the new symbol becomes a constructor in the lowest class.
Certificate extend_with_constructor(const Certificate& cert, SymbolId added);

}  // namespace spop
