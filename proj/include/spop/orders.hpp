#pragma once

// The small polynomial path order, with and without parameter substitution,
// as a checker that produces replayable orientation proofs.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spop/rewriting.hpp"
#include "spop/term.hpp"

namespace spop {

enum class Variant { spop, spop_ps };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

struct Certificate {
  Precedence precedence;
  Tiering tiering;
  Variant variant = Variant::spop;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct OrderOptions {
  /// Compare safe argument tuples in recursive calls by the strict product
  /// extension instead of the weak one (plain variant only).
  bool strict_safe_products = false;
};

enum class Clause {
  /// Leaf: the two sides are ≈_s-equivalent (only inside ≥ comparisons).
  equivalent,
  st,
  ia,
  ts,
};

std::string_view to_string(Clause c);

/// One node per comparison. `premises` hold the sub-comparisons in a fixed
/// order: st has one premise; ia one per safe argument of the rhs; ts one per
/// normal pair (in lhs position order), then one per safe pair (plain variant)
/// or one per safe rhs argument (parameter substitution).
struct OrientationProof {
  Clause clause = Clause::equivalent;
  Term lhs = Term::apply(SymbolId{});
  Term rhs = Term::apply(SymbolId{});
  /// st: the lhs argument used.
  std::size_t argument = 0;
  /// ts: lhs normal position i is compared with rhs position normal_perm[i].
  std::vector<std::size_t> normal_perm;
  /// ts (plain variant): same for safe positions.
  std::vector<std::size_t> safe_perm;
  std::vector<OrientationProof> premises;

  std::size_t node_count() const;
};

struct Orientation {
  std::optional<OrientationProof> proof;
  /// First failing obligation when `proof` is empty.
  std::string failure;

  explicit operator bool() const noexcept { return proof.has_value(); }
};

/// Decides s > t for one certificate. Results are cached per instance;
/// an instance must not be shared between threads.
class PathOrder {
 public:
  /// `sig` is only used to name terms in failure messages.
  PathOrder(const Certificate& cert, OrderOptions options = {}, const Signature* sig = nullptr);

  bool greater(const Term& s, const Term& t);
  bool greater_equal(const Term& s, const Term& t);
  /// Proof of s > t, or the reason it fails.
  Orientation orient(const Term& s, const Term& t);

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<Term, Term>& p) const noexcept {
      return p.first.hash() * 31u + p.second.hash();
    }
  };

  bool compute(const Term& s, const Term& t);
  bool st(const Term& s, const Term& t, std::size_t* which);
  bool ia(const Term& s, const Term& t, std::string* why);
  bool ts(const Term& s, const Term& t, std::string* why, OrientationProof* proof);
  OrientationProof prove(const Term& s, const Term& t);
  OrientationProof prove_geq(const Term& s, const Term& t);
  std::string explain(const Term& s, const Term& t);
  std::string show(const Term& t) const;

  const Certificate& cert_;
  OrderOptions options_;
  const Signature* sig_;
  std::unordered_map<std::pair<Term, Term>, bool, PairHash> cache_;
};

Orientation spop_gt(const Certificate& cert, const Term& s, const Term& t, OrderOptions options = {});
Orientation spop_ps_gt(const Certificate& cert, const Term& s, const Term& t, OrderOptions options = {});

/// Re-checks every node of a proof against the order definition. Returns
/// an empty string on success, otherwise the first invalid node.
std::string replay(const Certificate& cert, const OrientationProof& proof, OrderOptions options = {});

/// Indented proof tree.
std::string to_string(const Signature& sig, const Tiering& tiers, const OrientationProof& proof);

/// Shape and admissibility problems of a certificate for a system; empty
/// when the certificate is usable.
std::vector<std::string> certificate_problems(const Trs& trs, const Certificate& cert);

struct DegreeReport {
  std::size_t degree = 0;
  /// Recursion depth of every defined symbol, in order of first appearance.
  std::vector<std::pair<SymbolId, std::size_t>> depths;
  std::vector<OrientationProof> proofs;
};

struct CompatibilityFailure {
  /// Rule index, or npos for certificate-level problems.
  std::size_t rule = npos;
  std::string obligation;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct Compatibility {
  std::optional<DegreeReport> report;
  std::optional<CompatibilityFailure> failure;

  explicit operator bool() const noexcept { return report.has_value(); }
};

enum class Execution { serial, parallel };

/// Orients every rule. Throws Error when the system is not a constructor
/// system. Parallel execution reports the same failure as serial execution.
Compatibility check_compatibility(const Trs& trs, const Certificate& cert, OrderOptions options = {},
                                  Execution exec = Execution::parallel);

/// Maximal recursion depth over the defined symbols of `trs`.
std::size_t certified_degree(const Trs& trs, const Certificate& cert);

/// Collapses a call graph into a total precedence. `below[f]` lists the
/// symbols f directly calls. Every edge stays strict and every recursion
/// depth is preserved.
Precedence linearize(const Tiering& tiers, const std::vector<std::vector<SymbolId>>& below);

}  // namespace spop
