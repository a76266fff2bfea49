#include "spop/term.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "matching.hpp"
#include "spop/error.hpp"

namespace spop {

std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::constructor: return "constructor";
    case SymbolKind::recursive: return "recursive";
    case SymbolKind::compositional: return "compositional";
  }
  return "?";
}

// ---------------------------------------------------------------- Signature

SymbolId Signature::add_symbol(std::string_view name, std::size_t arity) {
  if (auto it = symbol_index_.find(std::string(name)); it != symbol_index_.end()) {
    if (symbols_[index_of(it->second)].arity != arity)
      throw SignatureClash("symbol '" + std::string(name) + "' used with arity " +
                           std::to_string(arity) + " and " +
                           std::to_string(symbols_[index_of(it->second)].arity));
    return it->second;
  }
  if (arity > max_arity)
    throw SignatureClash("symbol '" + std::string(name) + "' exceeds the maximal arity");
  auto id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back({std::string(name), arity});
  symbol_index_.emplace(std::string(name), id);
  return id;
}

std::optional<SymbolId> Signature::find_symbol(std::string_view name) const {
  if (auto it = symbol_index_.find(std::string(name)); it != symbol_index_.end()) return it->second;
  return std::nullopt;
}

VarId Signature::add_variable(std::string_view name) {
  if (auto it = variable_index_.find(std::string(name)); it != variable_index_.end())
    return it->second;
  auto id = static_cast<VarId>(variables_.size());
  variables_.emplace_back(name);
  variable_index_.emplace(std::string(name), id);
  return id;
}

std::optional<VarId> Signature::find_variable(std::string_view name) const {
  if (auto it = variable_index_.find(std::string(name)); it != variable_index_.end())
    return it->second;
  return std::nullopt;
}

// --------------------------------------------------------------------- Term

struct Term::Node {
  bool is_var;
  std::uint32_t id;
  std::vector<Term> args;
  std::size_t size;
  std::size_t depth;
  std::size_t hash;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Term Term::variable(VarId x) {
  auto n = std::make_shared<Node>();
  n->is_var = true;
  n->id = index_of(x);
  n->size = 1;
  n->depth = 0;
  n->hash = mix(0x51ed270b27a1c3f5ULL, n->id);
  return Term(std::move(n));
}

Term Term::apply(SymbolId f, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->is_var = false;
  n->id = index_of(f);
  n->size = 1;
  n->depth = 0;
  std::size_t h = mix(0x2545f4914f6cdd1dULL, n->id);
  for (const Term& a : args) {
    n->size += a.size();
    n->depth = std::max(n->depth, a.depth() + 1);
    h = mix(h, a.hash());
  }
  n->hash = mix(h, args.size());
  n->args = std::move(args);
  return Term(std::move(n));
}

bool Term::is_variable() const noexcept { return node_->is_var; }

VarId Term::var() const {
  if (!node_->is_var) throw Error("term is not a variable");
  return static_cast<VarId>(node_->id);
}

SymbolId Term::symbol() const {
  if (node_->is_var) throw Error("variable has no root symbol");
  return static_cast<SymbolId>(node_->id);
}

std::span<const Term> Term::args() const noexcept { return node_->args; }
std::size_t Term::size() const noexcept { return node_->size; }
std::size_t Term::depth() const noexcept { return node_->depth; }
std::size_t Term::hash() const noexcept { return node_->hash; }

bool operator==(const Term& a, const Term& b) noexcept {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.hash != y.hash || x.is_var != y.is_var || x.id != y.id || x.size != y.size ||
      x.args.size() != y.args.size())
    return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!(x.args[i] == y.args[i])) return false;
  return true;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) noexcept {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.is_var != y.is_var) return x.is_var ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = x.id <=> y.id; c != 0) return c;
  if (auto c = x.args.size() <=> y.args.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (auto c = x.args[i] <=> y.args[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::vector<Term> subterms(const Term& t) {
  std::vector<Term> out;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term u = stack.back();
    stack.pop_back();
    out.push_back(u);
    if (!u.is_variable())
      for (auto it = u.args().rbegin(); it != u.args().rend(); ++it) stack.push_back(*it);
  }
  return out;
}

bool occurs_symbol(const Term& t, const std::function<bool(SymbolId)>& pred) {
  if (t.is_variable()) return false;
  if (pred(t.symbol())) return true;
  for (const Term& a : t.args())
    if (occurs_symbol(a, pred)) return true;
  return false;
}

void collect_variables(const Term& t, std::vector<VarId>& out) {
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.var()) == out.end()) out.push_back(t.var());
    return;
  }
  for (const Term& a : t.args()) collect_variables(a, out);
}

// ------------------------------------------------------------------ Tiering

std::size_t Tiering::normal_count(SymbolId f) const {
  return static_cast<std::size_t>(std::popcount(normal_mask(f)));
}

// --------------------------------------------------------------- Precedence

Precedence Precedence::from_classes(std::size_t symbol_count,
                                    const std::vector<std::vector<SymbolId>>& highest_first) {
  std::vector<int> levels(symbol_count, -1);
  const int n = static_cast<int>(highest_first.size());
  for (int c = 0; c < n; ++c)
    for (SymbolId f : highest_first[static_cast<std::size_t>(c)]) {
      if (index_of(f) >= symbol_count) throw Error("precedence mentions an unknown symbol");
      if (levels[index_of(f)] >= 0) throw Error("symbol occurs twice in precedence");
      levels[index_of(f)] = n - 1 - c;
    }
  return from_levels(std::move(levels));
}

Precedence Precedence::from_levels(std::vector<int> levels) {
  std::vector<int> used;
  for (int l : levels)
    if (l >= 0) used.push_back(l);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (int& l : levels)
    if (l >= 0) l = static_cast<int>(std::lower_bound(used.begin(), used.end(), l) - used.begin());
  Precedence p;
  p.level_ = std::move(levels);
  p.class_count_ = used.size();
  return p;
}

std::vector<std::vector<SymbolId>> Precedence::classes() const {
  std::vector<std::vector<SymbolId>> out(class_count_);
  for (std::size_t i = 0; i < level_.size(); ++i)
    if (level_[i] >= 0)
      out[class_count_ - 1 - static_cast<std::size_t>(level_[i])].push_back(static_cast<SymbolId>(i));
  return out;
}

// In a total preorder the strictly-below symbols are exactly the lower
// classes, so both measures are computed class by class from the bottom.
std::size_t rank(const Precedence& prec, SymbolId f) {
  if (!prec.contains(f)) return 1;
  return static_cast<std::size_t>(prec.level(f)) + 1;
}

std::size_t recursion_depth(const Precedence& prec, const Tiering& tiers, SymbolId f) {
  if (!prec.contains(f)) return tiers.is_recursive(f) ? 1 : 0;
  std::vector<bool> recursive_level(prec.class_count(), false);
  for (std::size_t i = 0; i < prec.symbol_count(); ++i) {
    auto g = static_cast<SymbolId>(i);
    if (prec.contains(g) && i < tiers.symbol_count() && tiers.is_recursive(g))
      recursive_level[static_cast<std::size_t>(prec.level(g))] = true;
  }
  std::size_t below = 0;
  for (int l = 0; l < prec.level(f); ++l)
    if (recursive_level[static_cast<std::size_t>(l)]) ++below;
  return below + (tiers.is_recursive(f) ? 1 : 0);
}

// ------------------------------------------------------------- equivalences

namespace {

bool perfect_matching(const std::vector<std::size_t>& left, const std::vector<std::size_t>& right,
                      const std::function<bool(std::size_t, std::size_t)>& edge) {
  if (left.size() != right.size()) return false;
  detail::Table allowed(left.size(), std::vector<bool>(right.size()));
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t j = 0; j < right.size(); ++j) allowed[i][j] = edge(left[i], right[j]);
  return detail::match_rows(allowed).has_value();
}

bool roots_match(const Precedence& prec, const Term& s, const Term& t) {
  return !s.is_variable() && !t.is_variable() && s.arity() == t.arity() &&
         prec.equivalent(s.symbol(), t.symbol());
}

PositionMask tier_mask(const Tiering& tiers, SymbolId f) {
  return index_of(f) < tiers.symbol_count() ? tiers.normal_mask(f) : 0;
}

}  // namespace

bool equivalent(const Precedence& prec, const Term& s, const Term& t) {
  if (s == t) return true;
  if (!roots_match(prec, s, t)) return false;
  std::vector<std::size_t> idx(s.arity());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return perfect_matching(idx, idx, [&](std::size_t i, std::size_t j) {
    return equivalent(prec, s.arg(i), t.arg(j));
  });
}

bool safe_equivalent(const Precedence& prec, const Tiering& tiers, const Term& s, const Term& t) {
  if (s == t) return true;
  if (!roots_match(prec, s, t)) return false;
  const PositionMask ms = tier_mask(tiers, s.symbol());
  const PositionMask mt = tier_mask(tiers, t.symbol());
  std::vector<std::size_t> sn, ss, tn, ts;
  for (std::size_t i = 0; i < s.arity(); ++i) {
    ((ms >> i) & 1u ? sn : ss).push_back(i);
    ((mt >> i) & 1u ? tn : ts).push_back(i);
  }
  auto edge = [&](std::size_t i, std::size_t j) {
    return safe_equivalent(prec, tiers, s.arg(i), t.arg(j));
  };
  return perfect_matching(sn, tn, edge) && perfect_matching(ss, ts, edge);
}

bool normal_subterm_gt(const Precedence& prec, const Tiering& tiers, const Term& s, const Term& t) {
  if (s.is_variable()) return false;
  const SymbolId f = s.symbol();
  const bool defined = index_of(f) < tiers.symbol_count() && tiers.is_defined(f);
  for (std::size_t i = 0; i < s.arity(); ++i) {
    if (defined && !tiers.is_normal(f, i)) continue;
    if (safe_equivalent(prec, tiers, s.arg(i), t) || normal_subterm_gt(prec, tiers, s.arg(i), t))
      return true;
  }
  return false;
}

namespace {

std::string root_key(const Precedence& prec, const Term& t) {
  if (t.is_variable()) return "v" + std::to_string(index_of(t.var()));
  const SymbolId f = t.symbol();
  // Symbols outside the order are only equivalent to themselves.
  if (!prec.contains(f)) return "s" + std::to_string(index_of(f));
  return "c" + std::to_string(prec.level(f));
}

}  // namespace

std::string canonical_form(const Precedence& prec, const Term& t) {
  if (t.is_variable()) return root_key(prec, t);
  std::vector<std::string> parts;
  parts.reserve(t.arity());
  for (const Term& a : t.args()) parts.push_back(canonical_form(prec, a));
  std::sort(parts.begin(), parts.end());
  std::string out = root_key(prec, t) + ":" + std::to_string(t.arity()) + "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out + ")";
}

std::string safe_canonical_form(const Precedence& prec, const Tiering& tiers, const Term& t) {
  if (t.is_variable()) return root_key(prec, t);
  const PositionMask m = tier_mask(tiers, t.symbol());
  std::vector<std::string> normal, safe;
  for (std::size_t i = 0; i < t.arity(); ++i)
    ((m >> i) & 1u ? normal : safe).push_back(safe_canonical_form(prec, tiers, t.arg(i)));
  std::sort(normal.begin(), normal.end());
  std::sort(safe.begin(), safe.end());
  std::string out = root_key(prec, t) + ":" + std::to_string(normal.size()) + "/" +
                    std::to_string(safe.size()) + "(";
  for (std::size_t i = 0; i < normal.size(); ++i) {
    if (i) out += ',';
    out += normal[i];
  }
  out += ';';
  for (std::size_t i = 0; i < safe.size(); ++i) {
    if (i) out += ',';
    out += safe[i];
  }
  return out + ")";
}

// ----------------------------------------------------------------- printing

namespace {

void print(const Signature& sig, const Term& t, const Tiering* tiers, std::string& out) {
  if (t.is_variable()) {
    out += sig.variable_name(t.var());
    return;
  }
  const SymbolId f = t.symbol();
  out += index_of(f) < sig.symbol_count() ? sig.name(f) : "#" + std::to_string(index_of(f));
  std::size_t split = t.arity();
  if (tiers && index_of(f) < tiers->symbol_count() && tiers->is_defined(f)) {
    const PositionMask m = tiers->normal_mask(f);
    const std::size_t k = tiers->normal_count(f);
    // Only a prefix-shaped split can be shown with a single ';'.
    if (k <= t.arity() && m == (k == 64 ? ~PositionMask{0} : (PositionMask{1} << k) - 1)) split = k;
  }
  if (t.arity() == 0 && split == t.arity()) {
    if (tiers && index_of(f) < tiers->symbol_count() && tiers->is_defined(f)) out += "()";
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i == split) out += i == 0 ? ";" : "; ";
    else if (i) out += ", ";
    print(sig, t.arg(i), tiers, out);
  }
  if (split == t.arity() && tiers && index_of(f) < tiers->symbol_count() && tiers->is_defined(f) &&
      t.arity() > 0)
    out += ';';
  out += ')';
}

}  // namespace

std::string to_string(const Signature& sig, const Term& t, const Tiering* tiers) {
  std::string out;
  print(sig, t, tiers, out);
  return out;
}

}  // namespace spop
