#include "spop/predicative.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "matching.hpp"
#include "spop/error.hpp"

namespace spop {

// ------------------------------------------------------------------ SeqTerm

SeqTerm SeqTerm::term(Term t) {
  SeqTerm s;
  s.is_list_ = false;
  s.elements_.push_back(std::move(t));
  return s;
}

SeqTerm SeqTerm::list(std::vector<Term> elements) {
  SeqTerm s;
  s.is_list_ = true;
  s.elements_ = std::move(elements);
  return s;
}

const Term& SeqTerm::as_term() const {
  if (is_list_) throw Error("sequence is a list, not a term");
  return elements_.front();
}

SeqTerm append(const SeqTerm& a, const SeqTerm& b) {
  std::vector<Term> out = a.elements();
  out.insert(out.end(), b.elements().begin(), b.elements().end());
  return SeqTerm::list(std::move(out));
}

// ----------------------------------------------------- T_n, interpretation

namespace {

bool defined_in(const Tiering& tiers, SymbolId f) {
  return index_of(f) < tiers.symbol_count() && tiers.is_defined(f);
}

bool tier_value(const Tiering& tiers, const Term& t) {
  return !occurs_symbol(t, [&](SymbolId f) { return defined_in(tiers, f); });
}

void interpret_into(const Tiering& tiers, const Term& t, std::vector<Term>& out) {
  if (tier_value(tiers, t)) return;
  const SymbolId f = t.symbol();
  std::vector<Term> normal;
  std::vector<const Term*> safe;
  const bool d = defined_in(tiers, f);
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (d && tiers.is_normal(f, i)) {
      if (!tier_value(tiers, t.arg(i))) throw NotInTn("a normal argument is not a value");
      normal.push_back(t.arg(i));
    } else {
      safe.push_back(&t.arg(i));
    }
  }
  out.push_back(Term::apply(f, std::move(normal)));
  for (const Term* a : safe) interpret_into(tiers, *a, out);
}

}  // namespace

bool in_Tn(const Tiering& tiers, const Term& t) {
  if (tier_value(tiers, t)) return true;
  const SymbolId f = t.symbol();
  const bool d = defined_in(tiers, f);
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (d && tiers.is_normal(f, i)) {
      if (!tier_value(tiers, t.arg(i))) return false;
    } else if (!in_Tn(tiers, t.arg(i))) {
      return false;
    }
  }
  return true;
}

bool in_Tn(const Trs&, const Certificate& cert, const Term& t) { return in_Tn(cert.tiering, t); }

SeqTerm interpret(const Tiering& tiers, const Term& t) {
  std::vector<Term> out;
  interpret_into(tiers, t, out);
  return SeqTerm::list(std::move(out));
}

SeqTerm interpret(const Trs&, const Certificate& cert, const Term& t) { return interpret(cert.tiering, t); }

NormalizedSignature normalized_signature(const Signature& sig, const Tiering& tiers) {
  NormalizedSignature out;
  for (std::size_t i = 0; i < sig.symbol_count(); ++i) {
    const auto f = static_cast<SymbolId>(i);
    if (defined_in(tiers, f)) {
      out.emplace_back(f, tiers.normal_count(f));
    } else {
      out.emplace_back(f, sig.arity(f));
      if (sig.arity(f) > 0) out.emplace_back(f, 0);
    }
  }
  return out;
}

namespace {

void print_normalized(const Signature& sig, const Tiering& tiers, const Term& t, std::string& out) {
  if (t.is_variable()) {
    out += sig.variable_name(t.var());
    return;
  }
  const SymbolId f = t.symbol();
  out += sig.name(f);
  const bool marked = defined_in(tiers, f) || t.arity() != sig.arity(f);
  if (marked) out += "^n";
  if (t.arity() == 0 && !marked) return;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ", ";
    print_normalized(sig, tiers, t.arg(i), out);
  }
  out += ')';
}

}  // namespace

std::string to_string(const Signature& sig, const Tiering& tiers, const SeqTerm& a) {
  std::string out;
  if (!a.is_list()) {
    print_normalized(sig, tiers, a.as_term(), out);
    return out;
  }
  out += '[';
  for (std::size_t i = 0; i < a.elements().size(); ++i) {
    if (i) out += ' ';
    print_normalized(sig, tiers, a.elements()[i], out);
  }
  return out + ']';
}

std::string_view to_string(SeqClause c) {
  switch (c) {
    case SeqClause::equivalent: return "eq";
    case SeqClause::ia: return "ia";
    case SeqClause::ts: return "ts";
    case SeqClause::ialst: return "ialst";
    case SeqClause::ms: return "ms";
  }
  return "?";
}

// ----------------------------------------------------------- SequenceOrder

SequenceOrder::SequenceOrder(const Precedence& prec, const Tiering& tiers, std::size_t k)
    : prec_(prec), tiers_(tiers), k_(k) {
  if (k == 0) throw Error("sequence order width must be positive");
}

bool SequenceOrder::defined(SymbolId f) const { return defined_in(tiers_, f); }

bool SequenceOrder::heavy(const Term& a, const Term& u) const {
  const SymbolId f = a.symbol();
  return occurs_symbol(u, [&](SymbolId h) { return defined(h) && !prec_.greater(f, h); });
}

bool SequenceOrder::equivalent_subterm(const Term& s, const Term& u, bool proper) const {
  for (const Term& v : subterms(s)) {
    if (proper && v.same_node(s)) continue;
    if (v.size() == u.size() && v.depth() == u.depth() && spop::equivalent(prec_, v, u)) return true;
  }
  return false;
}

bool SequenceOrder::ia(const Term& a, const Term& b) const {
  if (a.is_variable() || b.is_variable()) return false;
  if (!defined(a.symbol()) || !prec_.greater(a.symbol(), b.symbol()) || b.arity() > k_) return false;
  for (const Term& t : b.args())
    if (!equivalent_subterm(a, t, true)) return false;
  return true;
}

std::optional<std::vector<std::size_t>> SequenceOrder::ts(const Term& a, const Term& b) const {
  if (a.is_variable() || b.is_variable()) return std::nullopt;
  const SymbolId f = a.symbol();
  if (!defined(f) || !tiers_.is_recursive(f) || !prec_.equivalent(f, b.symbol())) return std::nullopt;
  const std::size_t n = a.arity();
  if (b.arity() != n || n > k_) return std::nullopt;
  detail::Table weak(n, std::vector<bool>(n)), strict(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      strict[i][j] = equivalent_subterm(a.arg(i), b.arg(j), true);
      weak[i][j] = strict[i][j] || spop::equivalent(prec_, a.arg(i), b.arg(j));
    }
  return detail::product_match(weak, strict, true);
}

bool SequenceOrder::greater(const Term& a, const Term& b) {
  auto key = std::make_pair(a, b);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const bool r = ia(a, b) || ts(a, b).has_value();
  cache_.emplace(std::move(key), r);
  return r;
}

bool SequenceOrder::greater_equal(const Term& a, const Term& b) {
  return spop::equivalent(prec_, a, b) || greater(a, b);
}

bool SequenceOrder::ialst(const Term& a, const std::vector<Term>& b) {
  if (a.is_variable() || b.size() > k_) return false;
  std::size_t heavy_count = 0;
  for (const Term& t : b) {
    if (!greater(a, t)) return false;
    if (heavy(a, t)) ++heavy_count;
  }
  return heavy_count <= 1;
}

std::optional<std::vector<std::vector<std::size_t>>> SequenceOrder::ms(const std::vector<Term>& a,
                                                                      const std::vector<Term>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return std::nullopt;
  detail::Table gt(n, std::vector<bool>(m)), eq(n, std::vector<bool>(m)), hv(n, std::vector<bool>(m));
  for (std::size_t j = 0; j < m; ++j) {
    bool placeable = false;
    for (std::size_t i = 0; i < n; ++i) {
      gt[i][j] = greater(a[i], b[j]);
      eq[i][j] = !gt[i][j] && spop::equivalent(prec_, a[i], b[j]);
      hv[i][j] = gt[i][j] && heavy(a[i], b[j]);
      placeable = placeable || gt[i][j] || eq[i][j];
    }
    if (!placeable) return std::nullopt;
  }
  std::vector<std::vector<std::size_t>> blocks(n);
  std::vector<std::size_t> heavy_count(n, 0);
  std::vector<bool> has_eq(n, false);

  auto block_ok = [&](std::size_t i) {
    const auto& blk = blocks[i];
    if (blk.size() <= 1) return true;
    return blk.size() <= k_ && !has_eq[i] && heavy_count[i] <= 1;
  };
  auto finished = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      if (blocks[i].size() != 1) return true;
      if (gt[i][blocks[i][0]]) return true;
    }
    return false;
  };
  std::function<bool(std::size_t)> place = [&](std::size_t j) -> bool {
    if (j == m) return finished();
    for (std::size_t i = 0; i < n; ++i) {
      if (!gt[i][j] && !eq[i][j]) continue;
      blocks[i].push_back(j);
      const bool was_eq = has_eq[i];
      if (eq[i][j]) has_eq[i] = true;
      if (hv[i][j]) ++heavy_count[i];
      if (block_ok(i) && place(j + 1)) return true;
      if (hv[i][j]) --heavy_count[i];
      has_eq[i] = was_eq;
      blocks[i].pop_back();
    }
    return false;
  };
  if (!place(0)) return std::nullopt;
  return blocks;
}

bool SequenceOrder::greater(const SeqTerm& a, const SeqTerm& b) {
  if (!a.is_list()) {
    if (!b.is_list()) return greater(a.as_term(), b.as_term());
    return ialst(a.as_term(), b.elements());
  }
  return ms(a.elements(), b.elements()).has_value();
}

bool SequenceOrder::equivalent(const SeqTerm& a, const SeqTerm& b) const {
  if (a.is_list() != b.is_list()) return false;
  if (!a.is_list()) return spop::equivalent(prec_, a.as_term(), b.as_term());
  const auto& x = a.elements();
  const auto& y = b.elements();
  if (x.size() != y.size()) return false;
  detail::Table eq(x.size(), std::vector<bool>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) eq[i][j] = spop::equivalent(prec_, x[i], y[j]);
  return detail::match_rows(eq).has_value();
}

SeqProof SequenceOrder::prove_term(const Term& a, const Term& b) {
  SeqProof p;
  p.lhs = SeqTerm::term(a);
  p.rhs = SeqTerm::term(b);
  if (ia(a, b)) {
    p.clause = SeqClause::ia;
    return p;
  }
  if (auto perm = ts(a, b)) {
    p.clause = SeqClause::ts;
    p.perm = *perm;
    return p;
  }
  throw Error("internal: no term clause applies");
}

SeqProof SequenceOrder::prove_ialst(const Term& a, const std::vector<Term>& b) {
  SeqProof p;
  p.clause = SeqClause::ialst;
  p.lhs = SeqTerm::term(a);
  p.rhs = SeqTerm::list(b);
  for (const Term& t : b) p.premises.push_back(prove_term(a, t));
  return p;
}

SeqProof SequenceOrder::prove(const SeqTerm& a, const SeqTerm& b) {
  if (!a.is_list()) {
    if (!b.is_list()) return prove_term(a.as_term(), b.as_term());
    return prove_ialst(a.as_term(), b.elements());
  }
  auto blocks = ms(a.elements(), b.elements());
  if (!blocks) throw Error("internal: no list clause applies");
  SeqProof p;
  p.clause = SeqClause::ms;
  p.lhs = a;
  p.rhs = b;
  for (std::size_t i = 0; i < blocks->size(); ++i) {
    const Term& s = a.elements()[i];
    const auto& blk = (*blocks)[i];
    if (blk.size() == 1) {
      const Term& u = b.elements()[blk[0]];
      if (greater(s, u)) {
        p.premises.push_back(prove_term(s, u));
      } else {
        SeqProof e;
        e.clause = SeqClause::equivalent;
        e.lhs = SeqTerm::term(s);
        e.rhs = SeqTerm::term(u);
        p.premises.push_back(std::move(e));
      }
    } else {
      std::vector<Term> elems;
      for (std::size_t j : blk) elems.push_back(b.elements()[j]);
      p.premises.push_back(prove_ialst(s, elems));
    }
  }
  p.blocks = std::move(*blocks);
  return p;
}

SeqOrientation SequenceOrder::orient(const SeqTerm& a, const SeqTerm& b) {
  SeqOrientation o;
  if (greater(a, b))
    o.proof = prove(a, b);
  else
    o.failure = "no clause of the sequence order applies";
  return o;
}

// ---------------------------------------------------------------------- mc

std::uint64_t mc(std::size_t r, std::size_t d, std::size_t k) {
  if (r == 0) throw Error("mc is defined for positive ranks only");
  std::uint64_t factor = 1;
  for (std::size_t i = 0; i < d + 1; ++i)
    if (__builtin_mul_overflow(factor, static_cast<std::uint64_t>(k), &factor))
      throw Overflow("mc: k^(d+1) overflows");
  std::uint64_t value = 1;
  for (std::size_t i = 1; i < r; ++i) {
    if (__builtin_mul_overflow(value, factor, &value) || __builtin_add_overflow(value, std::uint64_t{1}, &value))
      throw Overflow("mc: value overflows");
  }
  return value;
}

// ---------------------------------------------------------- SlowCalculator

SlowCalculator::SlowCalculator(const Precedence& prec, const Tiering& tiers, std::size_t k, NormalizedSignature sig,
                               SlowMode mode, std::size_t fuel)
    : order_(prec, tiers, k), prec_(prec), tiers_(tiers), k_(k), sig_(std::move(sig)), mode_(mode), fuel_(fuel) {}

void SlowCalculator::tick() {
  if (++work_ > fuel_) throw FuelExceeded("slow: evaluation budget exhausted");
}

std::string SlowCalculator::key(const Term& t) const { return canonical_form(prec_, t); }

std::string SlowCalculator::key(const std::vector<Term>& elements) const {
  std::vector<std::string> parts;
  for (const Term& t : elements) parts.push_back(key(t));
  std::sort(parts.begin(), parts.end());
  std::string out = "L";
  for (const auto& p : parts) out += "|" + p;
  return out;
}

namespace {

// Representatives of the subterms of t up to equivalence.
std::vector<Term> subterm_reps(const Precedence& prec, const Term& t, bool proper) {
  std::vector<Term> out;
  std::unordered_set<std::string> seen;
  for (const Term& u : subterms(t)) {
    if (proper && u.same_node(t)) continue;
    if (seen.insert(canonical_form(prec, u)).second) out.push_back(u);
  }
  return out;
}

// Calls `emit` with every multiset of size `size` over `pool`, as index
// vectors in non-decreasing order.
template <typename Emit>
void multisets(std::size_t pool, std::size_t size, Emit emit) {
  std::vector<std::size_t> idx(size, 0);
  if (size == 0) {
    emit(idx);
    return;
  }
  if (pool == 0) return;
  while (true) {
    emit(idx);
    std::size_t pos = size;
    while (pos > 0 && idx[pos - 1] == pool - 1) --pos;
    if (pos == 0) return;
    const std::size_t v = idx[pos - 1] + 1;
    for (std::size_t i = pos - 1; i < size; ++i) idx[i] = v;
  }
}

}  // namespace

std::vector<Term> SlowCalculator::term_successors(const Term& a) {
  if (a.is_variable()) return {};
  const std::string ka = key(a);
  if (auto it = succ_memo_.find(ka); it != succ_memo_.end()) return it->second;
  std::vector<Term> out;
  std::unordered_set<std::string> seen;
  auto add = [&](Term t) {
    tick();
    if (seen.insert(key(t)).second) out.push_back(std::move(t));
  };
  const SymbolId f = a.symbol();
  const bool defined = defined_in(tiers_, f);
  if (defined) {
    const std::vector<Term> proper = subterm_reps(prec_, a, true);
    for (const auto& [g, m] : sig_) {
      if (!prec_.greater(f, g) || m > k_) continue;
      multisets(proper.size(), m, [&](const std::vector<std::size_t>& idx) {
        std::vector<Term> args;
        for (std::size_t i : idx) args.push_back(proper[i]);
        add(Term::apply(g, std::move(args)));
      });
    }
  }
  if (defined && tiers_.is_recursive(f) && a.arity() <= k_) {
    const std::size_t n = a.arity();
    std::vector<std::vector<Term>> choices(n);
    std::vector<std::size_t> self(n);
    for (std::size_t i = 0; i < n; ++i) {
      choices[i] = subterm_reps(prec_, a.arg(i), false);
      self[i] = 0;  // subterms() lists the term itself first
    }
    std::vector<SymbolId> heads;
    for (const auto& [g, m] : sig_)
      if (m == n && prec_.equivalent(f, g) && std::find(heads.begin(), heads.end(), g) == heads.end())
        heads.push_back(g);
    if (std::find(heads.begin(), heads.end(), f) == heads.end()) heads.push_back(f);
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      bool some_proper = false;
      for (std::size_t i = 0; i < n; ++i) some_proper = some_proper || pick[i] != self[i];
      if (some_proper) {
        std::vector<Term> args;
        for (std::size_t i = 0; i < n; ++i) args.push_back(choices[i][pick[i]]);
        for (SymbolId g : heads) add(Term::apply(g, args));
      }
      std::size_t i = 0;
      while (i < n && ++pick[i] == choices[i].size()) pick[i++] = 0;
      if (i == n) break;
    }
  }
  succ_memo_.emplace(ka, out);
  return out;
}

std::size_t SlowCalculator::slow(const Term& a) {
  const std::string ka = key(a);
  if (auto it = term_memo_.find(ka); it != term_memo_.end()) return it->second;
  tick();
  std::size_t best = 0;
  if (mode_ == SlowMode::additive) {
    std::size_t light = 0, heavy = 0;
    for (const Term& u : term_successors(a)) {
      const std::size_t s = slow(u);
      best = std::max(best, s);
      if (order_.heavy(a, u))
        heavy = std::max(heavy, s);
      else
        light = std::max(light, s);
    }
    // Lists under a term hold at most k elements, at most one heavy; the
    // largest sums repeat the best light element.
    best = std::max({best, k_ * light, (k_ - 1) * light + heavy});
  } else {
    for (const Term& u : term_successors(a)) best = std::max(best, slow(u));
    for (const SeqTerm& b : list_successors(SeqTerm::term(a))) best = std::max(best, slow(b));
  }
  term_memo_.emplace(ka, best + 1);
  return best + 1;
}

std::size_t SlowCalculator::slow(const SeqTerm& a) {
  if (!a.is_list()) return slow(a.as_term());
  if (mode_ == SlowMode::additive) {
    std::size_t sum = 0;
    for (const Term& t : a.elements()) sum += slow(t);
    return sum;
  }
  const std::string ka = key(a.elements());
  if (auto it = list_memo_.find(ka); it != list_memo_.end()) return it->second;
  tick();
  std::size_t best = 0;
  bool any = false;
  for (const SeqTerm& b : list_successors(a)) {
    best = std::max(best, slow(b));
    any = true;
  }
  const std::size_t result = any ? best + 1 : 0;
  list_memo_.emplace(ka, result);
  return result;
}

std::vector<SeqTerm> SlowCalculator::list_successors(const SeqTerm& a) {
  std::vector<SeqTerm> out;
  std::unordered_set<std::string> seen;
  auto add = [&](std::vector<Term> elems) {
    tick();
    if (seen.insert(key(elems)).second) out.push_back(SeqTerm::list(std::move(elems)));
  };
  // Lists below a single term: at most k successors, at most one heavy.
  auto below_term = [&](const Term& s, std::size_t min_size, auto&& emit) {
    const std::vector<Term> succ = term_successors(s);
    for (std::size_t m = min_size; m <= k_; ++m)
      multisets(succ.size(), m, [&](const std::vector<std::size_t>& idx) {
        std::size_t heavy = 0;
        for (std::size_t i : idx)
          if (order_.heavy(s, succ[i])) ++heavy;
        if (heavy > 1) return;
        std::vector<Term> elems;
        for (std::size_t i : idx) elems.push_back(succ[i]);
        emit(std::move(elems));
      });
  };
  if (!a.is_list()) {
    below_term(a.as_term(), 0, add);
    return out;
  }
  // Each element contributes a block: itself (weak), or any strictly
  // smaller sequence; at least one block is strict.
  const auto& elems = a.elements();
  std::vector<std::vector<std::pair<std::vector<Term>, bool>>> options(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) {
    options[i].emplace_back(std::vector<Term>{elems[i]}, false);
    for (const Term& u : term_successors(elems[i])) options[i].emplace_back(std::vector<Term>{u}, true);
    below_term(elems[i], 0, [&](std::vector<Term> blk) {
      if (blk.size() != 1) options[i].emplace_back(std::move(blk), true);
    });
  }
  std::vector<std::size_t> pick(elems.size(), 0);
  while (!elems.empty()) {
    bool strict = false;
    std::vector<Term> b;
    for (std::size_t i = 0; i < elems.size(); ++i) {
      const auto& [blk, s] = options[i][pick[i]];
      strict = strict || s;
      b.insert(b.end(), blk.begin(), blk.end());
    }
    if (strict) add(std::move(b));
    std::size_t i = 0;
    while (i < elems.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
    if (i == elems.size()) break;
  }
  return out;
}

// ------------------------------------------------------------- slow bound

SlowBound check_slow_bound(const Precedence& prec, const Tiering& tiers, std::size_t k, const NormalizedSignature& sig,
                           SymbolId f, const std::vector<Term>& values, std::size_t fuel) {
  SlowBound r;
  r.rank = rank(prec, f);
  r.depth = recursion_depth(prec, tiers, f);
  r.constant = mc(r.rank, r.depth, k);
  for (const Term& v : values) r.argument_depth += v.depth();
  std::uint64_t power = 1;
  for (std::size_t i = 0; i < r.depth; ++i)
    if (__builtin_mul_overflow(power, static_cast<std::uint64_t>(2 + r.argument_depth), &power))
      throw Overflow("slow bound overflows");
  if (__builtin_mul_overflow(r.constant, power, &r.bound)) throw Overflow("slow bound overflows");
  SlowCalculator calc(prec, tiers, k, sig, SlowMode::additive, fuel);
  // slow(a) is one more than the largest slow over the successors of a.
  r.largest = calc.slow(Term::apply(f, values)) - 1;
  if (r.largest >= r.bound)
    throw BoundViolation("slow bound violated: " + std::to_string(r.largest) + " >= " + std::to_string(r.bound));
  return r;
}

// --------------------------------------------------------------- embedding

Certificate extend_with_constructor(const Certificate& cert, SymbolId added) {
  const std::size_t old = cert.tiering.symbol_count();
  const std::size_t n = std::max(old, static_cast<std::size_t>(index_of(added)) + 1);
  Certificate out;
  out.variant = cert.variant;
  out.tiering = Tiering(n);
  std::vector<int> levels(n, -1);
  int bottom = -1;
  for (std::size_t i = 0; i < old; ++i) {
    const auto f = static_cast<SymbolId>(i);
    out.tiering.set_kind(f, cert.tiering.kind(f));
    out.tiering.set_normal_mask(f, cert.tiering.normal_mask(f));
    if (i < cert.precedence.symbol_count() && cert.precedence.contains(f)) {
      levels[i] = cert.precedence.level(f) + 1;
      if (!cert.tiering.is_defined(f) && f != added) bottom = levels[i];
    }
  }
  out.tiering.set_kind(added, SymbolKind::constructor);
  out.tiering.set_normal_mask(added, 0);
  levels[index_of(added)] = bottom >= 0 ? bottom : 0;
  out.precedence = Precedence::from_levels(std::move(levels));
  return out;
}

EmbeddingReport verify_embedding(const Trs& trs, const Certificate& cert, const Term& start,
                                 const EmbeddingOptions& options) {
  Trs completed = trs;
  const SymbolId bot = ensure_bottom(completed);
  const Certificate c = index_of(bot) < cert.tiering.symbol_count() ? cert : extend_with_constructor(cert, bot);
  EmbeddingReport report;
  report.width = options.width.value_or(std::max<std::size_t>(completed.max_rhs_size(), 1));
  if (!in_Tn(c.tiering, start)) throw NotInTn("start term is not in T_n");

  std::unordered_set<Term, TermHash> visited{start};
  std::deque<Term> queue{start};
  while (!queue.empty()) {
    Term s = queue.front();
    queue.pop_front();
    for (Term& t : garbage_innermost_successors(completed, s, bot)) {
      report.steps.push_back({s, t, SeqTerm::list(), SeqTerm::list(), std::nullopt});
      if (visited.insert(t).second) {
        if (visited.size() > options.fuel) throw FuelExceeded("embedding: too many reachable terms");
        queue.push_back(std::move(t));
      }
    }
  }
  report.terms = visited.size();

  const auto n = static_cast<std::ptrdiff_t>(report.steps.size());
  std::vector<std::string> failures(report.steps.size());
  auto check_step = [&](SequenceOrder& order, EmbeddingStep& step, std::string& failure) {
    if (!in_Tn(c.tiering, step.from) || !in_Tn(c.tiering, step.to)) {
      failure = "step leaves T_n";
      return;
    }
    step.from_seq = interpret(c.tiering, step.from);
    step.to_seq = interpret(c.tiering, step.to);
    if (options.keep_proofs) {
      auto o = order.orient(step.from_seq, step.to_seq);
      if (!o) failure = o.failure;
      step.proof = std::move(o.proof);
    } else if (!order.greater(step.from_seq, step.to_seq)) {
      failure = "interpretations do not descend";
    }
  };
  if (options.exec == Execution::parallel) {
#pragma omp parallel
    {
      SequenceOrder order(c.precedence, c.tiering, report.width);
#pragma omp for schedule(dynamic, 16)
      for (std::ptrdiff_t i = 0; i < n; ++i)
        check_step(order, report.steps[static_cast<std::size_t>(i)], failures[static_cast<std::size_t>(i)]);
    }
  } else {
    SequenceOrder order(c.precedence, c.tiering, report.width);
    for (std::ptrdiff_t i = 0; i < n; ++i)
      check_step(order, report.steps[static_cast<std::size_t>(i)], failures[static_cast<std::size_t>(i)]);
  }
  for (std::size_t i = 0; i < failures.size(); ++i)
    if (!failures[i].empty()) {
      const Signature& sig = completed.signature();
      throw EmbeddingViolation("step " + to_string(sig, report.steps[i].from) + " -> " +
                               to_string(sig, report.steps[i].to) + ": " + failures[i]);
    }
  return report;
}

}  // namespace spop
