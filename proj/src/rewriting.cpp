#include "spop/rewriting.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "spop/error.hpp"

namespace spop {

// ------------------------------------------------------------- substitution

const Term* Substitution::find(VarId x) const {
  for (const auto& [y, t] : bindings_)
    if (y == x) return &t;
  return nullptr;
}

bool Substitution::bind(VarId x, const Term& t) {
  if (const Term* old = find(x)) return *old == t;
  bindings_.emplace_back(x, t);
  return true;
}

bool match(const Term& pattern, const Term& t, Substitution& sigma) {
  if (pattern.is_variable()) return sigma.bind(pattern.var(), t);
  if (t.is_variable() || pattern.symbol() != t.symbol() || pattern.arity() != t.arity()) return false;
  for (std::size_t i = 0; i < pattern.arity(); ++i)
    if (!match(pattern.arg(i), t.arg(i), sigma)) return false;
  return true;
}

Term substitute(const Term& t, const Substitution& sigma) {
  if (t.is_variable()) {
    const Term* u = sigma.find(t.var());
    return u ? *u : t;
  }
  if (t.arity() == 0) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(substitute(a, sigma));
  return Term::apply(t.symbol(), std::move(args));
}

// ---------------------------------------------------------------------- Trs

namespace {

void check_arities(const Signature& sig, const Term& t) {
  if (t.is_variable()) return;
  if (index_of(t.symbol()) >= sig.symbol_count()) throw Error("term uses an unknown symbol");
  if (sig.arity(t.symbol()) != t.arity())
    throw ArityMismatch("symbol '" + sig.name(t.symbol()) + "' expects " +
                        std::to_string(sig.arity(t.symbol())) + " arguments, got " +
                        std::to_string(t.arity()));
  for (const Term& a : t.args()) check_arities(sig, a);
}

}  // namespace

Trs::Trs(Signature signature, std::vector<Rule> rules)
    : signature_(std::move(signature)), rules_(std::move(rules)) {
  defined_.assign(signature_.symbol_count(), false);
  by_root_.assign(signature_.symbol_count(), {});
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    if (r.lhs.is_variable()) throw Error("rule " + std::to_string(i + 1) + ": left-hand side is a variable");
    check_arities(signature_, r.lhs);
    check_arities(signature_, r.rhs);
    std::vector<VarId> lv, rv;
    collect_variables(r.lhs, lv);
    collect_variables(r.rhs, rv);
    for (VarId x : rv)
      if (std::find(lv.begin(), lv.end(), x) == lv.end())
        throw Error("rule " + std::to_string(i + 1) + ": variable '" + signature_.variable_name(x) +
                    "' occurs only on the right-hand side");
    const SymbolId f = r.lhs.symbol();
    if (!defined_[index_of(f)]) {
      defined_[index_of(f)] = true;
      defined_order_.push_back(f);
    }
    by_root_[index_of(f)].push_back(i);
  }
}

const std::vector<std::size_t>& Trs::rules_for(SymbolId f) const {
  static const std::vector<std::size_t> none;
  return index_of(f) < by_root_.size() ? by_root_[index_of(f)] : none;
}

std::vector<SymbolId> Trs::constructors() const {
  std::vector<SymbolId> out;
  for (std::size_t i = 0; i < signature_.symbol_count(); ++i)
    if (!is_defined(static_cast<SymbolId>(i))) out.push_back(static_cast<SymbolId>(i));
  return out;
}

std::optional<PositionMask> Trs::declared_split(SymbolId f) const {
  if (auto it = splits_.find(index_of(f)); it != splits_.end()) return it->second;
  return std::nullopt;
}

void Trs::declare_split(SymbolId f, PositionMask normal) { splits_[index_of(f)] = normal; }

std::size_t Trs::max_rhs_size() const {
  std::size_t m = 0;
  for (const Rule& r : rules_) m = std::max(m, r.rhs.size());
  return m;
}

SymbolId Trs::add_constructor(std::string_view name, std::size_t arity) {
  const SymbolId f = signature_.add_symbol(name, arity);
  if (index_of(f) >= defined_.size()) {
    defined_.resize(signature_.symbol_count(), false);
    by_root_.resize(signature_.symbol_count());
  }
  return f;
}

// ----------------------------------------------------------- classification

bool is_value(const Trs& trs, const Term& t) {
  return !occurs_symbol(t, [&](SymbolId f) { return trs.is_defined(f); });
}

bool is_basic(const Trs& trs, const Term& t) {
  if (t.is_variable() || !trs.is_defined(t.symbol())) return false;
  for (const Term& a : t.args())
    if (!is_value(trs, a)) return false;
  return true;
}

bool is_constructor_trs(const Trs& trs) {
  for (const Rule& r : trs.rules())
    if (!is_basic(trs, r.lhs)) return false;
  return true;
}

bool is_left_linear(const Trs& trs) {
  for (const Rule& r : trs.rules()) {
    std::vector<VarId> seen;
    for (const Term& u : subterms(r.lhs)) {
      if (!u.is_variable()) continue;
      if (std::find(seen.begin(), seen.end(), u.var()) != seen.end()) return false;
      seen.push_back(u.var());
    }
  }
  return true;
}

bool root_normal(const Trs& trs, const Term& t) {
  if (t.is_variable()) return true;
  for (std::size_t i : trs.rules_for(t.symbol())) {
    Substitution sigma;
    if (match(trs.rules()[i].lhs, t, sigma)) return false;
  }
  return true;
}

bool is_normal_form(const Trs& trs, const Term& t) {
  if (t.is_variable()) return true;
  for (const Term& a : t.args())
    if (!is_normal_form(trs, a)) return false;
  return root_normal(trs, t);
}

// ------------------------------------------------------- innermost rewriting

namespace {

std::vector<Term> root_reducts(const Trs& trs, const Term& t) {
  std::vector<Term> out;
  if (t.is_variable()) return out;
  for (std::size_t i : trs.rules_for(t.symbol())) {
    Substitution sigma;
    if (match(trs.rules()[i].lhs, t, sigma)) out.push_back(substitute(trs.rules()[i].rhs, sigma));
  }
  return out;
}

Term replace_arg(const Term& t, std::size_t i, const Term& u) {
  std::vector<Term> args(t.args().begin(), t.args().end());
  args[i] = u;
  return Term::apply(t.symbol(), std::move(args));
}

void dedupe(std::vector<Term>& ts) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  for (Term& t : ts)
    if (seen.insert(t).second) out.push_back(std::move(t));
  ts = std::move(out);
}

// Successors in a system whose root steps are given by `at_root`, which is
// only consulted once all arguments are normal forms.
template <typename RootFn>
std::vector<Term> innermost_with(const Term& t, const RootFn& at_root) {
  std::vector<Term> out;
  if (t.is_variable()) return out;
  bool args_normal = true;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    auto sub = innermost_with(t.arg(i), at_root);
    if (!sub.empty()) args_normal = false;
    for (const Term& u : sub) out.push_back(replace_arg(t, i, u));
  }
  if (args_normal)
    for (Term& r : at_root(t)) out.push_back(std::move(r));
  dedupe(out);
  return out;
}

}  // namespace

std::vector<Term> innermost_successors(const Trs& trs, const Term& t) {
  return innermost_with(t, [&](const Term& u) { return root_reducts(trs, u); });
}

namespace {

// Normal forms reachable from a term, each with the longest derivation
// reaching it.
using NormalForms = std::vector<std::pair<Term, std::size_t>>;

void record(NormalForms& m, const Term& nf, std::size_t len) {
  for (auto& [u, l] : m)
    if (u == nf) {
      l = std::max(l, len);
      return;
    }
  m.emplace_back(nf, len);
}

struct Item {
  Term redex;
  std::size_t len;
  std::vector<Term> reducts;
};

struct Frame {
  Term term;
  int phase = 0;
  std::vector<Item> items;
};

class HeightSolver {
 public:
  HeightSolver(const Trs& trs, std::size_t fuel) : trs_(trs), fuel_(fuel) {}

  const NormalForms& solve(const Term& root) {
    std::vector<Frame> stack;
    stack.push_back({root, 0, {}});
    while (!stack.empty()) {
      tick();
      const std::size_t top = stack.size() - 1;
      if (stack[top].phase == 0) {
        const Term t = stack[top].term;
        if (memo_.count(t)) {
          stack.pop_back();
          continue;
        }
        if (t.is_variable()) {
          memo_[t] = {{t, 0}};
          stack.pop_back();
          continue;
        }
        active_.insert(t);
        stack[top].phase = 1;
        for (auto it = t.args().rbegin(); it != t.args().rend(); ++it) request(*it, stack);
      } else if (stack[top].phase == 1) {
        expand(stack[top]);
        stack[top].phase = 2;
        std::vector<Term> wanted;
        for (const Item& item : stack[top].items)
          for (const Term& r : item.reducts) wanted.push_back(r);
        for (auto it = wanted.rbegin(); it != wanted.rend(); ++it) request(*it, stack);
      } else {
        Frame fr = std::move(stack[top]);
        stack.pop_back();
        NormalForms result;
        for (const Item& item : fr.items) {
          if (item.reducts.empty()) {
            record(result, item.redex, item.len);
            continue;
          }
          for (const Term& r : item.reducts)
            for (const auto& [nf, l] : memo_.at(r)) record(result, nf, bounded(item.len + 1 + l));
        }
        active_.erase(fr.term);
        memo_[fr.term] = std::move(result);
      }
    }
    return memo_.at(root);
  }

 private:
  void tick() {
    if (++work_ > fuel_) throw FuelExceeded("derivation height: work budget exhausted");
  }

  std::size_t bounded(std::size_t len) const {
    if (len > fuel_) throw FuelExceeded("derivation height: derivation longer than the fuel");
    return len;
  }

  void request(const Term& t, std::vector<Frame>& stack) {
    if (memo_.count(t)) return;
    if (active_.count(t)) throw FuelExceeded("derivation height: rewrite cycle detected");
    stack.push_back({t, 0, {}});
  }

  // Combines the argument results into candidate root terms.
  void expand(Frame& fr) {
    const Term& t = fr.term;
    std::vector<std::pair<std::vector<Term>, std::size_t>> tuples{{{}, 0}};
    for (const Term& a : t.args()) {
      const NormalForms& m = memo_.at(a);
      std::vector<std::pair<std::vector<Term>, std::size_t>> next;
      next.reserve(tuples.size() * m.size());
      for (const auto& [prefix, len] : tuples)
        for (const auto& [nf, l] : m) {
          tick();
          auto args = prefix;
          args.push_back(nf);
          next.emplace_back(std::move(args), bounded(len + l));
        }
      tuples = std::move(next);
    }
    for (auto& [args, len] : tuples) {
      bool same = true;
      for (std::size_t i = 0; i < args.size() && same; ++i) same = args[i].same_node(t.arg(i));
      Term u = same ? t : Term::apply(t.symbol(), std::move(args));
      auto reducts = root_reducts(trs_, u);
      dedupe(reducts);
      fr.items.push_back({u, len, std::move(reducts)});
    }
  }

  const Trs& trs_;
  std::size_t fuel_;
  std::size_t work_ = 0;
  std::unordered_map<Term, NormalForms, TermHash> memo_;
  std::unordered_set<Term, TermHash> active_;
};

}  // namespace

std::size_t derivation_height(const Trs& trs, const Term& t, std::size_t fuel) {
  HeightSolver solver(trs, fuel);
  std::size_t best = 0;
  for (const auto& [nf, len] : solver.solve(t)) best = std::max(best, len);
  return best;
}

namespace {

std::optional<Term> leftmost_innermost_step(const Trs& trs, const Term& t) {
  if (t.is_variable()) return std::nullopt;
  for (std::size_t i = 0; i < t.arity(); ++i)
    if (auto u = leftmost_innermost_step(trs, t.arg(i))) return replace_arg(t, i, *u);
  for (std::size_t i : trs.rules_for(t.symbol())) {
    Substitution sigma;
    if (match(trs.rules()[i].lhs, t, sigma)) return substitute(trs.rules()[i].rhs, sigma);
  }
  return std::nullopt;
}

}  // namespace

Term normal_form(const Trs& trs, const Term& t, std::size_t fuel) {
  Term cur = t;
  for (std::size_t steps = 0;; ++steps) {
    auto next = leftmost_innermost_step(trs, cur);
    if (!next) return cur;
    if (steps >= fuel) throw FuelExceeded("normal form: step budget exhausted");
    cur = std::move(*next);
  }
}

// ------------------------------------------------------ complete definedness

namespace {

using Row = std::vector<Term>;

struct Coverage {
  const Signature& sig;
  std::vector<SymbolId> constructors;
  Term filler;

  // A tuple of `width` ground values matched by no row, if one exists.
  std::optional<Row> uncovered(const std::vector<Row>& rows, std::size_t width) const {
    if (width == 0) return rows.empty() ? std::optional<Row>(Row{}) : std::nullopt;
    std::set<SymbolId> heads;
    for (const Row& r : rows)
      if (!r[0].is_variable()) heads.insert(r[0].symbol());
    if (heads.size() == constructors.size()) {
      for (SymbolId c : constructors) {
        const std::size_t a = sig.arity(c);
        std::vector<Row> narrowed;
        for (const Row& r : rows) {
          Row nr;
          if (r[0].is_variable()) {
            nr.assign(a, r[0]);
          } else if (r[0].symbol() == c) {
            nr.assign(r[0].args().begin(), r[0].args().end());
          } else {
            continue;
          }
          nr.insert(nr.end(), r.begin() + 1, r.end());
          narrowed.push_back(std::move(nr));
        }
        if (auto w = uncovered(narrowed, a + width - 1)) {
          Row out;
          out.push_back(Term::apply(c, Row(w->begin(), w->begin() + static_cast<std::ptrdiff_t>(a))));
          out.insert(out.end(), w->begin() + static_cast<std::ptrdiff_t>(a), w->end());
          return out;
        }
      }
      return std::nullopt;
    }
    std::vector<Row> rest;
    for (const Row& r : rows)
      if (r[0].is_variable()) rest.emplace_back(r.begin() + 1, r.end());
    auto w = uncovered(rest, width - 1);
    if (!w) return std::nullopt;
    SymbolId missing = constructors.front();
    for (SymbolId c : constructors)
      if (!heads.count(c)) {
        missing = c;
        break;
      }
    Row out;
    out.push_back(Term::apply(missing, Row(sig.arity(missing), filler)));
    out.insert(out.end(), w->begin(), w->end());
    return out;
  }
};

}  // namespace

DefinednessReport is_completely_defined(const Trs& trs) {
  if (!is_constructor_trs(trs) || !is_left_linear(trs)) return {Definedness::unknown, std::nullopt};
  std::vector<SymbolId> constructors = trs.constructors();
  std::optional<Term> filler;
  for (SymbolId c : constructors)
    if (trs.signature().arity(c) == 0) {
      filler = Term::apply(c);
      break;
    }
  // Without a constant there are no ground values, hence no ground basic
  // terms of positive arity; defined constants always have a rule.
  if (!filler) return {Definedness::complete, std::nullopt};
  Coverage cov{trs.signature(), constructors, *filler};
  for (SymbolId f : trs.defined_symbols()) {
    std::vector<Row> rows;
    for (std::size_t i : trs.rules_for(f)) {
      const Term& l = trs.rules()[i].lhs;
      rows.emplace_back(l.args().begin(), l.args().end());
    }
    if (auto w = cov.uncovered(rows, trs.signature().arity(f)))
      return {Definedness::incomplete, Term::apply(f, std::move(*w))};
  }
  return {Definedness::complete, std::nullopt};
}

// ----------------------------------------------------------- garbage rules

SymbolId ensure_bottom(Trs& trs) {
  if (auto b = trs.signature().find_symbol(bottom_name)) {
    if (trs.signature().arity(*b) != 0)
      throw SignatureClash("symbol 'bot' is already used with arity " +
                           std::to_string(trs.signature().arity(*b)));
    if (trs.is_defined(*b)) throw SignatureClash("symbol 'bot' is defined by a rule");
    return *b;
  }
  return trs.add_constructor(bottom_name, 0);
}

Term normalize_with_garbage(const Trs& trs, const Term& t, SymbolId bot) {
  if (t.is_variable()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(normalize_with_garbage(trs, a, bot));
    changed = changed || !args.back().same_node(a);
  }
  Term u = changed ? Term::apply(t.symbol(), std::move(args)) : t;
  if (trs.is_defined(u.symbol()) && is_normal_form(trs, u)) return Term::apply(bot);
  return u;
}

std::vector<Term> garbage_innermost_successors(const Trs& trs, const Term& t, SymbolId bot) {
  return innermost_with(t, [&](const Term& u) {
    auto out = root_reducts(trs, u);
    if (out.empty() && trs.is_defined(u.symbol())) out.push_back(Term::apply(bot));
    return out;
  });
}

}  // namespace spop
