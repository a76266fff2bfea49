#include "spop/synthesis.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <string>

#include "spop/error.hpp"

namespace spop {

namespace {

using Clock = std::chrono::steady_clock;

void collect_vars(const Term& t, std::set<VarId>& out) {
  for (const Term& u : subterms(t))
    if (u.is_variable()) out.insert(u.var());
}

// Static data shared by every search over one system.
struct Problem {
  const Trs& trs;
  Variant variant;
  OrderOptions order;
  std::vector<SymbolId> symbols;
  std::vector<int> index;  // symbol id -> position in `symbols`, or -1
  std::vector<std::vector<PositionMask>> masks;
  std::vector<std::vector<std::size_t>> ready;  // rules completed by symbol i

  Problem(const Trs& t, Variant v, const SynthesisOptions& options)
      : trs(t), variant(v), order(options.order), symbols(t.defined_symbols()) {
    const Signature& sig = trs.signature();
    index.assign(sig.symbol_count(), -1);
    for (std::size_t i = 0; i < symbols.size(); ++i) index[index_of(symbols[i])] = static_cast<int>(i);
    for (SymbolId f : symbols) {
      std::vector<PositionMask> choice;
      const auto declared = trs.declared_split(f);
      if (declared && !options.free_splits) {
        choice.push_back(*declared);
      } else {
        const std::size_t n = sig.arity(f);
        const PositionMask full = n == 64 ? ~PositionMask{0} : (PositionMask{1} << n) - 1;
        if (n > 16) throw Error("synthesis: arity of " + sig.name(f) + " is too large to search its splits");
        for (PositionMask m = full;; --m) {
          choice.push_back(m);
          if (m == 0) break;
        }
      }
      masks.push_back(std::move(choice));
    }
    ready.resize(symbols.size());
    for (std::size_t r = 0; r < trs.rules().size(); ++r) {
      int last = -1;
      const Rule& rule = trs.rules()[r];
      for (const Term* side : {&rule.lhs, &rule.rhs})
        for (const Term& u : subterms(*side))
          if (!u.is_variable() && index[index_of(u.symbol())] >= 0)
            last = std::max(last, index[index_of(u.symbol())]);
      ready[static_cast<std::size_t>(last)].push_back(r);
    }
  }
};

struct Outcome {
  std::optional<Certificate> found;
  std::size_t count = 0;
  bool out_of_budget = false;
};

// Depth-first assignment of split, kind and class to each defined symbol in
// order of first appearance. Classes are kept lowest first.
class Search {
 public:
  Search(const Problem& p, std::size_t degree, std::size_t limit, Clock::time_point deadline)
      : p_(p), degree_(degree), limit_(limit), deadline_(deadline), mask_(p.symbols.size(), 0),
        kind_(p.symbols.size(), SymbolKind::compositional) {}

  std::size_t branch_count() const { return p_.masks.empty() ? 0 : p_.masks[0].size() * 2; }

  // Top-level branch b fixes the split and kind of the first symbol.
  Outcome run_branch(std::size_t b) {
    Outcome o;
    if (!out_of_budget_) {
      mask_[0] = p_.masks[0][b / 2];
      const SymbolKind k = b % 2 == 0 ? SymbolKind::compositional : SymbolKind::recursive;
      if (filter_ok(0) && (k == SymbolKind::compositional || degree_ >= 1) && tick()) {
        kind_[0] = k;
        classes_.push_back({0});
        class_kind_.push_back(k);
        rec_classes_ = k == SymbolKind::recursive ? 1 : 0;
        if (orient_ok(0) && run(1)) o.found = found_;
        classes_.clear();
        class_kind_.clear();
        rec_classes_ = 0;
      }
    }
    o.count = count_;
    o.out_of_budget = out_of_budget_;
    return o;
  }

  std::size_t count() const noexcept { return count_; }
  bool out_of_budget() const noexcept { return out_of_budget_; }
  const std::optional<Certificate>& found() const noexcept { return found_; }

 private:
  bool tick() {
    ++count_;
    if (count_ > limit_ || ((count_ & 255) == 0 && Clock::now() > deadline_)) out_of_budget_ = true;
    return !out_of_budget_;
  }

  bool run(std::size_t i) {
    if (i == p_.symbols.size()) {
      found_ = certificate(i);
      return true;
    }
    for (PositionMask m : p_.masks[i]) {
      mask_[i] = m;
      if (!filter_ok(i)) continue;
      for (std::size_t c = 0; c < classes_.size(); ++c) {
        if (!tick()) return false;
        kind_[i] = class_kind_[c];
        classes_[c].push_back(i);
        const bool ok = orient_ok(i) && run(i + 1);
        classes_[c].pop_back();
        if (ok) return true;
        if (out_of_budget_) return false;
      }
      for (std::size_t gap = 0; gap <= classes_.size(); ++gap) {
        for (SymbolKind k : {SymbolKind::compositional, SymbolKind::recursive}) {
          const bool rec = k == SymbolKind::recursive;
          if (rec && rec_classes_ + 1 > degree_) continue;
          if (!tick()) return false;
          kind_[i] = k;
          classes_.insert(classes_.begin() + static_cast<std::ptrdiff_t>(gap), {i});
          class_kind_.insert(class_kind_.begin() + static_cast<std::ptrdiff_t>(gap), k);
          if (rec) ++rec_classes_;
          const bool ok = orient_ok(i) && run(i + 1);
          if (rec) --rec_classes_;
          classes_.erase(classes_.begin() + static_cast<std::ptrdiff_t>(gap));
          class_kind_.erase(class_kind_.begin() + static_cast<std::ptrdiff_t>(gap));
          if (ok) return true;
          if (out_of_budget_) return false;
        }
      }
    }
    return false;
  }

  // A variable below a normal argument on the right must sit below a normal
  // argument on the left, or no clause can relate the two.
  bool filter_ok(std::size_t i) const {
    for (std::size_t r : p_.ready[i]) {
      const Rule& rule = p_.trs.rules()[r];
      const PositionMask lm = mask_[static_cast<std::size_t>(p_.index[index_of(rule.lhs.symbol())])];
      std::set<VarId> normal_vars;
      for (std::size_t j = 0; j < rule.lhs.arity(); ++j)
        if (lm >> j & 1) collect_vars(rule.lhs.arg(j), normal_vars);
      for (const Term& u : subterms(rule.rhs)) {
        if (u.is_variable()) continue;
        const int g = p_.index[index_of(u.symbol())];
        if (g < 0) continue;
        for (std::size_t j = 0; j < u.arity(); ++j) {
          if (!(mask_[static_cast<std::size_t>(g)] >> j & 1)) continue;
          std::set<VarId> vs;
          collect_vars(u.arg(j), vs);
          for (VarId x : vs)
            if (!normal_vars.count(x)) return false;
        }
      }
    }
    return true;
  }

  bool orient_ok(std::size_t i) const {
    if (p_.ready[i].empty()) return true;
    const Certificate cert = certificate(i + 1);
    PathOrder order(cert, p_.order);
    for (std::size_t r : p_.ready[i]) {
      const Rule& rule = p_.trs.rules()[r];
      if (!order.greater(rule.lhs, rule.rhs)) return false;
    }
    return true;
  }

  // Certificate over the first `assigned` symbols; constructors share the
  // lowest class and unassigned symbols are left out of the precedence.
  Certificate certificate(std::size_t assigned) const {
    const Signature& sig = p_.trs.signature();
    Certificate cert;
    cert.variant = p_.variant;
    cert.tiering = Tiering(sig.symbol_count());
    std::vector<int> levels(sig.symbol_count(), -1);
    for (std::size_t f = 0; f < sig.symbol_count(); ++f)
      if (p_.index[f] < 0) levels[f] = 0;
    for (std::size_t c = 0; c < classes_.size(); ++c)
      for (std::size_t i : classes_[c]) {
        if (i >= assigned) continue;
        const SymbolId f = p_.symbols[i];
        cert.tiering.set_kind(f, kind_[i]);
        cert.tiering.set_normal_mask(f, mask_[i]);
        levels[index_of(f)] = static_cast<int>(c) + 1;
      }
    cert.precedence = Precedence::from_levels(std::move(levels));
    return cert;
  }

  const Problem& p_;
  std::size_t degree_;
  std::size_t limit_;
  Clock::time_point deadline_;
  std::vector<PositionMask> mask_;
  std::vector<SymbolKind> kind_;
  std::vector<std::vector<std::size_t>> classes_;
  std::vector<SymbolKind> class_kind_;
  std::size_t rec_classes_ = 0;
  std::size_t count_ = 0;
  bool out_of_budget_ = false;
  std::optional<Certificate> found_;
};

Outcome run_serial(const Problem& p, std::size_t degree, std::size_t limit, Clock::time_point deadline) {
  Search s(p, degree, limit, deadline);
  Outcome o;
  for (std::size_t b = 0; b < s.branch_count(); ++b) {
    o = s.run_branch(b);
    if (o.found || o.out_of_budget) return o;
  }
  o.count = s.count();
  return o;
}

// Branches run independently; the answer is the lowest successful branch,
// accepted only when the serial search would have reached it within budget.
Outcome run_parallel(const Problem& p, std::size_t degree, std::size_t limit, Clock::time_point deadline) {
  const std::size_t branches = Search(p, degree, limit, deadline).branch_count();
  std::vector<Outcome> outcomes(branches);
  std::vector<std::exception_ptr> errors(branches);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(branches); ++b) {
    try {
      Search s(p, degree, limit, deadline);
      outcomes[static_cast<std::size_t>(b)] = s.run_branch(static_cast<std::size_t>(b));
    } catch (...) {
      errors[static_cast<std::size_t>(b)] = std::current_exception();
    }
  }
  Outcome total;
  for (std::size_t b = 0; b < branches; ++b) {
    if (errors[b]) std::rethrow_exception(errors[b]);
    total.count += outcomes[b].count;
    if (outcomes[b].out_of_budget || total.count > limit) {
      if (Clock::now() > deadline) {
        total.out_of_budget = true;
        return total;
      }
      return run_serial(p, degree, limit, deadline);
    }
    if (outcomes[b].found) {
      total.found = std::move(outcomes[b].found);
      return total;
    }
  }
  return total;
}

}  // namespace

SynthesisResult synthesize(const Trs& trs, Variant variant, const SearchBudget& budget,
                           const SynthesisOptions& options) {
  if (budget.max_candidates == 0 || budget.time_limit.count() <= 0 || budget.max_degree == 0)
    throw Error("search budget must be positive");
  if (!is_constructor_trs(trs)) throw Error("synthesis needs a constructor system");
  const Problem problem(trs, variant, options);
  const auto deadline = Clock::now() + budget.time_limit;
  SynthesisResult result;

  auto accept = [&](Certificate cert) {
    auto compat = check_compatibility(trs, cert, options.order, Execution::serial);
    if (!compat) throw Error("synthesis produced an incompatible certificate: " + compat.failure->obligation);
    result.certificate = std::move(cert);
    result.report = std::move(compat.report);
  };

  if (problem.symbols.empty()) {
    Certificate cert;
    cert.variant = variant;
    cert.tiering = Tiering(trs.signature().symbol_count());
    cert.precedence = Precedence::from_levels(std::vector<int>(trs.signature().symbol_count(), 0));
    result.levels.push_back({0, 0, false});
    accept(std::move(cert));
    return result;
  }

  const std::size_t top = std::min(budget.max_degree, problem.symbols.size());
  for (std::size_t d = 0; d <= top; ++d) {
    const std::size_t remaining = budget.max_candidates - result.candidates;
    Outcome o = options.exec == Execution::parallel ? run_parallel(problem, d, remaining, deadline)
                                                    : run_serial(problem, d, remaining, deadline);
    result.candidates += std::min(o.count, remaining);
    result.levels.push_back({d, std::min(o.count, remaining), !o.found && !o.out_of_budget});
    if (o.found) {
      accept(std::move(*o.found));
      return result;
    }
    if (o.out_of_budget) {
      result.budget_exhausted = true;
      return result;
    }
  }
  return result;
}

Trs gen_family(std::size_t d) {
  Signature sig;
  const VarId x = sig.add_variable("x");
  const VarId y = sig.add_variable("y");
  const Term vx = Term::variable(x);
  const Term vy = Term::variable(y);
  const SymbolId f0 = sig.add_symbol("f_0", 1);
  const SymbolId a = sig.add_symbol("a", 0);
  std::vector<Rule> rules{{Term::apply(f0, {vx}), Term::apply(a)}};
  std::vector<std::pair<SymbolId, PositionMask>> splits{{f0, 1}};
  SymbolId prev = f0;
  if (d > 0) {
    const SymbolId b = sig.add_symbol("b", 2);
    const SymbolId s = sig.add_symbol("s", 1);
    for (std::size_t i = 1; i <= d; ++i) {
      const SymbolId f = sig.add_symbol("f_" + std::to_string(i), 1);
      const SymbolId g = sig.add_symbol("g_" + std::to_string(i), 2);
      rules.push_back({Term::apply(f, {vx}), Term::apply(g, {vx, vx})});
      rules.push_back({Term::apply(g, {Term::apply(s, {vx}), vy}),
                       Term::apply(b, {Term::apply(prev, {vy}), Term::apply(g, {vx, vy})})});
      splits.emplace_back(f, 1);
      splits.emplace_back(g, 3);
      prev = f;
    }
  }
  Trs trs(std::move(sig), std::move(rules));
  for (auto [f, m] : splits) trs.declare_split(f, m);
  return trs;
}

}  // namespace spop
