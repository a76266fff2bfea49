#include "spop/orders.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "matching.hpp"
#include "spop/error.hpp"

namespace spop {

std::string_view to_string(Variant v) { return v == Variant::spop ? "spop" : "spop_ps"; }

std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "spop") return Variant::spop;
  if (text == "spop_ps" || text == "ps") return Variant::spop_ps;
  return std::nullopt;
}

std::string_view to_string(Clause c) {
  switch (c) {
    case Clause::equivalent: return "eq";
    case Clause::st: return "st";
    case Clause::ia: return "ia";
    case Clause::ts: return "ts";
  }
  return "?";
}

std::size_t OrientationProof::node_count() const {
  std::size_t n = 1;
  for (const auto& p : premises) n += p.node_count();
  return n;
}

namespace {

struct Split {
  std::vector<std::size_t> normal;
  std::vector<std::size_t> safe;
};

bool is_defined(const Tiering& tiers, SymbolId f) {
  return index_of(f) < tiers.symbol_count() && tiers.is_defined(f);
}

Split split_of(const Tiering& tiers, const Term& t) {
  Split sp;
  const bool d = is_defined(tiers, t.symbol());
  for (std::size_t i = 0; i < t.arity(); ++i)
    (d && tiers.is_normal(t.symbol(), i) ? sp.normal : sp.safe).push_back(i);
  return sp;
}

}  // namespace

// --------------------------------------------------------------- PathOrder

PathOrder::PathOrder(const Certificate& cert, OrderOptions options, const Signature* sig)
    : cert_(cert), options_(options), sig_(sig) {}

std::string PathOrder::show(const Term& t) const {
  return sig_ ? to_string(*sig_, t, &cert_.tiering) : std::string("term");
}

bool PathOrder::greater(const Term& s, const Term& t) {
  auto key = std::make_pair(s, t);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const bool r = compute(s, t);
  cache_.emplace(std::move(key), r);
  return r;
}

bool PathOrder::greater_equal(const Term& s, const Term& t) {
  return safe_equivalent(cert_.precedence, cert_.tiering, s, t) || greater(s, t);
}

bool PathOrder::compute(const Term& s, const Term& t) {
  if (s.is_variable()) return false;
  return st(s, t, nullptr) || ia(s, t, nullptr) || ts(s, t, nullptr, nullptr);
}

bool PathOrder::st(const Term& s, const Term& t, std::size_t* which) {
  for (std::size_t i = 0; i < s.arity(); ++i)
    if (greater_equal(s.arg(i), t)) {
      if (which) *which = i;
      return true;
    }
  return false;
}

bool PathOrder::ia(const Term& s, const Term& t, std::string* why) {
  const Precedence& prec = cert_.precedence;
  const Tiering& tiers = cert_.tiering;
  const SymbolId f = s.symbol();
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (!is_defined(tiers, f)) return fail("the left root is a constructor");
  if (t.is_variable()) return fail("the right side is a variable");
  const SymbolId g = t.symbol();
  if (!prec.greater(f, g)) return fail("the right root is not below the left root");
  const Split sp = split_of(tiers, t);
  for (std::size_t j : sp.normal)
    if (!normal_subterm_gt(prec, tiers, s, t.arg(j)))
      return fail("normal argument " + std::to_string(j + 1) + " of " + show(t) +
                  " is not a normal subterm of " + show(s));
  for (std::size_t j : sp.safe)
    if (!greater(s, t.arg(j)))
      return fail("safe argument " + std::to_string(j + 1) + " of " + show(t) + ": " + explain(s, t.arg(j)));
  // Plain: arguments with defined symbols not below f. Extended: arguments
  // with any symbol not below f.
  std::size_t offending = 0;
  for (const Term& a : t.args()) {
    const bool bad = cert_.variant == Variant::spop
                         ? occurs_symbol(a, [&](SymbolId h) { return is_defined(tiers, h) && !prec.greater(f, h); })
                         : occurs_symbol(a, [&](SymbolId h) { return !prec.greater(f, h); });
    if (bad) ++offending;
  }
  if (offending > 1)
    return fail(std::to_string(offending) + " arguments of " + show(t) +
                " contain symbols not below the left root");
  return true;
}

bool PathOrder::ts(const Term& s, const Term& t, std::string* why, OrientationProof* proof) {
  const Precedence& prec = cert_.precedence;
  const Tiering& tiers = cert_.tiering;
  const SymbolId f = s.symbol();
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (!is_defined(tiers, f) || !tiers.is_recursive(f)) return fail("the left root is not recursive");
  if (t.is_variable()) return fail("the right side is a variable");
  const SymbolId g = t.symbol();
  if (!prec.equivalent(f, g)) return fail("the right root is not equivalent to the left root");
  const Split ls = split_of(tiers, s);
  const Split rs = split_of(tiers, t);
  if (ls.normal.size() != rs.normal.size()) return fail("normal argument counts differ");
  const bool plain = cert_.variant == Variant::spop;
  if (plain && ls.safe.size() != rs.safe.size()) return fail("safe argument counts differ");

  auto tables = [&](const std::vector<std::size_t>& l, const std::vector<std::size_t>& r) {
    std::vector<std::vector<bool>> ge(l.size(), std::vector<bool>(r.size()));
    std::vector<std::vector<bool>> gt(l.size(), std::vector<bool>(r.size()));
    for (std::size_t i = 0; i < l.size(); ++i)
      for (std::size_t j = 0; j < r.size(); ++j) {
        gt[i][j] = greater(s.arg(l[i]), t.arg(r[j]));
        ge[i][j] = gt[i][j] || safe_equivalent(prec, tiers, s.arg(l[i]), t.arg(r[j]));
      }
    return std::make_pair(ge, gt);
  };

  auto [nge, ngt] = tables(ls.normal, rs.normal);
  auto pi = detail::product_match(nge, ngt, true);
  if (!pi) return fail("no permutation makes the normal arguments of " + show(t) + " decrease strictly");
  std::vector<std::size_t> tau;
  if (plain) {
    auto [sge, sgt] = tables(ls.safe, rs.safe);
    auto m = detail::product_match(sge, sgt, options_.strict_safe_products);
    if (!m) return fail("no permutation makes the safe arguments of " + show(t) + " decrease");
    tau = *m;
  } else {
    for (std::size_t j : rs.safe) {
      if (occurs_symbol(t.arg(j), [&](SymbolId h) { return !prec.greater(f, h); }))
        return fail("safe argument " + std::to_string(j + 1) + " of " + show(t) +
                    " contains a symbol not below the left root");
      if (!greater(s, t.arg(j)))
        return fail("safe argument " + std::to_string(j + 1) + " of " + show(t) + ": " + explain(s, t.arg(j)));
    }
  }
  if (proof) {
    proof->normal_perm.clear();
    for (std::size_t i = 0; i < ls.normal.size(); ++i) proof->normal_perm.push_back(rs.normal[(*pi)[i]]);
    proof->safe_perm.clear();
    for (std::size_t i = 0; i < tau.size(); ++i) proof->safe_perm.push_back(rs.safe[tau[i]]);
  }
  return true;
}

OrientationProof PathOrder::prove_geq(const Term& s, const Term& t) {
  if (safe_equivalent(cert_.precedence, cert_.tiering, s, t)) {
    OrientationProof p;
    p.clause = Clause::equivalent;
    p.lhs = s;
    p.rhs = t;
    return p;
  }
  return prove(s, t);
}

OrientationProof PathOrder::prove(const Term& s, const Term& t) {
  OrientationProof p;
  p.lhs = s;
  p.rhs = t;
  std::size_t i = 0;
  if (st(s, t, &i)) {
    p.clause = Clause::st;
    p.argument = i;
    p.premises.push_back(prove_geq(s.arg(i), t));
    return p;
  }
  if (ia(s, t, nullptr)) {
    p.clause = Clause::ia;
    for (std::size_t j : split_of(cert_.tiering, t).safe) p.premises.push_back(prove(s, t.arg(j)));
    return p;
  }
  if (ts(s, t, nullptr, &p)) {
    p.clause = Clause::ts;
    const Split ls = split_of(cert_.tiering, s);
    for (std::size_t k = 0; k < ls.normal.size(); ++k)
      p.premises.push_back(prove_geq(s.arg(ls.normal[k]), t.arg(p.normal_perm[k])));
    if (cert_.variant == Variant::spop) {
      for (std::size_t k = 0; k < ls.safe.size(); ++k)
        p.premises.push_back(prove_geq(s.arg(ls.safe[k]), t.arg(p.safe_perm[k])));
    } else {
      for (std::size_t j : split_of(cert_.tiering, t).safe) p.premises.push_back(prove(s, t.arg(j)));
    }
    return p;
  }
  throw Error("internal: prove called on an unordered pair");
}

std::string PathOrder::explain(const Term& s, const Term& t) {
  if (s.is_variable()) return show(s) + " is a variable";
  const Precedence& prec = cert_.precedence;
  const Tiering& tiers = cert_.tiering;
  std::string why;
  const std::string head = show(s) + " > " + show(t) + " fails: ";
  if (!t.is_variable()) {
    if (tiers.is_recursive(s.symbol()) && prec.equivalent(s.symbol(), t.symbol())) {
      ts(s, t, &why, nullptr);
      return head + why;
    }
    if (is_defined(tiers, s.symbol()) && prec.greater(s.symbol(), t.symbol())) {
      ia(s, t, &why);
      return head + why;
    }
    if (is_defined(tiers, s.symbol()) && !prec.greater(s.symbol(), t.symbol()))
      return head + "no argument is greater or equal, and the right root is not below the left root";
  }
  return head + "no argument of the left side is greater or equal";
}

Orientation PathOrder::orient(const Term& s, const Term& t) {
  Orientation o;
  if (greater(s, t))
    o.proof = prove(s, t);
  else
    o.failure = explain(s, t);
  return o;
}

Orientation spop_gt(const Certificate& cert, const Term& s, const Term& t, OrderOptions options) {
  Certificate c = cert;
  c.variant = Variant::spop;
  return PathOrder(c, options).orient(s, t);
}

Orientation spop_ps_gt(const Certificate& cert, const Term& s, const Term& t, OrderOptions options) {
  Certificate c = cert;
  c.variant = Variant::spop_ps;
  return PathOrder(c, options).orient(s, t);
}

// ------------------------------------------------------------------ replay

namespace {

class Replayer {
 public:
  Replayer(const Certificate& cert, OrderOptions options) : cert_(cert), options_(options) {}

  std::string check(const OrientationProof& p) {
    const Precedence& prec = cert_.precedence;
    const Tiering& tiers = cert_.tiering;
    const Term& s = p.lhs;
    const Term& t = p.rhs;
    const std::string at = std::string(to_string(p.clause)) + " node: ";
    if (p.clause == Clause::equivalent) {
      if (!p.premises.empty()) return at + "equivalence leaf has premises";
      return safe_equivalent(prec, tiers, s, t) ? "" : at + "sides are not equivalent";
    }
    if (s.is_variable()) return at + "left side is a variable";
    const SymbolId f = s.symbol();
    switch (p.clause) {
      case Clause::st: {
        if (p.argument >= s.arity() || p.premises.size() != 1) return at + "malformed";
        const auto& q = p.premises[0];
        if (!(q.lhs == s.arg(p.argument)) || !(q.rhs == t)) return at + "premise compares the wrong pair";
        return check(q);
      }
      case Clause::ia: {
        if (!is_defined(tiers, f) || t.is_variable() || !prec.greater(f, t.symbol()))
          return at + "roots do not allow composition";
        const Split sp = split_of(tiers, t);
        for (std::size_t j : sp.normal)
          if (!normal_subterm_gt(prec, tiers, s, t.arg(j))) return at + "normal argument not a normal subterm";
        if (p.premises.size() != sp.safe.size()) return at + "wrong number of premises";
        for (std::size_t k = 0; k < sp.safe.size(); ++k)
          if (auto e = strict(p.premises[k], s, t.arg(sp.safe[k])); !e.empty()) return e;
        std::size_t offending = 0;
        for (const Term& a : t.args())
          if (occurs_symbol(a, [&](SymbolId h) {
                return (cert_.variant == Variant::spop_ps || is_defined(tiers, h)) && !prec.greater(f, h);
              }))
            ++offending;
        return offending <= 1 ? "" : at + "more than one argument calls upward";
      }
      case Clause::ts: {
        if (!is_defined(tiers, f) || !tiers.is_recursive(f) || t.is_variable() ||
            !prec.equivalent(f, t.symbol()))
          return at + "roots do not allow recursion";
        const Split ls = split_of(tiers, s);
        const Split rs = split_of(tiers, t);
        const bool plain = cert_.variant == Variant::spop;
        if (ls.normal.size() != rs.normal.size() || (plain && ls.safe.size() != rs.safe.size()))
          return at + "argument counts differ";
        if (!bijection(p.normal_perm, rs.normal)) return at + "normal permutation is not a bijection";
        std::size_t next = 0;
        bool some_strict = false;
        for (std::size_t k = 0; k < ls.normal.size(); ++k, ++next) {
          if (next >= p.premises.size()) return at + "missing premise";
          const auto& q = p.premises[next];
          if (auto e = weak(q, s.arg(ls.normal[k]), t.arg(p.normal_perm[k])); !e.empty()) return e;
          some_strict = some_strict || q.clause != Clause::equivalent;
        }
        if (!some_strict) return at + "normal arguments do not decrease strictly";
        if (plain) {
          if (!bijection(p.safe_perm, rs.safe)) return at + "safe permutation is not a bijection";
          bool safe_strict = false;
          for (std::size_t k = 0; k < ls.safe.size(); ++k, ++next) {
            if (next >= p.premises.size()) return at + "missing premise";
            const auto& q = p.premises[next];
            if (auto e = weak(q, s.arg(ls.safe[k]), t.arg(p.safe_perm[k])); !e.empty()) return e;
            safe_strict = safe_strict || q.clause != Clause::equivalent;
          }
          if (options_.strict_safe_products && !safe_strict) return at + "safe arguments do not decrease strictly";
        } else {
          for (std::size_t j : rs.safe) {
            if (occurs_symbol(t.arg(j), [&](SymbolId h) { return !prec.greater(f, h); }))
              return at + "safe argument contains a symbol not below the root";
            if (next >= p.premises.size()) return at + "missing premise";
            if (auto e = strict(p.premises[next++], s, t.arg(j)); !e.empty()) return e;
          }
        }
        return next == p.premises.size() ? "" : at + "surplus premises";
      }
      case Clause::equivalent: break;
    }
    return at + "unknown clause";
  }

 private:
  static bool bijection(const std::vector<std::size_t>& perm, const std::vector<std::size_t>& targets) {
    if (perm.size() != targets.size()) return false;
    auto a = perm;
    auto b = targets;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }

  std::string strict(const OrientationProof& q, const Term& s, const Term& t) {
    if (!(q.lhs == s) || !(q.rhs == t)) return "premise compares the wrong pair";
    if (q.clause == Clause::equivalent) return "strict premise is an equivalence";
    return check(q);
  }

  std::string weak(const OrientationProof& q, const Term& s, const Term& t) {
    if (!(q.lhs == s) || !(q.rhs == t)) return "premise compares the wrong pair";
    return check(q);
  }

  const Certificate& cert_;
  OrderOptions options_;
};

void print_proof(const Signature& sig, const Tiering& tiers, const OrientationProof& p, std::size_t indent,
                 std::string& out) {
  out.append(indent * 2, ' ');
  out += to_string(sig, p.lhs, &tiers);
  out += p.clause == Clause::equivalent ? " ~ " : " > ";
  out += to_string(sig, p.rhs, &tiers);
  out += "  [";
  out += to_string(p.clause);
  out += "]\n";
  for (const auto& q : p.premises) print_proof(sig, tiers, q, indent + 1, out);
}

}  // namespace

std::string replay(const Certificate& cert, const OrientationProof& proof, OrderOptions options) {
  return Replayer(cert, options).check(proof);
}

std::string to_string(const Signature& sig, const Tiering& tiers, const OrientationProof& proof) {
  std::string out;
  print_proof(sig, tiers, proof, 0, out);
  return out;
}

// ---------------------------------------------------------- compatibility

std::vector<std::string> certificate_problems(const Trs& trs, const Certificate& cert) {
  std::vector<std::string> out;
  const Signature& sig = trs.signature();
  const std::size_t n = sig.symbol_count();
  if (cert.tiering.symbol_count() != n || cert.precedence.symbol_count() != n) {
    out.push_back("certificate does not cover the signature");
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = static_cast<SymbolId>(i);
    const SymbolKind k = cert.tiering.kind(f);
    if (trs.is_defined(f) && k == SymbolKind::constructor)
      out.push_back("defined symbol '" + sig.name(f) + "' is marked as a constructor");
    if (!trs.is_defined(f) && k != SymbolKind::constructor)
      out.push_back("constructor '" + sig.name(f) + "' is marked as " + std::string(to_string(k)));
    const PositionMask m = cert.tiering.normal_mask(f);
    if (k == SymbolKind::constructor && m != 0)
      out.push_back("constructor '" + sig.name(f) + "' has normal positions");
    if (sig.arity(f) < 64 && (m >> sig.arity(f)) != 0)
      out.push_back("symbol '" + sig.name(f) + "' has normal positions beyond its arity");
    if (!cert.precedence.contains(f)) out.push_back("symbol '" + sig.name(f) + "' is missing from the precedence");
  }
  if (!out.empty()) return out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto f = static_cast<SymbolId>(i);
      const auto g = static_cast<SymbolId>(j);
      if (cert.precedence.greater(f, g) && !cert.tiering.is_defined(f))
        out.push_back("constructor '" + sig.name(f) + "' is above '" + sig.name(g) + "'");
      if (i < j && cert.precedence.equivalent(f, g) && cert.tiering.kind(f) != cert.tiering.kind(g))
        out.push_back("equivalent symbols '" + sig.name(f) + "' and '" + sig.name(g) + "' differ in kind");
    }
  return out;
}

std::size_t certified_degree(const Trs& trs, const Certificate& cert) {
  std::size_t d = 0;
  for (SymbolId f : trs.defined_symbols())
    d = std::max(d, recursion_depth(cert.precedence, cert.tiering, f));
  return d;
}

Compatibility check_compatibility(const Trs& trs, const Certificate& cert, OrderOptions options, Execution exec) {
  if (!is_constructor_trs(trs)) throw Error("not a constructor rewrite system");
  Compatibility result;
  if (auto problems = certificate_problems(trs, cert); !problems.empty()) {
    result.failure = CompatibilityFailure{CompatibilityFailure::npos, problems.front()};
    return result;
  }
  const auto& rules = trs.rules();
  const auto n = static_cast<std::ptrdiff_t>(rules.size());
  std::vector<Orientation> outcomes(rules.size());
  auto orient_rule = [&](std::size_t i) {
    PathOrder order(cert, options, &trs.signature());
    outcomes[i] = order.orient(rules[i].lhs, rules[i].rhs);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) orient_rule(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) orient_rule(static_cast<std::size_t>(i));
  }
  DegreeReport report;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (!outcomes[i]) {
      const Signature& sig = trs.signature();
      result.failure = CompatibilityFailure{
          i, to_string(sig, rules[i].lhs, &cert.tiering) + " -> " + to_string(sig, rules[i].rhs, &cert.tiering) +
                 ": " + outcomes[i].failure};
      return result;
    }
    report.proofs.push_back(std::move(*outcomes[i].proof));
  }
  for (SymbolId f : trs.defined_symbols())
    report.depths.emplace_back(f, recursion_depth(cert.precedence, cert.tiering, f));
  report.degree = certified_degree(trs, cert);
  result.report = std::move(report);
  return result;
}

// ------------------------------------------------------------ linearization

Precedence linearize(const Tiering& tiers, const std::vector<std::vector<SymbolId>>& below) {
  const std::size_t n = tiers.symbol_count();
  std::vector<int> rd(n, -1), rk(n, -1);
  std::vector<int> state(n, 0);
  std::function<void(std::size_t)> visit = [&](std::size_t f) {
    if (state[f] == 2) return;
    if (state[f] == 1) throw Error("call graph has a cycle");
    state[f] = 1;
    int d = 0, r = 0;
    if (f < below.size())
      for (SymbolId g : below[f]) {
        visit(index_of(g));
        d = std::max(d, rd[index_of(g)]);
        r = std::max(r, rk[index_of(g)]);
      }
    rd[f] = d + (tiers.is_recursive(static_cast<SymbolId>(f)) ? 1 : 0);
    rk[f] = r + 1;
    state[f] = 2;
  };
  for (std::size_t f = 0; f < n; ++f) visit(f);
  // Key order, lowest first: constructors; then by depth, recursive symbols
  // before compositional ones, compositional ones by rank.
  std::map<std::tuple<int, int, int>, int> classes;
  std::vector<std::tuple<int, int, int>> keys(n);
  for (std::size_t f = 0; f < n; ++f) {
    const auto id = static_cast<SymbolId>(f);
    if (!tiers.is_defined(id))
      keys[f] = {-1, 0, 0};
    else if (tiers.is_recursive(id))
      keys[f] = {rd[f], 0, 0};
    else
      keys[f] = {rd[f], 1, rk[f]};
    classes.emplace(keys[f], 0);
  }
  int level = 0;
  for (auto& [key, l] : classes) l = level++;
  std::vector<int> levels(n);
  for (std::size_t f = 0; f < n; ++f) levels[f] = classes.at(keys[f]);
  return Precedence::from_levels(std::move(levels));
}

}  // namespace spop
